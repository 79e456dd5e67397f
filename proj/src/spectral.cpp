#include "bandlab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bandlab/linalg.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

SpectralDecomposition decompose(const ComplexMatrix& H) {
  require(H.rows() == H.cols(), "decompose: matrix must be square");
  SpectralDecomposition out;
  if (H.rows() == 0) return out;
  const double herm = maxNorm(H - H.adjoint());
  require(herm <= 1e-12 * std::max(1.0, maxNorm(H)), "decompose: matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("decompose: eigensolver did not converge");
  out.lambda = es.eigenvalues();
  out.U = es.eigenvectors();
  const Index N = H.rows();
  out.residual = maxNorm(H * out.U - out.U * out.lambda.asDiagonal());
  out.orthogonality =
      maxNorm(out.U.adjoint() * out.U - ComplexMatrix::Identity(N, N));
  const double norm = out.lambda.cwiseAbs().maxCoeff();
  if (out.residual > 1e-8 * norm && out.residual > 0) {
    std::ostringstream msg;
    msg << "decompose: residual " << out.residual << " exceeds 1e-8 * ||H|| = " << 1e-8 * norm;
    throw NumericalError(msg.str());
  }
  if (out.orthogonality > 1e-10) {
    std::ostringstream msg;
    msg << "decompose: ||U*U - I|| = " << out.orthogonality << " exceeds 1e-10";
    throw NumericalError(msg.str());
  }
  return out;
}

Complex mSc(Complex z) {
  require(z.imag() > 0, "m_sc: Im z must be positive");
  const Complex s = std::sqrt(z * z - 4.0);
  // The roots multiply to 1; take the large one without cancellation and
  // invert it. The small root is the one in the upper half plane.
  const Complex r1 = (-z + s) / 2.0;
  const Complex r2 = (-z - s) / 2.0;
  const Complex big = std::abs(r1) >= std::abs(r2) ? r1 : r2;
  return 1.0 / big;
}

double semicircleDensity(double x) {
  if (std::abs(x) >= 2) return 0;
  return std::sqrt(4 - x * x) / (2 * std::numbers::pi);
}

SpectralDomain buildDomain(int N, int M, double kappa, double eps2, int nE, int nEta) {
  const double lo = std::pow(double(N), -1 + eps2);
  const double hi = std::pow(double(N), eps2) / M;
  return buildDomain(N, M, kappa, eps2, nE, nEta, lo, hi);
}

SpectralDomain buildDomain(int N, int M, double kappa, double eps2, int nE, int nEta,
                           double etaLo, double etaHi) {
  require(N >= 1 && M >= 1 && M <= N, "domain: need 1 <= M <= N");
  require(N % M == 0, "domain: N must be divisible by M");
  require(kappa > 0, "domain: kappa must be positive");
  require(kappa < std::numbers::sqrt2, "domain: kappa >= sqrt(2) leaves an empty energy range");
  require(eps2 > 0, "domain: eps2 must be positive");
  require(nE >= 1 && nEta >= 1, "domain: grid sizes must be positive");
  SpectralDomain d;
  d.N = N;
  d.M = M;
  d.kappa = kappa;
  d.eps2 = eps2;
  d.etaMin = std::pow(double(N), -1 + eps2);
  d.etaMax = std::pow(double(N), eps2) / M;
  const double slack = 1e-12 * d.etaMax;
  require(d.etaMin <= d.etaMax + slack,
          "domain: eta bounds crossed; M is too close to N for this eps2");
  require(etaLo <= etaHi + slack && etaLo >= d.etaMin - slack && etaHi <= d.etaMax + slack,
          "domain: requested eta window lies outside N^{-1+eps2} <= eta <= N^{eps2}/M");
  const double emax = std::numbers::sqrt2 - kappa;
  for (int i = 0; i < nE; ++i)
    d.energies.push_back(nE == 1 ? 0.0 : -emax + 2 * emax * i / (nE - 1));
  if (etaHi - etaLo <= slack) {
    d.etas.push_back(etaLo);
  } else {
    const double a = std::log(etaLo), b = std::log(etaHi);
    for (int k = 0; k < nEta; ++k)
      d.etas.push_back(k == 0 ? etaLo
                              : k == nEta - 1 ? etaHi
                                              : std::exp(a + (b - a) * k / (nEta - 1)));
  }
  for (double E : d.energies)
    for (double eta : d.etas) d.zGrid.emplace_back(E, eta);
  return d;
}

bool inDomain(const SpectralDomain& d, Complex z, double tol) {
  return std::abs(z.real()) <= std::numbers::sqrt2 - d.kappa + tol &&
         z.imag() >= d.etaMin * (1 - tol) && z.imag() <= d.etaMax * (1 + tol);
}

namespace {

ComplexVector weights(const SpectralDecomposition& d, Complex z) {
  require(z.imag() > 0, "resolvent: Im z must be positive");
  ComplexVector w(d.size());
  for (Index i = 0; i < d.size(); ++i) w(i) = 1.0 / (d.lambda(i) - z);
  return w;
}

}  // namespace

ComplexMatrix resolvent(const SpectralDecomposition& d, Complex z) {
  const ComplexVector w = weights(d, z);
  const ComplexMatrix V = d.U * w.asDiagonal();
  return V * d.U.adjoint();
}

ComplexVector resolventDiagonal(const SpectralDecomposition& d, Complex z) {
  const ComplexVector w = weights(d, z);
  return d.U.cwiseAbs2().cast<Complex>() * w;
}

Complex resolventEntry(const SpectralDecomposition& d, Complex z, Index a, Index b) {
  const ComplexVector w = weights(d, z);
  return (d.U.row(a).transpose().array() * w.array() * d.U.row(b).adjoint().array()).sum();
}

ResolventStats resolventEntryStats(const SpectralDecomposition& d, Complex z,
                                   const EntryMode& mode) {
  const Index N = d.size();
  const Complex m = mSc(z);
  ResolventStats s;
  if (mode.kind == EntryMode::Full) {
    const ComplexMatrix G = resolvent(d, z);
    Complex trace = 0;
    for (Index a = 0; a < N; ++a) {
      trace += G(a, a);
      s.psiDiag = std::max(s.psiDiag, std::abs(G(a, a) - m));
      for (Index b = 0; b < N; ++b)
        if (a != b) s.psiOff = std::max(s.psiOff, std::abs(G(a, b)));
    }
    s.mBar = trace / double(N);
  } else {
    require(mode.pairs >= 1, "resolvent stats: sampled mode needs K >= 1");
    const ComplexVector g = resolventDiagonal(d, z);
    for (Index a = 0; a < N; ++a) s.psiDiag = std::max(s.psiDiag, std::abs(g(a) - m));
    s.mBar = g.mean();
    const ComplexVector w = weights(d, z);
    StreamRng rng(mode.seed, 0x5A);
    for (int k = 0; k < mode.pairs && N > 1; ++k) {
      const Index a = Index(rng.below(N));
      Index b = Index(rng.below(N - 1));
      if (b >= a) ++b;
      const Complex gab =
          (d.U.row(a).transpose().array() * w.array() * d.U.row(b).adjoint().array()).sum();
      s.psiOff = std::max(s.psiOff, std::abs(gab));
    }
    s.pairsSampled = mode.pairs;
  }
  s.lambdaD = s.psiDiag;
  return s;
}

double stabilityGamma(const VarianceProfile& p, int M, Complex z) {
  require(M >= 1, "stability_gamma: M must be >= 1");
  const Complex m2 = std::pow(mSc(z), 2);
  const Index W = p.blocks();
  // On block-constant vectors T acts as S~ = I + S; on vectors with zero
  // block sums it vanishes. Hence
  //   (1 - m^2 T)^{-1} = I + (A - I) (x) J_M / M,  A = (1 - m^2 S~)^{-1}.
  const ComplexMatrix B =
      ComplexMatrix::Identity(W, W) - m2 * p.varianceMatrix().cast<Complex>();
  Eigen::FullPivLU<ComplexMatrix> lu(B);
  const double rcond = lu.rcond();
  if (!lu.isInvertible() || rcond < 1e-14) {
    std::ostringstream msg;
    msg << "stability_gamma: 1 - m^2 S~ is near singular (rcond " << rcond << ")";
    throw NumericalError(msg.str());
  }
  const ComplexMatrix A = lu.inverse();
  double gamma = 0;
  for (Index j = 0; j < W; ++j) {
    const Complex c = A(j, j) - 1.0;
    double row = std::abs(1.0 + c / double(M)) + double(M - 1) / M * std::abs(c);
    for (Index k = 0; k < W; ++k)
      if (k != j) row += std::abs(A(j, k));
    gamma = std::max(gamma, row);
  }
  return gamma;
}

SelfConsistencyReport selfConsistencyResiduals(const SpectralDecomposition& d,
                                               const VarianceProfile& p, int M, Complex z) {
  const Index N = d.size();
  const Index W = p.blocks();
  require(N == Index(M) * W, "self_consistency: N must equal M W");
  const ComplexVector g = resolventDiagonal(d, z);
  const RealMatrix St = p.varianceMatrix();
  ComplexVector blockSum = ComplexVector::Zero(W);
  for (Index a = 0; a < N; ++a) blockSum(a / M) += g(a);
  const ComplexVector field = St.cast<Complex>() * blockSum / double(M);

  SelfConsistencyReport r;
  r.mBar = g.mean();
  r.delta.resize(N);
  r.omega.resize(N);
  for (Index i = 0; i < N; ++i) {
    if (g(i) == Complex(0)) throw NumericalError("self_consistency: G_ii vanished");
    r.delta(i) = 1.0 / g(i) + z + field(i / M);
    r.omega(i) = -g(i) - 1.0 / (z + r.mBar);
    r.maxAbsDelta = std::max(r.maxAbsDelta, std::abs(r.delta(i)));
  }
  r.omegaMean = r.omega.mean();
  r.omegaFromMean = -(r.mBar + 1.0 / (z + r.mBar));
  r.scaledMaxDelta = std::sqrt(N * z.imag()) * r.maxAbsDelta;
  return r;
}

}  // namespace bandlab
