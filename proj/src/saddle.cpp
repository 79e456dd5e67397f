#include "bandlab/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bandlab/linalg.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const Complex kI(0, 1);

std::vector<Index> randomSubset(StreamRng& rng, int n, int m) {
  std::vector<Index> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  for (int i = 0; i < m; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(m);
  std::sort(all.begin(), all.end());
  return all;
}

double sampleRadius(StreamRng& rng) {
  double r;
  if (rng.uniform() < 0.7)
    r = rng.uniform(0.2, 3.0);
  else
    r = -1.5 * (std::log(rng.uniform()) + std::log(rng.uniform()));  // Gamma(2, 1.5)
  return std::max(r, 1e-6);
}

double sampleT(StreamRng& rng) {
  return rng.uniform() < 0.5 ? rng.uniform(0.0, 3.0) : -2.0 * std::log(rng.uniform());
}

ContourPoint emptyPoint(int W) {
  ContourPoint pt;
  pt.b1 = pt.b2 = pt.x1 = pt.x2 = ComplexVector::Zero(W);
  pt.t = pt.sigma = pt.v = pt.theta = RealVector::Zero(W);
  return pt;
}

double sumSq(const RealVector& x) { return x.squaredNorm(); }

}  // namespace

SaddleContext makeContext(double E, const VarianceProfile& p, double kappa) {
  require(kappa > 0 && kappa < std::numbers::sqrt2, "saddle: kappa must lie in (0, sqrt 2)");
  require(std::abs(E) <= std::numbers::sqrt2 - kappa + 1e-12,
          "saddle: E must satisfy |E| <= sqrt 2 - kappa");
  SaddleContext c;
  c.E = E;
  const double root = std::sqrt(4 - E * E);
  c.aPlus = Complex(root, E) / 2.0;
  c.aMinus = Complex(-root, E) / 2.0;
  c.Dpm = Eigen::Vector2cd(c.aPlus, c.aMinus).asDiagonal();
  c.Dmp = Eigen::Vector2cd(c.aMinus, c.aPlus).asDiagonal();
  c.Dp = Eigen::Vector2cd(c.aPlus, c.aPlus).asDiagonal();
  c.Dm = Eigen::Vector2cd(c.aMinus, c.aMinus).asDiagonal();
  c.S = p.laplacian();
  const Index W = c.S.rows();
  const ComplexMatrix Sc = c.S.cast<Complex>();
  const ComplexMatrix Id = ComplexMatrix::Identity(W, W);
  c.Aplus = (1.0 + c.aPlus * c.aPlus) * Id + c.aPlus * c.aPlus * Sc;
  c.Aminus = (1.0 + c.aMinus * c.aMinus) * Id + c.aMinus * c.aMinus * Sc;
  c.c0 = p.c0();
  c.maxMinorInverse = p.maxMinorInverse();
  return c;
}

Complex kk(Complex a, double E) { return a * a / 2.0 - kI * E * a - std::log(a); }

Complex kkPrime(Complex a, double E) { return a - kI * E - 1.0 / a; }

Complex ell(const ComplexVector& a, const RealMatrix& S, double E) {
  require(a.size() == S.rows(), "ell: size mismatch");
  Complex quad = 0, diag = 0;
  for (Index j = 0; j < a.size(); ++j) {
    diag += kk(a(j), E);
    for (Index k = 0; k < a.size(); ++k)
      if (S(j, k) != 0 && j != k) quad += S(j, k) * (a(j) - a(k)) * (a(j) - a(k));
  }
  return -quad / 4.0 + diag;
}

ComplexVector ellGradient(const ComplexVector& a, const RealMatrix& S, double E) {
  ComplexVector g(a.size());
  for (Index j = 0; j < a.size(); ++j) {
    Complex s = kkPrime(a(j), E);
    for (Index k = 0; k < a.size(); ++k)
      if (k != j) s -= S(j, k) * (a(j) - a(k));
    g(j) = s;
  }
  return g;
}

ContourPoint saddlePoint(const SaddleContext& ctx, SaddleType type) {
  const int W = ctx.blocks();
  ContourPoint pt = emptyPoint(W);
  pt.b1.setConstant(ctx.aPlus);
  pt.b2.setConstant(-ctx.aMinus);
  switch (type) {
    case SaddleType::Dpm:
      pt.x1.setConstant(ctx.aPlus);
      pt.x2.setConstant(ctx.aMinus);
      break;
    case SaddleType::Dp:
      pt.x1.setConstant(ctx.aPlus);
      pt.x2.setConstant(ctx.aPlus);
      break;
    case SaddleType::Dm:
      pt.x1.setConstant(ctx.aMinus);
      pt.x2.setConstant(ctx.aMinus);
      break;
  }
  return pt;
}

Complex tCross(const ContourPoint& pt, int j, int k) {
  const double sj = std::sqrt(1 + pt.t(j) * pt.t(j));
  const double sk = std::sqrt(1 + pt.t(k) * pt.t(k));
  return sj * pt.t(k) * std::polar(1.0, pt.sigma(k)) - sk * pt.t(j) * std::polar(1.0, pt.sigma(j));
}

Complex vCross(const ContourPoint& pt, int j, int k) {
  const double uj = std::sqrt(std::max(0.0, 1 - pt.v(j) * pt.v(j)));
  const double uk = std::sqrt(std::max(0.0, 1 - pt.v(k) * pt.v(k)));
  return uj * pt.v(k) * std::polar(1.0, pt.theta(k)) - uk * pt.v(j) * std::polar(1.0, pt.theta(j));
}

Complex ellSB(const ContourPoint& pt, const RealMatrix& S) {
  Complex sum = 0;
  for (Index j = 0; j < S.rows(); ++j)
    for (Index k = 0; k < S.cols(); ++k)
      if (j != k && S(j, k) != 0)
        sum += S(j, k) * std::norm(tCross(pt, int(j), int(k))) * (pt.b1(j) + pt.b2(j)) *
               (pt.b1(k) + pt.b2(k));
  return sum / 2.0;
}

Complex ellSX(const ContourPoint& pt, const RealMatrix& S) {
  Complex sum = 0;
  for (Index j = 0; j < S.rows(); ++j)
    for (Index k = 0; k < S.cols(); ++k)
      if (j != k && S(j, k) != 0)
        sum += S(j, k) * std::norm(vCross(pt, int(j), int(k))) * (pt.x1(j) - pt.x2(j)) *
               (pt.x1(k) - pt.x2(k));
  return sum / 2.0;
}

Complex lFunctional(const ContourPoint& pt, const SaddleContext& ctx) {
  return ell(pt.b1, ctx.S, ctx.E) + ell(-pt.b2, ctx.S, ctx.E) + ellSB(pt, ctx.S);
}

Complex kFunctional(const ContourPoint& pt, const SaddleContext& ctx) {
  return -ell(pt.x1, ctx.S, ctx.E) - ell(pt.x2, ctx.S, ctx.E) + ellSX(pt, ctx.S);
}

Complex lSaddle(const SaddleContext& ctx) {
  const int W = ctx.blocks();
  return ell(ComplexVector::Constant(W, ctx.aPlus), ctx.S, ctx.E) +
         ell(ComplexVector::Constant(W, ctx.aMinus), ctx.S, ctx.E);
}

Complex kSaddle(const SaddleContext& ctx) { return -lSaddle(ctx); }

RealMatrix svMatrix(const RealMatrix& S, const ContourPoint& pt) {
  const Index W = S.rows();
  RealMatrix Sv = RealMatrix::Zero(W, W);
  for (Index j = 0; j < W; ++j)
    for (Index k = 0; k < W; ++k)
      if (j != k) Sv(j, k) = S(j, k) * std::norm(vCross(pt, int(j), int(k)));
  RealMatrix out(2 * W, 2 * W);
  out << S - Sv, Sv, Sv, S - Sv;
  // The diagonal of S - S^v is rebuilt so that every row sums to zero.
  for (Index r = 0; r < 2 * W; ++r) {
    out(r, r) = 0;
    out(r, r) = -out.row(r).sum();
  }
  return out;
}

MarginReport verifyLLowerBound(const SaddleContext& ctx, int samples, std::uint64_t seed) {
  const int W = ctx.blocks();
  const double ref = lSaddle(ctx).real();
  StreamRng rng(seed, 0x1B);
  MarginReport rep;
  rep.samples = samples;
  rep.tolerance = 1e-12;
  rep.minValue = std::numeric_limits<double>::infinity();
  rep.minRatio = rep.minFarRatio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    ContourPoint pt = emptyPoint(W);
    const double mode = rng.uniform();
    const bool moveR = mode >= 0.2, moveT = mode < 0.2 || mode >= 0.4;
    RealVector r1 = RealVector::Ones(W), r2 = RealVector::Ones(W);
    for (int j = 0; j < W; ++j) {
      if (moveR) {
        r1(j) = sampleRadius(rng);
        r2(j) = sampleRadius(rng);
      }
      if (moveT && j > 0) {
        pt.t(j) = sampleT(rng);
        pt.sigma(j) = rng.uniform(0.0, kTwoPi);
      }
    }
    pt.b1 = ctx.aPlus * r1.cast<Complex>();
    pt.b2 = -ctx.aMinus * r2.cast<Complex>();
    const double val = lFunctional(pt, ctx).real() - ref;
    const double dist = sumSq(r1.array() - 1.0) + sumSq(r2.array() - 1.0);
    rep.minValue = std::min(rep.minValue, val);
    if (val < -rep.tolerance) ++rep.violations;
    if (dist > 1e-8) rep.minRatio = std::min(rep.minRatio, val / dist);
    if (dist > 0.1) rep.minFarRatio = std::min(rep.minFarRatio, val / dist);
  }
  rep.pass = rep.violations == 0 && rep.minFarRatio > 0;
  return rep;
}

KBoundReport verifyKLowerBound(const SaddleContext& ctx, int samples, std::uint64_t seed) {
  const int W = ctx.blocks();
  const double ref = kSaddle(ctx).real();
  StreamRng rng(seed, 0x1C);
  KBoundReport rep;
  auto init = [&](MarginReport& m) {
    m.samples = samples;
    m.tolerance = 1e-12;
    m.minValue = m.minRatio = m.minFarRatio = std::numeric_limits<double>::infinity();
  };
  init(rep.bound);
  init(rep.positive);
  for (int s = 0; s < samples; ++s) {
    ContourPoint pt = emptyPoint(W);
    RealVector vartheta(2 * W);
    for (int j = 0; j < W; ++j) {
      vartheta(j) = rng.uniform(0.0, kTwoPi);
      vartheta(W + j) = rng.uniform(0.0, kTwoPi);
      pt.x1(j) = std::polar(1.0, vartheta(j));
      pt.x2(j) = std::polar(1.0, vartheta(W + j));
      if (j > 0) {
        pt.v(j) = rng.uniform();
        pt.theta(j) = rng.uniform(0.0, kTwoPi);
      }
    }
    const double val = kFunctional(pt, ctx).real() - ref;
    const RealMatrix L = svMatrix(ctx.S, pt);
    double quad = 0;
    for (int a = 0; a < 2 * W; ++a)
      for (int b = 0; b < 2 * W; ++b)
        if (a != b) quad += L(a, b) * std::pow(std::cos(vartheta(a)) - std::cos(vartheta(b)), 2);
    quad /= 4;
    const double dev = sumSq(vartheta.array().sin() - ctx.E / 2);
    const double margin = val - quad - ctx.c0 * dev;

    rep.positive.minValue = std::min(rep.positive.minValue, val);
    if (val < -rep.positive.tolerance) ++rep.positive.violations;
    rep.bound.minValue = std::min(rep.bound.minValue, margin);
    if (margin < -rep.bound.tolerance) ++rep.bound.violations;
    if (dev > 1e-8) rep.bound.minRatio = std::min(rep.bound.minRatio, (val - quad) / dev);
    if (dev > 0.1) rep.bound.minFarRatio = std::min(rep.bound.minFarRatio, (val - quad) / dev);
  }
  rep.positive.pass = rep.positive.violations == 0;
  rep.bound.pass = rep.bound.violations == 0;

  // Saddle manifolds: type I (D_pm or D_mp with V_j swapping them back),
  // types II and III (constant D_p or D_m with arbitrary V).
  const int perType = std::max(1, samples / 100);
  for (int s = 0; s < 3 * perType; ++s) {
    const int type = s % 3;
    ContourPoint pt = saddlePoint(ctx, type == 0 ? SaddleType::Dpm
                                               : type == 1 ? SaddleType::Dp : SaddleType::Dm);
    for (int j = 1; j < W; ++j) {
      pt.theta(j) = rng.uniform(0.0, kTwoPi);
      if (type == 0) {
        if (rng.uniform() < 0.5) {
          pt.x1(j) = ctx.aMinus;
          pt.x2(j) = ctx.aPlus;
          pt.v(j) = 1;
        }
      } else {
        pt.v(j) = rng.uniform();
      }
    }
    rep.saddleMaxAbs = std::max(rep.saddleMaxAbs, std::abs(kFunctional(pt, ctx).real() - ref));
  }
  rep.saddlePass = rep.saddleMaxAbs <= 1e-12 * std::max(1.0, std::abs(ref));
  return rep;
}

SvReport svPositivityCheck(const SaddleContext& ctx, int samples, std::uint64_t seed) {
  const int W = ctx.blocks();
  StreamRng rng(seed, 0x1D);
  SvReport rep;
  rep.samples = samples;
  rep.c0 = ctx.c0;
  rep.minEigen = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    ContourPoint pt = emptyPoint(W);
    for (int j = 1; j < W; ++j) {
      pt.v(j) = rng.uniform();
      pt.theta(j) = rng.uniform(0.0, kTwoPi);
    }
    const RealMatrix L = svMatrix(ctx.S, pt);
    rep.maxRowSum = std::max(rep.maxRowSum, L.rowwise().sum().cwiseAbs().maxCoeff());
    const RealMatrix shifted = RealMatrix::Identity(2 * W, 2 * W) + L;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(shifted, Eigen::EigenvaluesOnly);
    rep.minEigen = std::min(rep.minEigen, es.eigenvalues().minCoeff());
  }
  rep.pass = rep.minEigen >= ctx.c0 - 1e-10 && rep.maxRowSum <= 1e-12;
  return rep;
}

double sectorConstant(const ContourPoint& pt) {
  double a = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < pt.b1.size(); ++j)
    for (Index k = 0; k < pt.b1.size(); ++k)
      a = std::min(a, ((pt.b1(j) + pt.b2(j)) * (pt.b1(k) + pt.b2(k))).real());
  return a;
}

double measureLogMargin(const ContourPoint& pt, const RealMatrix& S, int M) {
  const double A = sectorConstant(pt);
  double spread = 0;
  for (Index j = 0; j < S.rows(); ++j)
    for (Index k = 0; k < S.cols(); ++k)
      if (j != k) spread += S(j, k) * std::pow(pt.t(k) - pt.t(j), 2);
  const double logRhs = -double(M) / 12.0 * A * spread;
  const double logLhs = -double(M) * ellSB(pt, S).real();
  return logRhs - logLhs;
}

MeasureBoundReport measureBoundCheck(const SaddleContext& ctx, int M, int samples,
                                     std::uint64_t seed) {
  require(M >= 1, "measure bound: M must be >= 1");
  const int W = ctx.blocks();
  StreamRng rng(seed, 0x1E);
  MeasureBoundReport rep;
  rep.samples = samples;
  rep.minLogMargin = rep.minPointwiseFirst = rep.minPointwiseSecond = rep.minSector =
      std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    ContourPoint pt = emptyPoint(W);
    double rmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < W; ++j) {
      const double r1 = sampleRadius(rng), r2 = sampleRadius(rng);
      rmin = std::min({rmin, r1, r2});
      pt.b1(j) = ctx.aPlus * r1;
      pt.b2(j) = -ctx.aMinus * r2;
      if (j > 0) {
        pt.t(j) = rng.uniform();
        pt.sigma(j) = rng.uniform(0.0, kTwoPi);
      }
    }
    rep.minLogMargin = std::min(rep.minLogMargin, measureLogMargin(pt, ctx.S, M));
    rep.minSector = std::min(rep.minSector, sectorConstant(pt) / (rmin * rmin));
    for (int j = 0; j < W; ++j)
      for (int k = j + 1; k < W; ++k) {
        const double dt2 = std::pow(pt.t(k) - pt.t(j), 2);
        const double mid = dt2 / 4 *
                           (1 / (1 + 2 * pt.t(j) * pt.t(j)) + 1 / (1 + 2 * pt.t(k) * pt.t(k)));
        rep.minPointwiseFirst = std::min(rep.minPointwiseFirst, std::norm(tCross(pt, j, k)) - mid);
        rep.minPointwiseSecond = std::min(rep.minPointwiseSecond, mid - dt2 / 6);
      }
  }
  if (W < 2) rep.minPointwiseFirst = rep.minPointwiseSecond = 0;
  rep.pass = rep.minLogMargin >= -1e-10 && rep.minPointwiseFirst >= -1e-12 &&
             rep.minPointwiseSecond >= -1e-12;
  return rep;
}

DetRatioReport submatrixDetRatioCheck(const SaddleContext& ctx, int trials, std::uint64_t seed) {
  const int W = ctx.blocks();
  DetRatioReport rep;
  rep.trials = trials;
  Eigen::JacobiSVD<ComplexMatrix> svd(ctx.Aplus);
  rep.minSingularValue = svd.singularValues().minCoeff();
  if (W < 2) {
    rep.pass = rep.minSingularValue >= 1 - 1e-10;
    return rep;
  }
  const double detPlus = std::abs(determinant(ctx.Aplus));
  const double detMinus = std::abs(determinant(ctx.Aminus));
  const double det1 = std::abs(determinant(deleteRowCol(ctx.S, 0)));
  const double Wgamma = ctx.maxMinorInverse;
  StreamRng rng(seed, 0x1F);
  for (int s = 0; s < trials; ++s) {
    const int m = 1 + int(rng.below(W - 1));
    const auto I = randomSubset(rng, W, m);
    const auto J = randomSubset(rng, W, m);
    rep.maxAplusRatio =
        std::max(rep.maxAplusRatio, std::abs(determinant(deleteRowsCols(ctx.Aplus, I, J))) / detPlus);
    rep.maxAminusRatio = std::max(
        rep.maxAminusRatio, std::abs(determinant(deleteRowsCols(ctx.Aminus, I, J))) / detMinus);
    double bound = std::pow(2 * Wgamma, m - 1);
    for (int q = 2; q < m; ++q) bound *= q;
    const double ratio = std::abs(determinant(deleteRowsCols(ctx.S, I, J))) / det1;
    rep.maxSRatioMargin = std::max(rep.maxSRatioMargin, ratio / bound);
  }
  for (Index i = 0; i < W; ++i) {
    const double di = determinant(deleteRowCol(ctx.S, i));
    for (Index j = 0; j < W; ++j) {
      const Index r[1] = {i}, c[1] = {j};
      const double dij = determinant(deleteRowsCols(ctx.S, r, c));
      const double expect = ((j - i) % 2 == 0 ? 1.0 : -1.0) * di;
      rep.maxSignError = std::max(rep.maxSignError, std::abs(dij - expect) / std::abs(di));
    }
  }
  rep.pass = rep.minSingularValue >= 1 - 1e-10 && rep.maxAplusRatio <= 1 + 1e-10 &&
             rep.maxAminusRatio <= 1 + 1e-10 && rep.maxSRatioMargin <= 1 + 1e-9 &&
             rep.maxSignError <= 1e-9;
  return rep;
}

}  // namespace bandlab
