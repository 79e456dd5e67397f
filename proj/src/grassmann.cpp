#include "bandlab/grassmann.hpp"

#include <algorithm>
#include <numeric>

#include "bandlab/linalg.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

std::int64_t bareissDeterminant(const Matrix<std::int64_t>& A) {
  require(A.rows() == A.cols(), "determinant: matrix must be square");
  const Index n = A.rows();
  if (n == 0) return 1;
  Matrix<__int128> a = A.cast<__int128>();
  __int128 prev = 1;
  int sign = 1;
  for (Index k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      Index p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.row(k).swap(a.row(p));
      sign = -sign;
    }
    for (Index i = k + 1; i < n; ++i)
      for (Index j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return std::int64_t(sign * a(n - 1, n - 1));
}

namespace {

int permutationSign(const std::vector<int>& v) {
  std::vector<int> p(v.size());
  std::iota(p.begin(), p.end(), 0);
  std::sort(p.begin(), p.end(), [&](int x, int y) { return v[x] < v[y]; });
  int sign = 1;
  std::vector<bool> seen(p.size(), false);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

bool hasRepeat(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

template <class Scalar>
Scalar minorDet(const Matrix<Scalar>& B, const std::vector<int>& I, const std::vector<int>& J) {
  std::vector<Index> r(I.begin(), I.end()), c(J.begin(), J.end());
  const auto m = deleteRowsCols(B, r, c);
  if constexpr (std::is_same_v<Scalar, std::int64_t>)
    return bareissDeterminant(m);
  else
    return determinant(m);
}

template <class Scalar>
WickCheck wickImpl(const Matrix<Scalar>& B, const std::vector<int>& I, const std::vector<int>& J) {
  require(B.rows() == B.cols(), "wick: B must be square");
  const int k = int(B.rows());
  require(k <= 6, "wick: k must be <= 6");
  require(I.size() == J.size() && int(I.size()) <= k, "wick: need |I| = |J| <= k");
  for (int x : I) require(x >= 0 && x < k, "wick: index out of range");
  for (int x : J) require(x >= 0 && x < k, "wick: index out of range");
  using G = GrassmannElement<Scalar>;
  G integrand = expQuadratic(B);
  for (std::size_t b = 0; b < I.size(); ++b)
    integrand = integrand * (G::psiBar(k, I[b]) * G::psi(k, J[b]));
  WickCheck w;
  w.lhs = Complex(berezinIntegrate(integrand));
  if (hasRepeat(I) || hasRepeat(J)) {
    w.degenerate = true;
    w.rhs = 0;
    w.equal = w.lhs == Complex(0);
    return w;
  }
  long parity = long(I.size());
  for (std::size_t b = 0; b < I.size(); ++b) parity += I[b] + J[b];
  const int sign = (parity % 2 ? -1 : 1) * permutationSign(I) * permutationSign(J);
  const Scalar rhs = Scalar(sign) * minorDet(B, I, J);
  w.rhs = Complex(rhs);
  if constexpr (std::is_same_v<Scalar, std::int64_t>)
    w.equal = berezinIntegrate(integrand) == rhs;
  else
    w.equal = std::abs(w.lhs - w.rhs) <= 1e-10 * std::max(1.0, std::abs(w.rhs));
  return w;
}

}  // namespace

WickCheck wickDeterminantCheck(const Matrix<std::int64_t>& B, const std::vector<int>& I,
                               const std::vector<int>& J) {
  return wickImpl(B, I, J);
}

WickCheck wickDeterminantCheck(const ComplexMatrix& B, const std::vector<int>& I,
                               const std::vector<int>& J) {
  return wickImpl<Complex>(B, I, J);
}

Complex complexWickAnalytic(const ComplexMatrix& A, const std::vector<int>& I,
                            const std::vector<int>& J) {
  require(I.size() == J.size(), "complex wick: need |I| = |J|");
  const ComplexMatrix inv = A.inverse();
  std::vector<int> sigma(I.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  Complex sum = 0;
  do {
    Complex prod = 1;
    for (std::size_t b = 0; b < J.size(); ++b) prod *= inv(J[b], I[sigma[b]]);
    sum += prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return sum / A.determinant();
}

ComplexWickResult complexWickCheck(const ComplexMatrix& A, const std::vector<int>& I,
                                   const std::vector<int>& J, int samples, std::uint64_t seed) {
  const Index k = A.rows();
  require(A.cols() == k && k >= 1 && k <= 2, "complex wick: need a square A with k <= 2");
  require(I.size() == J.size() && I.size() <= 2, "complex wick: need |I| = |J| <= 2");
  for (int x : I) require(x >= 0 && x < k, "complex wick: index out of range");
  for (int x : J) require(x >= 0 && x < k, "complex wick: index out of range");
  require(samples >= 2, "complex wick: need at least two samples");
  const ComplexMatrix Hm = (A + A.adjoint()) / 2.0;
  const ComplexMatrix Km = A - Hm;  // anti-Hermitian; phi^* K phi is imaginary
  Eigen::LLT<ComplexMatrix> llt(Hm);
  if (llt.info() != Eigen::Success) throw InvalidArgument("complex wick: Re A must be positive definite");
  // phi = L^{-*} xi has covariance H^{-1} when E xi xi^* = I.
  const ComplexMatrix Linv = llt.matrixL().solve(ComplexMatrix::Identity(k, k));
  const ComplexMatrix map = Linv.adjoint();
  const double detH = llt.matrixL().toDenseMatrix().diagonal().cwiseAbs2().prod();

  StreamRng rng(seed, 0xC0);
  Complex mean = 0;
  double m2re = 0, m2im = 0;
  ComplexVector xi(k);
  for (int s = 1; s <= samples; ++s) {
    for (Index a = 0; a < k; ++a) {
      const double re = rng.normal(), im = rng.normal();
      xi(a) = Complex(re, im) / std::sqrt(2.0);
    }
    const ComplexVector phi = map * xi;
    Complex f = std::exp(-phi.dot(Km * phi));
    for (std::size_t b = 0; b < I.size(); ++b) f *= std::conj(phi(I[b])) * phi(J[b]);
    const Complex delta = f - mean;
    mean += delta / double(s);
    m2re += delta.real() * (f - mean).real();
    m2im += delta.imag() * (f - mean).imag();
  }
  ComplexWickResult r;
  r.samples = samples;
  r.estimate = mean / detH;
  r.analytic = complexWickAnalytic(A, I, J);
  r.stdErr = std::sqrt((m2re + m2im) / (samples - 1) / samples) / detH;
  r.zscore = std::abs(r.estimate - r.analytic) / r.stdErr;
  return r;
}

}  // namespace bandlab
