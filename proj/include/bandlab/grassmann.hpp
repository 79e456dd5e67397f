#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "bandlab/types.hpp"

namespace bandlab {

// Element of the Grassmann algebra on 2k generators psi_1, bar psi_1, ...,
// psi_k, bar psi_k. Generator 2a is psi_{a+1}, generator 2a+1 is
// bar psi_{a+1}. Coefficients are indexed by generator bitmask; a mask denotes
// the monomial with generators in increasing index order.
template <class Scalar>
class GrassmannElement {
 public:
  static constexpr int kMaxPairs = 8;

  explicit GrassmannElement(int k) : k_(k) {
    require(k >= 0 && k <= kMaxPairs, "grassmann: generator pair count must lie in [0, 8]");
    coeffs_.assign(std::size_t(1) << (2 * k), Scalar(0));
  }

  static GrassmannElement scalar(int k, Scalar c) {
    GrassmannElement e(k);
    e.coeffs_[0] = c;
    return e;
  }
  static GrassmannElement psi(int k, int a) { return generator(k, 2 * a); }
  static GrassmannElement psiBar(int k, int a) { return generator(k, 2 * a + 1); }

  int pairs() const { return k_; }
  std::size_t size() const { return coeffs_.size(); }
  const Scalar& operator[](std::uint32_t mask) const { return coeffs_[mask]; }
  Scalar& operator[](std::uint32_t mask) { return coeffs_[mask]; }
  std::uint32_t topMask() const { return std::uint32_t(coeffs_.size() - 1); }

  // Sign of the product of monomials x and y reordered into canonical form;
  // 0 if they share a generator.
  static int productSign(std::uint32_t x, std::uint32_t y) {
    if (x & y) return 0;
    int swaps = 0;
    for (std::uint32_t rest = y; rest; rest &= rest - 1) {
      const int g = std::countr_zero(rest);
      swaps += std::popcount(x >> (g + 1));
    }
    return swaps % 2 ? -1 : 1;
  }

  GrassmannElement& operator+=(const GrassmannElement& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  GrassmannElement& operator-=(const GrassmannElement& o) {
    check(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  GrassmannElement& operator*=(const Scalar& c) {
    for (auto& x : coeffs_) x *= c;
    return *this;
  }

  friend GrassmannElement operator+(GrassmannElement x, const GrassmannElement& y) { return x += y; }
  friend GrassmannElement operator-(GrassmannElement x, const GrassmannElement& y) { return x -= y; }
  friend GrassmannElement operator*(GrassmannElement x, const Scalar& c) { return x *= c; }
  friend GrassmannElement operator*(const Scalar& c, GrassmannElement x) { return x *= c; }

  friend GrassmannElement operator*(const GrassmannElement& x, const GrassmannElement& y) {
    x.check(y);
    GrassmannElement out(x.k_);
    const auto xs = x.support();
    const auto ys = y.support();
    for (std::uint32_t a : xs)
      for (std::uint32_t b : ys) {
        const int s = productSign(a, b);
        if (s == 0) continue;
        const Scalar p = x.coeffs_[a] * y.coeffs_[b];
        if (s > 0)
          out.coeffs_[a | b] += p;
        else
          out.coeffs_[a | b] -= p;
      }
    return out;
  }

  friend bool operator==(const GrassmannElement& x, const GrassmannElement& y) {
    return x.k_ == y.k_ && x.coeffs_ == y.coeffs_;
  }

  std::vector<std::uint32_t> support() const {
    std::vector<std::uint32_t> s;
    for (std::uint32_t m = 0; m < coeffs_.size(); ++m)
      if (coeffs_[m] != Scalar(0)) s.push_back(m);
    return s;
  }

 private:
  static GrassmannElement generator(int k, int g) {
    require(g >= 0 && g < 2 * k, "grassmann: generator index out of range");
    GrassmannElement e(k);
    e.coeffs_[std::size_t(1) << g] = Scalar(1);
    return e;
  }
  void check(const GrassmannElement& o) const {
    require(k_ == o.k_, "grassmann: mismatched generator counts");
  }

  int k_;
  std::vector<Scalar> coeffs_;
};

// exp{-psi^* B psi} = prod_{i,j} (1 - B_ij bar psi_i psi_j); the factors are
// even and square to zero, so the product is exact.
template <class Scalar>
GrassmannElement<Scalar> expQuadratic(const Matrix<Scalar>& B) {
  require(B.rows() == B.cols(), "exp_quadratic: B must be square");
  const int k = int(B.rows());
  using G = GrassmannElement<Scalar>;
  G out = G::scalar(k, Scalar(1));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (B(i, j) == Scalar(0)) continue;
      out = out * (G::scalar(k, Scalar(1)) - G::psiBar(k, i) * G::psi(k, j) * B(i, j));
    }
  return out;
}

// Berezin integral against prod_a d bar psi_a d psi_a, normalized so that
// the integral of exp{-psi^* B psi} is det B: the coefficient of
// psi_1 bar psi_1 ... psi_k bar psi_k.
template <class Scalar>
Scalar berezinIntegrate(const GrassmannElement<Scalar>& x) {
  return x[x.topMask()];
}

// Exact determinant of an integer matrix by fraction-free elimination.
std::int64_t bareissDeterminant(const Matrix<std::int64_t>& A);

struct WickCheck {
  Complex lhs, rhs;
  bool equal = false;
  bool degenerate = false;  // repeated index in I or J
};

// lhs = int exp{-psi^* B psi} prod_b bar psi_{i_b} psi_{j_b};
// rhs = (-1)^{l + sum(i_b + j_b)} det B^{(I|J)}, times the signs of the
// permutations sorting I and J when these are not increasing. Indices are
// 0-based; the parity of the sum is unchanged from 1-based labels.
WickCheck wickDeterminantCheck(const Matrix<std::int64_t>& B, const std::vector<int>& I,
                               const std::vector<int>& J);
WickCheck wickDeterminantCheck(const ComplexMatrix& B, const std::vector<int>& I,
                               const std::vector<int>& J);

struct ComplexWickResult {
  Complex estimate;
  Complex analytic;
  double stdErr = 0;
  double zscore = 0;
  int samples = 0;
};

// Monte Carlo estimate of
//   int exp{-phi^* A phi} prod_b bar phi_{i_b} phi_{j_b} prod_a dRe dIm phi_a / pi
// against (1/det A) sum_sigma prod_b (A^{-1})_{j_b, i_sigma(b)}.
ComplexWickResult complexWickCheck(const ComplexMatrix& A, const std::vector<int>& I,
                                   const std::vector<int>& J, int samples,
                                   std::uint64_t seed);

Complex complexWickAnalytic(const ComplexMatrix& A, const std::vector<int>& I,
                            const std::vector<int>& J);

}  // namespace bandlab
