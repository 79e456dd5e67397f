#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bandlab/rng.hpp"
#include "bandlab/saddle.hpp"

using namespace bandlab;

namespace {

const Complex kI(0, 1);

Eigen::Matrix2cd tMatrix(const ContourPoint& pt, int j) {
  const double t = pt.t(j), s = std::sqrt(1 + t * t);
  Eigen::Matrix2cd T;
  T << s, t * std::polar(1.0, pt.sigma(j)), t * std::polar(1.0, -pt.sigma(j)), s;
  return T;
}

Eigen::Matrix2cd vMatrix(const ContourPoint& pt, int j) {
  const double v = pt.v(j), u = std::sqrt(1 - v * v);
  Eigen::Matrix2cd V;
  V << u, v * std::polar(1.0, pt.theta(j)), -v * std::polar(1.0, -pt.theta(j)), u;
  return V;
}

// L and K from the 2x2 matrix forms, summing over both orderings of j, k.
Complex lByTrace(const ContourPoint& pt, const RealMatrix& S, double E) {
  const int W = int(S.rows());
  std::vector<Eigen::Matrix2cd> B(W);
  Complex sum = 0;
  for (int j = 0; j < W; ++j) {
    const Eigen::Matrix2cd hat = Eigen::Vector2cd(pt.b1(j), -pt.b2(j)).asDiagonal();
    const Eigen::Matrix2cd T = tMatrix(pt, j);
    B[j] = T.inverse() * hat * T;
    sum += 0.5 * (hat * hat).trace() - kI * E * hat.trace() - std::log(pt.b1(j)) -
           std::log(-pt.b2(j));
  }
  for (int j = 0; j < W; ++j)
    for (int k = 0; k < W; ++k) {
      const Eigen::Matrix2cd d = B[j] - B[k];
      sum -= S(j, k) * (d * d).trace() / 4.0;
    }
  return sum;
}

Complex kByTrace(const ContourPoint& pt, const RealMatrix& S, double E) {
  const int W = int(S.rows());
  std::vector<Eigen::Matrix2cd> X(W);
  Complex sum = 0;
  for (int j = 0; j < W; ++j) {
    const Eigen::Matrix2cd hat = Eigen::Vector2cd(pt.x1(j), pt.x2(j)).asDiagonal();
    const Eigen::Matrix2cd V = vMatrix(pt, j);
    X[j] = V.adjoint() * hat * V;
    sum -= 0.5 * (hat * hat).trace() - kI * E * hat.trace() - std::log(pt.x1(j)) -
           std::log(pt.x2(j));
  }
  for (int j = 0; j < W; ++j)
    for (int k = 0; k < W; ++k) {
      const Eigen::Matrix2cd d = X[j] - X[k];
      sum += S(j, k) * (d * d).trace() / 4.0;
    }
  return sum;
}

ContourPoint blankPoint(int W) {
  ContourPoint pt;
  pt.b1 = pt.b2 = pt.x1 = pt.x2 = ComplexVector::Zero(W);
  pt.t = pt.sigma = pt.v = pt.theta = RealVector::Zero(W);
  return pt;
}

ContourPoint randomPoint(const SaddleContext& ctx, StreamRng& rng) {
  const int W = ctx.blocks();
  ContourPoint pt = blankPoint(W);
  for (int j = 0; j < W; ++j) {
    pt.b1(j) = ctx.aPlus * rng.uniform(0.2, 3.0);
    pt.b2(j) = -ctx.aMinus * rng.uniform(0.2, 3.0);
    pt.x1(j) = std::polar(1.0, rng.uniform(0.0, 6.3));
    pt.x2(j) = std::polar(1.0, rng.uniform(0.0, 6.3));
    if (j > 0) {
      pt.t(j) = rng.uniform(0.0, 2.0);
      pt.sigma(j) = rng.uniform(0.0, 6.3);
      pt.v(j) = rng.uniform();
      pt.theta(j) = rng.uniform(0.0, 6.3);
    }
  }
  return pt;
}

std::vector<VarianceProfile> profiles() {
  return {VarianceProfile::torus(1, 4, 0.2), VarianceProfile::fromEdges(2, {{0, 1, 0.2}}),
          VarianceProfile::fromEdges(3, {{0, 1, 0.05}, {1, 2, 0.3}, {0, 2, 0.1}}),
          VarianceProfile::fromEdges(1, {})};
}

}  // namespace

TEST_SUITE("saddle") {

TEST_CASE("context") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  for (double E : {0.0, 0.5, -1.1}) {
    const auto c = makeContext(E, p);
    CHECK(std::abs(c.aPlus * c.aMinus + 1.0) < 1e-14);
    CHECK(std::abs(c.aPlus) == doctest::Approx(1.0));
    CHECK(std::abs(c.aPlus + c.aMinus - kI * E) < 1e-14);
    CHECK(c.Dpm(0, 0) == c.aPlus);
    CHECK(c.Dpm(1, 1) == c.aMinus);
    CHECK(c.c0 == doctest::Approx(p.c0()));
    CHECK(std::abs(kkPrime(c.aPlus, E)) < 1e-14);
    CHECK(std::abs(kkPrime(c.aMinus, E)) < 1e-14);
  }
  CHECK_THROWS_AS(makeContext(1.2, p), InvalidArgument);
}

TEST_CASE("ell and its gradient") {
  const auto p = VarianceProfile::fromEdges(3, {{0, 1, 0.05}, {1, 2, 0.3}, {0, 2, 0.1}});
  const RealMatrix& S = p.laplacian();
  const double E = 0.4;
  ComplexVector a(3);
  a << Complex(0.9, 0.3), Complex(1.2, -0.1), Complex(0.5, 0.8);
  // Direct expansion for W = 3.
  Complex expect = 0;
  for (int j = 0; j < 3; ++j) {
    expect += a(j) * a(j) / 2.0 - kI * E * a(j) - std::log(a(j));
    for (int k = 0; k < 3; ++k) expect -= S(j, k) * std::pow(a(j) - a(k), 2) / 4.0;
  }
  CHECK(std::abs(ell(a, S, E) - expect) < 1e-14);
  // Constant vectors see only kk.
  const ComplexVector c = ComplexVector::Constant(3, Complex(0.7, 0.2));
  CHECK(std::abs(ell(c, S, E) - 3.0 * kk(c(0), E)) < 1e-14);
  // Holomorphic gradient by Richardson-extrapolated central differences.
  const ComplexVector g = ellGradient(a, S, E);
  for (int j = 0; j < 3; ++j) {
    auto diff = [&](double h) {
      ComplexVector up = a, dn = a;
      up(j) += h;
      dn(j) -= h;
      return (ell(up, S, E) - ell(dn, S, E)) / (2 * h);
    };
    const Complex fd = (4.0 * diff(1e-4) - diff(2e-4)) / 3.0;
    CHECK(std::abs(fd - g(j)) < 1e-9);
  }
  // The constant saddle a_+ is a critical point of ell.
  const auto ctx = makeContext(E, p);
  CHECK(ellGradient(ComplexVector::Constant(3, ctx.aPlus), S, E).norm() < 1e-14);
}

TEST_CASE("radial part of Re ell") {
  for (const auto& p : profiles()) {
    const RealMatrix& S = p.laplacian();
    const int W = p.blocks();
    for (double E : {0.0, 0.9}) {
      const auto ctx = makeContext(E, p);
      StreamRng rng(2);
      RealVector r(W);
      for (int j = 0; j < W; ++j) r(j) = rng.uniform(0.1, 3.0);
      const ComplexVector b = ctx.aPlus * r.cast<Complex>();
      const double lhs = (ell(b, S, E) - ell(ComplexVector::Constant(W, ctx.aPlus), S, E)).real();
      double spread = 0, dev = 0, logs = 0;
      for (int j = 0; j < W; ++j) {
        dev += std::pow(r(j) - 1, 2);
        logs += r(j) - std::log(r(j)) - 1;
        for (int k = 0; k < W; ++k) spread += S(j, k) * std::pow(r(j) - r(k), 2);
      }
      const double rhs = (E * E - 2) / 4 * (spread / 2 - dev) + logs;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("functionals agree with the matrix forms") {
  for (const auto& p : profiles()) {
    const auto ctx = makeContext(0.3, p);
    StreamRng rng(5);
    for (int s = 0; s < 20; ++s) {
      const auto pt = randomPoint(ctx, rng);
      const Complex L = lFunctional(pt, ctx), Lt = lByTrace(pt, ctx.S, ctx.E);
      const Complex K = kFunctional(pt, ctx), Kt = kByTrace(pt, ctx.S, ctx.E);
      CHECK(std::abs(L - Lt) < 1e-10 * std::max(1.0, std::abs(L)));
      CHECK(std::abs(K - Kt) < 1e-10 * std::max(1.0, std::abs(K)));
      for (int j = 0; j < p.blocks(); ++j)
        for (int k = 0; k < p.blocks(); ++k) {
          const Eigen::Matrix2cd TT = tMatrix(pt, k) * tMatrix(pt, j).inverse();
          const Eigen::Matrix2cd VV = vMatrix(pt, k) * vMatrix(pt, j).adjoint();
          CHECK(std::abs(tCross(pt, j, k) - TT(0, 1)) < 1e-12 * (1 + std::abs(TT(0, 1))));
          CHECK(std::abs(vCross(pt, j, k) - VV(0, 1)) < 1e-12);
        }
    }
  }
}

TEST_CASE("values at the saddle points") {
  for (const auto& p : profiles()) {
    const auto ctx = makeContext(-0.6, p);
    const auto pm = saddlePoint(ctx, SaddleType::Dpm);
    CHECK(std::abs(ellSB(pm, ctx.S)) < 1e-15);
    CHECK(std::abs(ellSX(pm, ctx.S)) < 1e-15);
    CHECK(std::abs(lFunctional(pm, ctx) - lSaddle(ctx)) < 1e-12);
    CHECK(std::abs(kFunctional(pm, ctx) - kSaddle(ctx)) < 1e-12);
    CHECK(std::abs(kSaddle(ctx) + lSaddle(ctx)) < 1e-14);
    const double ref = kSaddle(ctx).real();
    CHECK(kFunctional(saddlePoint(ctx, SaddleType::Dp), ctx).real() == doctest::Approx(ref));
    CHECK(kFunctional(saddlePoint(ctx, SaddleType::Dm), ctx).real() == doctest::Approx(ref));
  }
}

TEST_CASE("Re K on the unit circle") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const auto ctx = makeContext(0.5, p);
  const int W = 4;
  StreamRng rng(7);
  for (int s = 0; s < 50; ++s) {
    const auto pt = randomPoint(ctx, rng);
    const RealMatrix L = svMatrix(ctx.S, pt);
    RealVector th(2 * W);
    for (int j = 0; j < W; ++j) {
      th(j) = std::arg(pt.x1(j));
      th(W + j) = std::arg(pt.x2(j));
    }
    double cosPart = 0, sinPart = 0, dev = 0;
    for (int a = 0; a < 2 * W; ++a) {
      dev += std::pow(std::sin(th(a)) - ctx.E / 2, 2);
      for (int b = 0; b < 2 * W; ++b) {
        cosPart += L(a, b) * std::pow(std::cos(th(a)) - std::cos(th(b)), 2);
        sinPart += L(a, b) * std::pow(std::sin(th(a)) - std::sin(th(b)), 2);
      }
    }
    const double expect = cosPart / 4 - sinPart / 4 + dev;
    CHECK((kFunctional(pt, ctx) - kSaddle(ctx)).real() == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("S^v Laplacian") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const auto ctx = makeContext(0.0, p);
  ContourPoint pt = blankPoint(4);
  // V = I: S^v vanishes and the matrix is S (+) S.
  RealMatrix L = svMatrix(ctx.S, pt);
  CHECK((L.topLeftCorner(4, 4) - ctx.S).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(L.topRightCorner(4, 4).cwiseAbs().maxCoeff() == 0);
  // v_2 = 1 moves block 2's couplings across.
  pt.v(1) = 1;
  L = svMatrix(ctx.S, pt);
  CHECK(L(1, 4) == doctest::Approx(-ctx.S(1, 0) * -1));
  CHECK(L(1, 0) == doctest::Approx(0.0));
  CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
  const auto rep = svPositivityCheck(ctx, 2000, 3);
  CHECK(rep.pass);
  CHECK(rep.minEigen >= ctx.c0 - 1e-10);
}

TEST_CASE("lower bounds along the contours") {
  for (const auto& p : profiles()) {
    for (double E : {0.0, 1.0}) {
      const auto ctx = makeContext(E, p);
      const auto l = verifyLLowerBound(ctx, 5000, 1);
      CHECK(l.pass);
      CHECK(l.violations == 0);
      CHECK(l.minValue >= -1e-12);
      const auto k = verifyKLowerBound(ctx, 5000, 2);
      CHECK(k.bound.pass);
      CHECK(k.positive.pass);
      CHECK(k.saddlePass);
    }
  }
}

TEST_CASE("measure bound and sector constant") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  for (double E : {0.0, -1.1}) {
    const auto ctx = makeContext(E, p);
    const auto pm = saddlePoint(ctx);
    CHECK(sectorConstant(pm) == doctest::Approx((4 - E * E)));
    const auto rep = measureBoundCheck(ctx, 64, 3000, 4);
    CHECK(rep.pass);
    CHECK(rep.minSector >= 0);
  }
}

TEST_CASE("determinant ratios") {
  for (const auto& p : profiles()) {
    const auto ctx = makeContext(0.2, p);
    const auto rep = submatrixDetRatioCheck(ctx, 300, 6);
    CHECK(rep.pass);
    CHECK(rep.minSingularValue >= 1 - 1e-10);
  }
}

}
