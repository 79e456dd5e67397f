#include <doctest.h>

#include <cmath>

#include "bandlab/ensembles.hpp"
#include "bandlab/linalg.hpp"
#include "bandlab/rng.hpp"
#include "fixtures/calibration.hpp"

using namespace bandlab;

TEST_SUITE("ensembles") {

TEST_CASE("three-point law matches the Gaussian to fourth order exactly") {
  const auto g = EntryDistribution::gaussian();
  const auto t = EntryDistribution::fourMomentMatched(1.0);
  CHECK(t.prob == doctest::Approx(1.0 / 6.0));
  CHECK(t.atom() == doctest::Approx(std::sqrt(3.0)));
  const auto cmp = verifyMomentMatching(g, t);
  CHECK(cmp.size() == 14);
  double worst = 0;
  for (const auto& c : cmp) worst = std::max(worst, c.diff);
  CHECK(worst == 0.0);
  // Fourth moment of a part is 3 v^2.
  for (const auto& c : cmp)
    if (c.k == 4) CHECK(c.reference == 3.0);
  for (const auto& c : cmp)
    if (c.k == 2 && c.l == 2) CHECK(c.reference == 1.0);
}

TEST_CASE("moment comparison of a law with the wrong kurtosis is nonzero") {
  EntryDistribution bad{EnsembleKind::ThreePoint, 1.0, 2.0, 0.25};  // variance 1, E x^4 = 2
  const auto cmp = verifyMomentMatching(EntryDistribution::gaussian(), bad);
  double worst = 0;
  for (const auto& c : cmp) worst = std::max(worst, c.diff);
  CHECK(worst == doctest::Approx(1.0));
}

TEST_CASE("sample structure") {
  const auto p = VarianceProfile::fromEdges(3, {{0, 1, 0.2}, {1, 2, 0.2}});
  const int M = 8;
  for (auto kind : {EnsembleKind::Gaussian, EnsembleKind::ThreePoint}) {
    const auto s = sampleBlockBand(p, M, EntryDistribution::of(kind), 99);
    CHECK(s.N == 24);
    CHECK(maxNorm(s.H - s.H.adjoint()) == 0);
    for (Index a = 0; a < s.N; ++a) CHECK(s.H(a, a).imag() == 0);
    // Blocks 0 and 2 are not coupled.
    CHECK(maxNorm(s.H.block(0, 16, 8, 8)) == 0);
    CHECK(maxNorm(s.H.block(0, 8, 8, 8)) > 0);
  }
}

TEST_CASE("three-point entries take three values per part") {
  const auto p = VarianceProfile::fromEdges(2, {{0, 1, 0.2}});
  const int M = 16;
  const auto s = sampleBlockBand(p, M, EntryDistribution::fourMomentMatched(), 3);
  const RealMatrix St = p.varianceMatrix();
  for (Index a = 0; a < s.N; ++a)
    for (Index b = a + 1; b < s.N; ++b) {
      const double scale = std::sqrt(3.0 * St(a / M, b / M) / (2.0 * M));
      for (double x : {s.H(a, b).real(), s.H(a, b).imag()})
        CHECK((x == 0 || std::abs(std::abs(x) - scale) < 1e-15));
    }
}

TEST_CASE("parallel fill is bit-identical to serial fill") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const auto a = sampleBlockBand(p, 16, EntryDistribution::gaussian(), 1234, 1);
  const auto b = sampleBlockBand(p, 16, EntryDistribution::gaussian(), 1234, 4);
  CHECK(a.H == b.H);
  const auto c = sampleBlockBand(p, 16, EntryDistribution::gaussian(), 1235, 1);
  CHECK_FALSE(a.H == c.H);
}

TEST_CASE("single-entry variances") {
  const auto p = VarianceProfile::fromEdges(2, {{0, 1, 0.2}});
  const RealMatrix St = p.varianceMatrix();
  const int M = 10, T = 100000;
  for (auto kind : {EnsembleKind::Gaussian, EnsembleKind::ThreePoint}) {
    const auto dist = EntryDistribution::of(kind);
    struct Pos { Index a, b; };
    for (Pos pos : {Pos{2, 5}, Pos{3, 14}, Pos{4, 4}}) {
      double sre = 0, sim = 0, s4 = 0;
      for (int t = 0; t < T; ++t) {
        const Complex h = sampleEntry(St, M, dist, std::uint64_t(t) * 7919 + 1, pos.a, pos.b);
        sre += h.real() * h.real();
        sim += h.imag() * h.imag();
        s4 += std::norm(h) * std::norm(h);
      }
      const double target = St(pos.a / M, pos.b / M) / M;
      const double mean = (sre + sim) / T;
      // |h|^2 has standard deviation target (complex) or sqrt(2) target (real).
      CHECK(std::abs(mean - target) <= 4 * std::sqrt(2.0) * target / std::sqrt(double(T)));
      if (pos.a != pos.b) {
        CHECK(sre / T == doctest::Approx(target / 2).epsilon(0.03));
        CHECK(sim / T == doctest::Approx(target / 2).epsilon(0.03));
        CHECK(s4 / T == doctest::Approx(2 * target * target).epsilon(0.05));
      } else {
        CHECK(sim == 0);
      }
    }
  }
}

TEST_CASE("empirical covariance over many positions") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const RealMatrix St = p.varianceMatrix();
  const int M = 8, N = 32, T = 4000;
  StreamRng pick(17);
  int ok = 0;
  for (int k = 0; k < 100; ++k) {
    Index a = Index(pick.below(N)), b = Index(pick.below(N));
    if (a > b) std::swap(a, b);
    const double target = St(a / M, b / M) / M;
    double s = 0, s2 = 0;
    for (int t = 0; t < T; ++t) {
      const double x = std::norm(sampleEntry(St, M, EntryDistribution::gaussian(),
                                             deriveSeed(5, t), a, b));
      s += x;
      s2 += x * x;
    }
    const double mean = s / T;
    const double se = std::sqrt(std::max(s2 / T - mean * mean, 0.0) / T);
    ok += std::abs(mean - target) <= 4 * se + 1e-300;
  }
  CHECK(ok >= 99);
}

TEST_CASE("entries are of order M^{-1/2}") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const int M = 64;
  const auto s = sampleBlockBand(p, M, EntryDistribution::gaussian(), 8);
  const double stat = maxNorm(s.H) * std::sqrt(double(M));
  CHECK(stat <= calibration::kEntryMaxConstant * std::log(double(s.N)));
}

TEST_CASE("ensemble names") {
  CHECK((parseEnsemble("gaussian") == EnsembleKind::Gaussian));
  CHECK((parseEnsemble("three-point") == EnsembleKind::ThreePoint));
  CHECK((toString(EnsembleKind::ThreePoint) == "three-point"));
  CHECK_THROWS_AS(parseEnsemble("cauchy"), InvalidArgument);
}

}
