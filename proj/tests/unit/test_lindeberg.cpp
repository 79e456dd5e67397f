#include <doctest.h>

#include <cmath>
#include <set>

#include "bandlab/lindeberg.hpp"
#include "bandlab/linalg.hpp"
#include "unit/helpers.hpp"

using namespace bandlab;
using testing::directResolvent;
using testing::randomHermitian;

TEST_SUITE("lindeberg") {

TEST_CASE("row-major ordering") {
  const auto s = orderingMap(2, OrderingPolicy::rowMajor());
  CHECK(s.size() == 3);
  CHECK(s.step(0, 0) == 1);
  CHECK(s.step(0, 1) == 2);
  CHECK(s.step(1, 0) == 2);
  CHECK(s.step(1, 1) == 3);
  CHECK_THROWS_AS(s.step(0, 2), InvalidArgument);
  CHECK(orderingMap(1, OrderingPolicy::rowMajor()).size() == 1);
}

TEST_CASE("shuffled ordering is a reproducible bijection") {
  const int N = 12;
  const auto s = orderingMap(N, OrderingPolicy::shuffled(4));
  const auto t = orderingMap(N, OrderingPolicy::shuffled(4));
  const auto u = orderingMap(N, OrderingPolicy::shuffled(5));
  CHECK(s.size() == std::size_t(N * (N + 1) / 2));
  CHECK(s.positions == t.positions);
  CHECK(s.positions != u.positions);
  std::set<std::size_t> steps;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const std::size_t k = s.step(i, j);
      CHECK(s.positions[k - 1] == std::make_pair(i, j));
      steps.insert(k);
    }
  CHECK(steps.size() == s.size());
  CHECK(*steps.begin() == 1);
  CHECK(*steps.rbegin() == s.size());
}

TEST_CASE("subset selection") {
  auto s = orderingMap(10, OrderingPolicy::rowMajor());
  selectSubset(s, 7, 3);
  REQUIRE(s.subset);
  CHECK(s.subset->size() == 7);
  CHECK(std::is_sorted(s.subset->begin(), s.subset->end()));
  CHECK(std::set<std::size_t>(s.subset->begin(), s.subset->end()).size() == 7);
  auto s2 = orderingMap(10, OrderingPolicy::rowMajor());
  selectSubset(s2, 7, 3);
  CHECK(*s.subset == *s2.subset);
  CHECK_THROWS_AS(selectSubset(s, 100, 1), InvalidArgument);
}

TEST_CASE("swap step tracks the resolvent") {
  const Complex z(0.2, 0.05);
  auto st = ResolventState::fromMatrix(randomHermitian(40, 2), z);

  SUBCASE("writing the same value is a bitwise no-op") {
    const ComplexMatrix before = st.G;
    swapStep(st, 3, 7, st.H(3, 7));
    CHECK(st.G == before);
  }
  SUBCASE("off-diagonal update") {
    swapStep(st, 3, 7, Complex(0.3, -0.1));
    CHECK(st.H(7, 3) == Complex(0.3, 0.1));
    const ComplexMatrix G = directResolvent(st.H, z);
    CHECK(maxNorm(st.G - G) < 1e-10 * maxNorm(G));
  }
  SUBCASE("diagonal update") {
    swapStep(st, 5, 5, Complex(-0.4, 0));
    const ComplexMatrix G = directResolvent(st.H, z);
    CHECK(maxNorm(st.G - G) < 1e-10 * maxNorm(G));
    CHECK_THROWS_AS(swapStep(st, 5, 5, Complex(0, 1)), InvalidArgument);
  }
  SUBCASE("long chain of swaps") {
    StreamRng rng(9);
    for (int k = 0; k < 50; ++k) {
      int a = int(rng.below(40)), b = int(rng.below(40));
      const Complex v = a == b ? Complex(rng.normal() * 0.2, 0)
                               : Complex(rng.normal(), rng.normal()) * 0.15;
      swapStep(st, a, b, v);
    }
    const ComplexMatrix G = directResolvent(st.H, z);
    CHECK(maxNorm(st.G - G) < 1e-8 * maxNorm(G));
    CHECK(maxNorm(st.H - st.H.adjoint()) == 0);
  }
}

TEST_CASE("expansion terms") {
  const int N = 32;
  const Complex z(0.1, 0.3);
  const ComplexMatrix H0 = randomHermitian(N, 13);
  const ComplexMatrix G0 = directResolvent(H0, z);
  const std::vector<std::pair<int, int>> entries{{0, 1}, {4, 4}, {9, 20}, {2, 5}};

  SUBCASE("zero perturbation") {
    const auto e = expansionTerms(G0, {2, 5, 0}, 3, entries);
    for (const auto& x : e) {
      CHECK(x.exact == G0(x.i, x.j));
      for (auto t : x.terms) CHECK(t == Complex(0));
      for (auto r : x.remainders) CHECK(r == Complex(0));
    }
  }
  for (Perturbation V : {Perturbation{2, 5, Complex(0.2, 0.1)}, Perturbation{6, 6, Complex(0.3, 0)}}) {
    ComplexMatrix Vm = ComplexMatrix::Zero(N, N);
    Vm(V.a, V.b) = V.value;
    Vm(V.b, V.a) = std::conj(V.value);
    const ComplexMatrix G = directResolvent(H0 + Vm, z);
    const ComplexMatrix G0V = G0 * Vm;
    const int m = 6;
    const auto e = expansionTerms(G0, V, m, entries);
    for (const auto& x : e) {
      const double scale = std::abs(G(x.i, x.j)) + 1;
      CHECK(std::abs(x.exact - G(x.i, x.j)) < 1e-10 * scale);
      // Terms by dense matrix powers.
      ComplexMatrix P = G0;
      for (int l = 1; l <= m; ++l) {
        P = G0V * P;
        const Complex expect = (l % 2 ? -1.0 : 1.0) * P(x.i, x.j);
        CHECK(std::abs(x.terms[l - 1] - expect) < 1e-10 * scale);
      }
      // Telescoping remainders and the closed form.
      CHECK(std::abs(x.remainders[0] - (G(x.i, x.j) - G0(x.i, x.j))) < 1e-10 * scale);
      for (int l = 1; l <= m; ++l)
        CHECK(std::abs(x.remainders[l - 1] - x.terms[l - 1] - x.remainders[l]) < 1e-12 * scale);
      CHECK(std::abs(x.remainders[m] - x.closedRemainder) < 1e-10 * scale);
      // |R_m| <= ||G0 V||^{m+1} ||G|| in operator norm.
      const double opGV = G0V.jacobiSvd().singularValues()(0);
      const double opG = G.jacobiSvd().singularValues()(0);
      CHECK(std::abs(x.remainders[m]) <= std::pow(opGV, m + 1) * opG * (1 + 1e-9));
    }
  }
  CHECK_THROWS_AS(expansionTerms(G0, {0, 1, 1.0}, 9, entries), InvalidArgument);
}

TEST_CASE("decay probe is reproducible") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const auto a = remainderDecayProbe(p, 16, EntryDistribution::gaussian(), Complex(0, 0.1), 3, 6, 5, 1);
  const auto b = remainderDecayProbe(p, 16, EntryDistribution::gaussian(), Complex(0, 0.1), 3, 6, 5, 3);
  CHECK(a.medianRemainder.size() == 4);
  CHECK(a.medianRatio.size() == 3);
  CHECK(a.medianRemainder == b.medianRemainder);
  CHECK(a.slope < 0);
  for (std::size_t m = 1; m < a.medianRemainder.size(); ++m)
    CHECK(a.medianRemainder[m] < a.medianRemainder[m - 1]);
}

TEST_CASE("moment comparison of an ensemble with itself") {
  const auto p = VarianceProfile::torus(1, 4, 0.2);
  const std::vector<MomentPair> pairs{{0, 1, Complex(0, 0.2)}, {5, 5, Complex(0.3, 0.2)}};
  const auto r = twoEnsembleMomentCompare(p, 8, EntryDistribution::gaussian(), pairs, 1, 200, 3);
  CHECK(r.estimates.size() == 2);
  for (const auto& e : r.estimates) {
    CHECK(e.meanReference > 0);
    CHECK(e.combinedSe == doctest::Approx(std::hypot(e.seReference, e.seCandidate)));
    CHECK(std::abs(e.zscore) < 4);
  }
  const auto r2 = twoEnsembleMomentCompare(p, 8, EntryDistribution::gaussian(), pairs, 1, 200, 3, 4);
  CHECK(r2.estimates[0].meanCandidate == r.estimates[0].meanCandidate);
  CHECK_THROWS_AS(twoEnsembleMomentCompare(p, 8, EntryDistribution::gaussian(), pairs, 3, 10, 1),
                  InvalidArgument);
}

}
