#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bandlab/ensembles.hpp"
#include "bandlab/spectral.hpp"

namespace bandlab {

struct OrderingPolicy {
  enum Kind { RowMajor, SeededShuffle } kind = RowMajor;
  std::uint64_t seed = 0;
  static OrderingPolicy rowMajor() { return {}; }
  static OrderingPolicy shuffled(std::uint64_t seed) { return {SeededShuffle, seed}; }
};

struct SwapSchedule {
  int N = 0;
  // positions[k] = (i, j), i <= j, is the position swapped at step k + 1.
  std::vector<std::pair<int, int>> positions;
  std::vector<std::size_t> stepOf;  // stepOf[i * N + j] for i <= j, 1-based
  std::optional<std::vector<std::size_t>> subset;  // steps actually performed

  std::size_t size() const { return positions.size(); }  // N (N + 1) / 2
  std::size_t step(int i, int j) const;
};

SwapSchedule orderingMap(int N, const OrderingPolicy& policy);
// Keeps `count` steps chosen uniformly without replacement, in step order.
void selectSubset(SwapSchedule& s, std::size_t count, std::uint64_t seed);

// Resolvent of H at z, kept in sync with H under single-position updates.
struct ResolventState {
  ComplexMatrix H;
  ComplexMatrix G;
  Complex z;
  int recomputations = 0;  // fallbacks taken by swapStep

  static ResolventState fromMatrix(ComplexMatrix H, Complex z);
};

// Sets H(a, b) = value (and H(b, a) = conj(value)) and updates G by a rank-2
// (rank-1 on the diagonal) Woodbury step. Falls back to a fresh inverse when
// the capacitance matrix is near singular.
void swapStep(ResolventState& state, int a, int b, Complex value);

// Perturbation V = value e_a e_b^T + conj(value) e_b e_a^T (only the first
// term when a = b).
struct Perturbation {
  int a = 0, b = 0;
  Complex value;
};

struct ExpansionEntry {
  int i = 0, j = 0;
  std::vector<Complex> terms;       // terms[l-1] = (-1)^l ((G0 V)^l G0)_ij, l = 1..m
  std::vector<Complex> remainders;  // remainders[l] = G_ij - G0_ij - sum_{l' <= l} terms, l = 0..m
  Complex exact;                    // G_ij for H0 + V
  Complex closedRemainder;          // (-1)^{m+1} ((G0 V)^{m+1} G)_ij
};

// G0 is the resolvent of H0; G is the resolvent of H0 + V, taken by a
// low-rank update of G0.
std::vector<ExpansionEntry> expansionTerms(const ComplexMatrix& G0, const Perturbation& V, int m,
                                           const std::vector<std::pair<int, int>>& entries);

struct DecayReport {
  int M = 0, N = 0, trials = 0;
  Complex z;
  std::string ensemble;
  std::vector<double> medianRemainder;  // per m = 0..mMax
  std::vector<double> medianRatio;      // per m = 1..mMax: |R_m| / |R_{m-1}|, median over trials
  double slope = 0;  // least-squares slope of log median remainder vs m, m >= 1
};

// Each trial samples H, picks an off-diagonal position (a, b) within one
// diagonal block, zeroes it to form H0, and redraws it from `dist`. Entries
// (i, j) are taken off {a, b}.
DecayReport remainderDecayProbe(const VarianceProfile& p, int M, const EntryDistribution& dist,
                                Complex z, int mMax, int trials, std::uint64_t seed,
                                int parallelism = 1);

struct MomentPair {
  int a = 0, b = 0;
  Complex z;
};

struct MomentEstimate {
  MomentPair pair;
  double meanReference = 0, seReference = 0;  // Gaussian arm
  double meanCandidate = 0, seCandidate = 0;  // matched arm
  double diff = 0, combinedSe = 0, zscore = 0;
};

struct CompareReport {
  int N = 0, M = 0, n = 1, trials = 0;
  std::vector<MomentEstimate> estimates;
};

// E|G_ab(z)|^{2n} under the Gaussian ensemble and under `candidate`, from
// independent samples in the two arms.
CompareReport twoEnsembleMomentCompare(const VarianceProfile& p, int M,
                                       const EntryDistribution& candidate,
                                       const std::vector<MomentPair>& pairs, int n, int trials,
                                       std::uint64_t seed, int parallelism = 1,
                                       const EntryDistribution& reference = EntryDistribution::gaussian());

}  // namespace bandlab
