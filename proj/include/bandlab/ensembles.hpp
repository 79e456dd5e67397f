#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bandlab/graph_profile.hpp"
#include "bandlab/types.hpp"

namespace bandlab {

enum class EnsembleKind { Gaussian, ThreePoint };

std::string toString(EnsembleKind k);
EnsembleKind parseEnsemble(const std::string& name);

// Law of the real and imaginary parts of an entry, stated for a part of
// variance `variance`; entries with other variances are rescaled.
struct EntryDistribution {
  EnsembleKind kind = EnsembleKind::Gaussian;
  double variance = 1.0;
  double atomSq = 0;  // three-point only: support {-a, 0, +a}, a^2 = atomSq
  double prob = 0;    // three-point only: P(+a) = P(-a)

  static EntryDistribution gaussian() { return {}; }
  // Three-point law whose moments up to order four match a centred
  // Gaussian of variance v.
  static EntryDistribution fourMomentMatched(double v = 1.0);
  static EntryDistribution of(EnsembleKind k);

  double atom() const;
  // E[X^k] for a single part of variance `variance`.
  double moment(int k) const;
};

struct BlockBandSample {
  int N = 0, M = 0, W = 0;
  ComplexMatrix H;
  EntryDistribution dist;
  std::uint64_t seed = 0;
  std::string profileId;
};

// Entry (a, b) with a <= b of the sample keyed by `seed`. Depends only on
// (seed, a, b), never on evaluation order.
Complex sampleEntry(const RealMatrix& varianceMatrix, int M, const EntryDistribution& dist,
                    std::uint64_t seed, Index a, Index b);

BlockBandSample sampleBlockBand(const VarianceProfile& p, int M, const EntryDistribution& dist,
                                std::uint64_t seed, int parallelism = 1);

struct MomentComparison {
  int k = 0, l = 0;
  double reference = 0;  // E[Re^k Im^l] under the Gaussian law
  double matched = 0;
  double diff = 0;
};

// Mixed moments E[(Re h)^k (Im h)^l], k + l <= 4, (k, l) != (0, 0).
std::vector<MomentComparison> verifyMomentMatching(const EntryDistribution& reference,
                                                   const EntryDistribution& candidate);

}  // namespace bandlab
