#include "bandlab/ensembles.hpp"

#include <cmath>
#include <numbers>

#include "bandlab/parallel.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

std::string toString(EnsembleKind k) {
  return k == EnsembleKind::Gaussian ? "gaussian" : "three-point";
}

EnsembleKind parseEnsemble(const std::string& name) {
  if (name == "gaussian") return EnsembleKind::Gaussian;
  if (name == "three-point" || name == "three_point") return EnsembleKind::ThreePoint;
  throw InvalidArgument("unknown ensemble '" + name + "'");
}

EntryDistribution EntryDistribution::fourMomentMatched(double v) {
  require(v > 0, "four_moment_matched: variance must be positive");
  return {EnsembleKind::ThreePoint, v, 3.0 * v, 1.0 / 6.0};
}

EntryDistribution EntryDistribution::of(EnsembleKind k) {
  return k == EnsembleKind::Gaussian ? gaussian() : fourMomentMatched(1.0);
}

double EntryDistribution::atom() const { return std::sqrt(atomSq); }

double EntryDistribution::moment(int k) const {
  if (k == 0) return 1;
  if (k % 2 == 1) return 0;
  if (kind == EnsembleKind::ThreePoint) return 2 * prob * std::pow(atomSq, k / 2);
  double dfact = 1;  // (k-1)!!
  for (int m = k - 1; m > 1; m -= 2) dfact *= m;
  return dfact * std::pow(variance, k / 2);
}

namespace {

// Draw a part of unit variance from two uniforms; the second Gaussian of the
// Box-Muller pair is returned through `other`.
inline double gaussianPair(double u1, double u2, double& other) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  other = r * std::sin(th);
  return r * std::cos(th);
}

inline double threePoint(double u, double atom, double prob) {
  if (u < prob) return -atom;
  if (u > 1.0 - prob) return atom;
  return 0;
}

}  // namespace

Complex sampleEntry(const RealMatrix& St, int M, const EntryDistribution& dist,
                    std::uint64_t seed, Index a, Index b) {
  if (a > b) return std::conj(sampleEntry(St, M, dist, seed, b, a));
  const double s = St(a / M, b / M);
  if (s == 0) return 0;
  const CounterRng rng(seed);
  const auto u = rng.uniforms(std::uint32_t(a), std::uint32_t(b), 0);
  // Standardized parts of unit variance.
  double x, y;
  if (dist.kind == EnsembleKind::Gaussian) {
    x = gaussianPair(u[0], u[1], y);
  } else {
    const double unitAtom = std::sqrt(dist.atomSq / dist.variance);
    x = threePoint(u[0], unitAtom, dist.prob);
    y = threePoint(u[1], unitAtom, dist.prob);
  }
  if (a == b) return std::sqrt(s / M) * x;
  const double sd = std::sqrt(s / (2.0 * M));
  return {sd * x, sd * y};
}

BlockBandSample sampleBlockBand(const VarianceProfile& p, int M, const EntryDistribution& dist,
                                std::uint64_t seed, int parallelism) {
  require(M >= 1, "sample: M must be >= 1");
  BlockBandSample out;
  out.M = M;
  out.W = p.blocks();
  out.N = M * out.W;
  out.dist = dist;
  out.seed = seed;
  out.profileId = p.id();
  const RealMatrix St = p.varianceMatrix();
  const Index N = out.N;
  out.H.resize(N, N);
  parallelFor(N, parallelism, [&](std::size_t row) {
    const Index a = Index(row);
    for (Index b = a; b < N; ++b) out.H(a, b) = sampleEntry(St, M, dist, seed, a, b);
  });
  for (Index a = 0; a < N; ++a)
    for (Index b = 0; b < a; ++b) out.H(a, b) = std::conj(out.H(b, a));
  return out;
}

std::vector<MomentComparison> verifyMomentMatching(const EntryDistribution& reference,
                                                   const EntryDistribution& candidate) {
  std::vector<MomentComparison> out;
  // Both parts are independent with the same law, so mixed moments factor.
  auto scaled = [](const EntryDistribution& d, int k, double v) {
    return d.moment(k) * std::pow(v / d.variance, k / 2.0);
  };
  const double v = reference.variance;
  for (int total = 1; total <= 4; ++total)
    for (int k = total; k >= 0; --k) {
      const int l = total - k;
      MomentComparison c{k, l, scaled(reference, k, v) * scaled(reference, l, v),
                         scaled(candidate, k, v) * scaled(candidate, l, v), 0};
      c.diff = std::abs(c.reference - c.matched);
      out.push_back(c);
    }
  return out;
}

}  // namespace bandlab
