#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bandlab/ensembles.hpp"
#include "bandlab/locallaw.hpp"
#include "bandlab/spectral.hpp"

namespace bandlab {

struct SupNorms {
  int bulkCount = 0;        // eigenvalues with |lambda| <= sqrt2 - kappa
  int degenerate = 0;       // bulk eigenvectors excluded for a gap < 1e-10
  double maxScaled = 0;     // max over kept bulk i of sqrt(N) ||u_i||_inf
  std::vector<double> scaled;  // kept bulk values, ascending eigenvalue order
};

SupNorms supNormsBulk(const SpectralDecomposition& d, double kappa = 0.3);

struct Histogram {
  double lo = 0, width = 0;
  std::vector<int> counts;  // last bin collects overflow
};

struct DelocReport {
  int N = 0, M = 0, W = 0;
  double kappa = 0.3;
  std::string ensemble;
  std::uint64_t seed = 0;
  bool exploratory = false;  // M below N^{6/7}
  std::vector<SupNorms> trials;
  Histogram histogram;
  std::vector<TrialFailure> failures;
};

DelocReport runDelocExperiment(const VarianceProfile& p, int M, const EntryDistribution& dist,
                               int trials, double kappa, std::uint64_t seed,
                               int parallelism = 1);

// |Im G_aa(z) - sum_i |u_ia|^2 eta / ((lambda_i - E)^2 + eta^2)| with the
// left side taken from the full resolvent matrix.
double spectralIdentityResidual(const SpectralDecomposition& d, Complex z, Index a);

struct DyadicReport {
  double lhs = 0;    // |G_ij(E + i eta)|
  double rhs = 0;    // max_l sum_{k>=0} Im G_ll(E + i 2^k eta)
  double ratio = 0;
  int ladderSteps = 0;
  bool monotone = true;  // y Im G_ll(E + iy) nondecreasing along the ladder
};

DyadicReport imGreenDyadicCheck(const SpectralDecomposition& d, double E, double eta,
                                double eta0, Index i, Index j);

}  // namespace bandlab
