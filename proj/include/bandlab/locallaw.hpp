#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bandlab/ensembles.hpp"
#include "bandlab/spectral.hpp"

namespace bandlab {

struct LocalLawRecord {
  int trial = 0;
  int zIndex = 0;
  Complex z;
  double psiOff = 0;
  double psiDiag = 0;
  double scaledN = 0;  // sqrt(N eta) max(psiOff, psiDiag)
  double scaledM = 0;  // sqrt(M eta) max(psiOff, psiDiag)
};

struct Quantiles {
  double q10 = 0, median = 0, q90 = 0, max = 0;
};

struct LocalLawSummary {
  Complex z;
  int count = 0;
  Quantiles scaledN;
  Quantiles scaledM;
};

struct TrialFailure {
  int trial = 0;
  std::string message;
};

struct LocalLawReport {
  int N = 0, M = 0, W = 0;
  std::string ensemble;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<LocalLawRecord> records;    // trial-major, z-minor
  std::vector<LocalLawSummary> summary;   // one per grid point
  std::vector<TrialFailure> failures;
};

// Type-7 sample quantile; `values` need not be sorted.
double quantile(std::vector<double> values, double q);
Quantiles quantiles(const std::vector<double>& values);

LocalLawReport runLocalLawExperiment(const VarianceProfile& p, int M,
                                     const EntryDistribution& dist,
                                     const SpectralDomain& domain, int trials,
                                     std::uint64_t seed, int parallelism = 1);

struct DominationReport {
  std::vector<double> eps;
  std::vector<double> exceedance;  // sup_u P(X_u >= N^eps Y_u)
};

// X(u, t): sample t of X_u; Y(u): dominating value for index u.
DominationReport stochasticDominationEstimate(const RealMatrix& X, const RealVector& Y, int N,
                                              const std::vector<double>& eps);

enum class MinorMethod { Automatic, FromFullResolvent, DirectDecomposition };

struct SchurCheck {
  Complex gii;
  Complex schur;  // 1/(h_ii - z - h_i^* G^(i) h_i)
  double residual = 0;
};

// G^(i) comes either from G via G^(i)_ab = G_ab - G_ai G_ib / G_ii, or from
// an independent decomposition of the minor. Automatic uses the former for
// N <= 512.
SchurCheck schurIdentityCheck(const ComplexMatrix& H, Index i, Complex z,
                              MinorMethod method = MinorMethod::Automatic);

}  // namespace bandlab
