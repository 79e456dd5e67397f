#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bandlab/graph_profile.hpp"
#include "bandlab/types.hpp"

namespace bandlab {

struct SpectralDecomposition {
  RealVector lambda;  // ascending
  ComplexMatrix U;    // orthonormal eigenvectors in columns
  double residual = 0;       // ||H U - U diag(lambda)||_max
  double orthogonality = 0;  // ||U* U - I||_max

  Index size() const { return lambda.size(); }
};

SpectralDecomposition decompose(const ComplexMatrix& H);

// Stieltjes transform of the semicircle law, the root of m^2 + z m + 1 = 0
// with Im m > 0.
Complex mSc(Complex z);
double semicircleDensity(double x);

struct SpectralDomain {
  int N = 0, M = 0;
  double kappa = 0, eps2 = 0;
  double etaMin = 0, etaMax = 0;
  std::vector<double> energies;
  std::vector<double> etas;  // ascending, log-spaced
  std::vector<Complex> zGrid;  // energies x etas, eta fastest
};

// E uniformly on [-(sqrt2 - kappa), sqrt2 - kappa], eta log-spaced on
// [N^{-1+eps2}, N^{eps2}/M].
SpectralDomain buildDomain(int N, int M, double kappa, double eps2, int nE, int nEta);
// Same box, with an explicit eta window that must lie inside it.
SpectralDomain buildDomain(int N, int M, double kappa, double eps2, int nE, int nEta,
                           double etaLo, double etaHi);
bool inDomain(const SpectralDomain& d, Complex z, double tol = 1e-12);

ComplexMatrix resolvent(const SpectralDecomposition& d, Complex z);
ComplexVector resolventDiagonal(const SpectralDecomposition& d, Complex z);
Complex resolventEntry(const SpectralDecomposition& d, Complex z, Index a, Index b);

struct EntryMode {
  enum Kind { Full, Sampled } kind = Full;
  int pairs = 4096;
  std::uint64_t seed = 0;

  static EntryMode full() { return {}; }
  static EntryMode sampled(int K, std::uint64_t seed) { return {Sampled, K, seed}; }
  // Full up to N = 2048, sampled beyond.
  static EntryMode automatic(Index N, std::uint64_t seed) {
    return N > 2048 ? sampled(4096, seed) : full();
  }
};

struct ResolventStats {
  double psiOff = 0;   // max_{a != b} |G_ab|
  double psiDiag = 0;  // max_a |G_aa - m_sc|
  double lambdaD = 0;  // same quantity as psiDiag
  Complex mBar;        // Tr G / N
  int pairsSampled = 0;  // 0 in full mode
};

ResolventStats resolventEntryStats(const SpectralDecomposition& d, Complex z,
                                   const EntryMode& mode = EntryMode::full());

// ||(1 - m_sc^2 T)^{-1}||_{inf->inf} for the flattened variance matrix T.
double stabilityGamma(const VarianceProfile& p, int M, Complex z);

struct SelfConsistencyReport {
  ComplexVector delta;  // Delta_i
  ComplexVector omega;  // Omega_i
  Complex omegaMean;    // (1/N) sum Omega_i
  Complex omegaFromMean;  // -(mbar + 1/(z + mbar))
  Complex mBar;
  double maxAbsDelta = 0;
  double scaledMaxDelta = 0;  // sqrt(N eta) max |Delta_i|
};

SelfConsistencyReport selfConsistencyResiduals(const SpectralDecomposition& d,
                                               const VarianceProfile& p, int M, Complex z);

}  // namespace bandlab
