#include "bandlab/locallaw.hpp"

#include <algorithm>
#include <cmath>

#include "bandlab/linalg.hpp"
#include "bandlab/parallel.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

double quantile(std::vector<double> v, double q) {
  require(!v.empty(), "quantile: empty sample");
  require(q >= 0 && q <= 1, "quantile: level must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * q;
  const std::size_t lo = std::size_t(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

Quantiles quantiles(const std::vector<double>& v) {
  return {quantile(v, 0.1), quantile(v, 0.5), quantile(v, 0.9), quantile(v, 1.0)};
}

LocalLawReport runLocalLawExperiment(const VarianceProfile& p, int M,
                                     const EntryDistribution& dist,
                                     const SpectralDomain& domain, int trials,
                                     std::uint64_t seed, int parallelism) {
  require(trials >= 1, "locallaw: trials must be >= 1");
  const int N = M * p.blocks();
  require(domain.N == N && domain.M == M, "locallaw: domain was built for a different N or M");
  LocalLawReport rep;
  rep.N = N;
  rep.M = M;
  rep.W = p.blocks();
  rep.ensemble = toString(dist.kind);
  rep.trials = trials;
  rep.seed = seed;

  const std::size_t nz = domain.zGrid.size();
  std::vector<std::vector<LocalLawRecord>> perTrial(trials);
  std::vector<std::string> errors(trials);
  parallelFor(trials, parallelism, [&](std::size_t t) {
    try {
      const std::uint64_t trialSeed = deriveSeed(seed, t);
      const auto sample = sampleBlockBand(p, M, dist, trialSeed);
      const auto dec = decompose(sample.H);
      for (std::size_t k = 0; k < nz; ++k) {
        const Complex z = domain.zGrid[k];
        const auto st = resolventEntryStats(dec, z, EntryMode::automatic(N, deriveSeed(trialSeed, k)));
        const double psi = std::max(st.psiOff, st.psiDiag);
        perTrial[t].push_back({int(t), int(k), z, st.psiOff, st.psiDiag,
                               std::sqrt(N * z.imag()) * psi, std::sqrt(M * z.imag()) * psi});
      }
    } catch (const std::exception& e) {
      perTrial[t].clear();
      errors[t] = e.what();
    }
  });
  for (int t = 0; t < trials; ++t) {
    if (!errors[t].empty()) rep.failures.push_back({t, errors[t]});
    rep.records.insert(rep.records.end(), perTrial[t].begin(), perTrial[t].end());
  }
  for (std::size_t k = 0; k < nz; ++k) {
    std::vector<double> n, m;
    for (const auto& r : rep.records)
      if (r.zIndex == int(k)) {
        n.push_back(r.scaledN);
        m.push_back(r.scaledM);
      }
    LocalLawSummary s;
    s.z = domain.zGrid[k];
    s.count = int(n.size());
    if (!n.empty()) {
      s.scaledN = quantiles(n);
      s.scaledM = quantiles(m);
    }
    rep.summary.push_back(s);
  }
  return rep;
}

DominationReport stochasticDominationEstimate(const RealMatrix& X, const RealVector& Y, int N,
                                              const std::vector<double>& eps) {
  require(X.rows() == Y.size(), "domination: X and Y must share the index set");
  require(X.cols() >= 1, "domination: need at least one trial");
  require(N >= 1, "domination: N must be positive");
  DominationReport r;
  r.eps = eps;
  for (double e : eps) {
    const double factor = std::pow(double(N), e);
    double sup = 0;
    for (Index u = 0; u < X.rows(); ++u) {
      int hits = 0;
      for (Index t = 0; t < X.cols(); ++t) hits += X(u, t) >= factor * Y(u);
      sup = std::max(sup, double(hits) / X.cols());
    }
    r.exceedance.push_back(sup);
  }
  return r;
}

SchurCheck schurIdentityCheck(const ComplexMatrix& H, Index i, Complex z, MinorMethod method) {
  const Index N = H.rows();
  require(i >= 0 && i < N, "schur: index out of range");
  require(z.imag() > 0, "schur: Im z must be positive");
  if (method == MinorMethod::Automatic)
    method = N <= 512 ? MinorMethod::FromFullResolvent : MinorMethod::DirectDecomposition;

  const auto dec = decompose(H);
  SchurCheck c;
  ComplexVector h(N - 1);
  for (Index a = 0, k = 0; a < N; ++a)
    if (a != i) h(k++) = H(a, i);

  Complex quad = 0;
  if (N > 1) {
    ComplexMatrix Gi;
    if (method == MinorMethod::FromFullResolvent) {
      const ComplexMatrix G = resolvent(dec, z);
      c.gii = G(i, i);
      const ComplexMatrix full = G - G.col(i) * G.row(i) / G(i, i);
      Gi = deleteRowCol(full, i);
    } else {
      c.gii = resolventEntry(dec, z, i, i);
      Gi = resolvent(decompose(deleteRowCol(H, i)), z);
    }
    quad = h.dot(Gi * h);  // h^* G^(i) h
  } else {
    c.gii = resolventEntry(dec, z, 0, 0);
  }
  c.schur = 1.0 / (H(i, i) - z - quad);
  c.residual = std::abs(c.gii - c.schur);
  return c;
}

}  // namespace bandlab
