#include "bandlab/deloc.hpp"

#include <cmath>
#include <numbers>

#include "bandlab/parallel.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

SupNorms supNormsBulk(const SpectralDecomposition& d, double kappa) {
  const Index N = d.size();
  const double edge = std::numbers::sqrt2 - kappa;
  SupNorms s;
  for (Index i = 0; i < N; ++i) {
    if (std::abs(d.lambda(i)) > edge) continue;
    ++s.bulkCount;
    const bool close = (i > 0 && d.lambda(i) - d.lambda(i - 1) < 1e-10) ||
                       (i + 1 < N && d.lambda(i + 1) - d.lambda(i) < 1e-10);
    if (close) {
      ++s.degenerate;
      continue;
    }
    const double v = std::sqrt(double(N)) * d.U.col(i).cwiseAbs().maxCoeff();
    s.scaled.push_back(v);
    s.maxScaled = std::max(s.maxScaled, v);
  }
  return s;
}

DelocReport runDelocExperiment(const VarianceProfile& p, int M, const EntryDistribution& dist,
                               int trials, double kappa, std::uint64_t seed, int parallelism) {
  require(trials >= 1, "deloc: trials must be >= 1");
  require(kappa > 0 && kappa < std::numbers::sqrt2, "deloc: kappa must lie in (0, sqrt 2)");
  DelocReport rep;
  rep.M = M;
  rep.W = p.blocks();
  rep.N = M * rep.W;
  rep.kappa = kappa;
  rep.ensemble = toString(dist.kind);
  rep.seed = seed;
  rep.exploratory = M < std::pow(double(rep.N), 6.0 / 7.0);
  rep.trials.resize(trials);
  std::vector<std::string> errors(trials);
  parallelFor(trials, parallelism, [&](std::size_t t) {
    try {
      const auto sample = sampleBlockBand(p, M, dist, deriveSeed(seed, t));
      rep.trials[t] = supNormsBulk(decompose(sample.H), kappa);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });
  for (int t = 0; t < trials; ++t)
    if (!errors[t].empty()) rep.failures.push_back({t, errors[t]});

  rep.histogram.lo = 1.0;
  rep.histogram.width = 0.25;
  rep.histogram.counts.assign(40, 0);
  for (const auto& tr : rep.trials)
    for (double v : tr.scaled) {
      const int bin = std::min<int>(int((v - rep.histogram.lo) / rep.histogram.width),
                                    int(rep.histogram.counts.size()) - 1);
      ++rep.histogram.counts[std::max(bin, 0)];
    }
  return rep;
}

double spectralIdentityResidual(const SpectralDecomposition& d, Complex z, Index a) {
  const double E = z.real(), eta = z.imag();
  const Complex gaa = resolvent(d, z)(a, a);
  double sum = 0;
  for (Index i = 0; i < d.size(); ++i) {
    const double x = d.lambda(i) - E;
    sum += std::norm(d.U(a, i)) * eta / (x * x + eta * eta);
  }
  return std::abs(gaa.imag() - sum);
}

DyadicReport imGreenDyadicCheck(const SpectralDecomposition& d, double E, double eta,
                                double eta0, Index i, Index j) {
  const Index N = d.size();
  require(eta > 1.0 / N && eta <= eta0, "dyadic: need 1/N < eta <= eta0");
  DyadicReport r;
  r.lhs = std::abs(resolventEntry(d, Complex(E, eta), i, j));
  const RealMatrix w = d.U.cwiseAbs2();  // w(l, k) = |u_k(l)|^2
  const double spread = d.lambda.cwiseAbs().maxCoeff() + std::abs(E) + 1.0;
  // Im G_ll(E + iy) = sum_k w(l,k) y / ((lambda_k - E)^2 + y^2). Once y
  // exceeds the spectral spread by a factor 2^40 each term is y^{-1}(1 + O(2^-80)),
  // so the rest of the ladder is a geometric tail.
  RealVector total = RealVector::Zero(N);
  RealVector prev = RealVector::Zero(N);
  double y = eta;
  for (int k = 0;; ++k, y *= 2) {
    RealVector term(N);
    for (Index l = 0; l < N; ++l) {
      double s = 0;
      for (Index m = 0; m < N; ++m) {
        const double x = d.lambda(m) - E;
        s += w(l, m) * y / (x * x + y * y);
      }
      term(l) = s;
    }
    for (Index l = 0; l < N; ++l)
      if (k > 0 && y * term(l) < (y / 2) * prev(l) * (1 - 1e-12)) r.monotone = false;
    total += term;
    prev = term;
    r.ladderSteps = k + 1;
    if (y > spread * std::ldexp(1.0, 40)) {
      total += term;  // sum_{k' > k} 1/(2^{k'} eta) = 1/(2^k eta)
      break;
    }
  }
  r.rhs = total.maxCoeff();
  r.ratio = r.lhs / r.rhs;
  return r;
}

}  // namespace bandlab
