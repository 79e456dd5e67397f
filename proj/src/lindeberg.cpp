#include "bandlab/lindeberg.hpp"

#include <algorithm>
#include <cmath>

#include "bandlab/locallaw.hpp"
#include "bandlab/parallel.hpp"
#include "bandlab/rng.hpp"

namespace bandlab {

std::size_t SwapSchedule::step(int i, int j) const {
  if (i > j) std::swap(i, j);
  require(i >= 0 && j < N, "schedule: position out of range");
  return stepOf[std::size_t(i) * N + j];
}

SwapSchedule orderingMap(int N, const OrderingPolicy& policy) {
  require(N >= 1, "ordering_map: N must be >= 1");
  SwapSchedule s;
  s.N = N;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) s.positions.emplace_back(i, j);
  if (policy.kind == OrderingPolicy::SeededShuffle) {
    StreamRng rng(policy.seed, 0x0D);
    for (std::size_t k = s.positions.size(); k > 1; --k)
      std::swap(s.positions[k - 1], s.positions[rng.below(k)]);
  }
  s.stepOf.assign(std::size_t(N) * N, 0);
  for (std::size_t k = 0; k < s.positions.size(); ++k)
    s.stepOf[std::size_t(s.positions[k].first) * N + s.positions[k].second] = k + 1;
  return s;
}

void selectSubset(SwapSchedule& s, std::size_t count, std::uint64_t seed) {
  require(count <= s.size(), "schedule: subset larger than the schedule");
  std::vector<std::size_t> steps(s.size());
  for (std::size_t k = 0; k < steps.size(); ++k) steps[k] = k + 1;
  StreamRng rng(seed, 0x0E);
  for (std::size_t k = 0; k < count; ++k) std::swap(steps[k], steps[k + rng.below(steps.size() - k)]);
  steps.resize(count);
  std::sort(steps.begin(), steps.end());
  s.subset = std::move(steps);
}

ResolventState ResolventState::fromMatrix(ComplexMatrix H, Complex z) {
  require(z.imag() > 0, "resolvent state: Im z must be positive");
  const Index N = H.rows();
  ResolventState st;
  st.G = (H - z * ComplexMatrix::Identity(N, N)).partialPivLu().inverse();
  st.H = std::move(H);
  st.z = z;
  return st;
}

namespace {

// Support of a single-position perturbation and its restriction to it.
struct LowRank {
  std::vector<Index> idx;
  ComplexMatrix C;
};

LowRank lowRank(int a, int b, Complex delta) {
  LowRank lr;
  if (a == b) {
    lr.idx = {a};
    lr.C = ComplexMatrix::Constant(1, 1, delta);
  } else {
    lr.idx = {a, b};
    lr.C.resize(2, 2);
    lr.C << 0, delta, std::conj(delta), 0;
  }
  return lr;
}

ComplexMatrix rows(const ComplexMatrix& G, const std::vector<Index>& idx) {
  ComplexMatrix out(idx.size(), G.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(r) = G.row(idx[r]);
  return out;
}

ComplexMatrix cols(const ComplexMatrix& G, const std::vector<Index>& idx) {
  ComplexMatrix out(G.rows(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(c) = G.col(idx[c]);
  return out;
}

ComplexMatrix block(const ComplexMatrix& G, const std::vector<Index>& idx) {
  ComplexMatrix out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = G(idx[r], idx[c]);
  return out;
}

}  // namespace

void swapStep(ResolventState& st, int a, int b, Complex value) {
  const Index N = st.H.rows();
  require(a >= 0 && b >= 0 && a < N && b < N, "swap_step: position out of range");
  if (a == b) require(value.imag() == 0, "swap_step: diagonal values must be real");
  const Complex delta = value - st.H(a, b);
  if (delta == Complex(0)) return;
  st.H(a, b) = value;
  st.H(b, a) = std::conj(value);
  // H' = H + P C P^T, so G' = G - G P C (I + P^T G P C)^{-1} P^T G.
  const LowRank lr = lowRank(a, b, delta);
  const Index r = Index(lr.idx.size());
  const ComplexMatrix cap = ComplexMatrix::Identity(r, r) + block(st.G, lr.idx) * lr.C;
  Eigen::FullPivLU<ComplexMatrix> lu(cap);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    st.G = (st.H - st.z * ComplexMatrix::Identity(N, N)).partialPivLu().inverse();
    ++st.recomputations;
    return;
  }
  const ComplexMatrix left = cols(st.G, lr.idx) * lr.C;
  const ComplexMatrix right = lu.solve(rows(st.G, lr.idx));
  st.G.noalias() -= left * right;
}

std::vector<ExpansionEntry> expansionTerms(const ComplexMatrix& G0, const Perturbation& V, int m,
                                           const std::vector<std::pair<int, int>>& entries) {
  require(m >= 0 && m <= 8, "expansion_terms: m must lie in [0, 8]");
  const Index N = G0.rows();
  require(V.a >= 0 && V.b >= 0 && V.a < N && V.b < N, "expansion_terms: position out of range");
  const LowRank lr = lowRank(V.a, V.b, V.value);
  const Index r = Index(lr.idx.size());
  const ComplexMatrix K = block(G0, lr.idx);
  const ComplexMatrix KC = K * lr.C;
  // Exact G restricted to what we need, by Woodbury:
  //   G = G0 - G0 P C (I + K C)^{-1} P^T G0.
  const auto lu = (ComplexMatrix::Identity(r, r) + KC).fullPivLu();
  std::vector<ExpansionEntry> out;
  for (const auto& [i, j] : entries) {
    require(i >= 0 && j >= 0 && i < N && j < N, "expansion_terms: entry out of range");
    ExpansionEntry e;
    e.i = i;
    e.j = j;
    Eigen::RowVectorXcd g0iP(r);
    Eigen::VectorXcd g0Pj(r);
    for (Index q = 0; q < r; ++q) {
      g0iP(q) = G0(i, lr.idx[q]);
      g0Pj(q) = G0(lr.idx[q], j);
    }
    if (V.value == Complex(0)) {
      e.exact = G0(i, j);
    } else {
      e.exact = G0(i, j) - (g0iP * lr.C * lu.solve(g0Pj))(0, 0);
    }
    // GPj = G restricted to rows P, column j.
    const Eigen::VectorXcd GPj = V.value == Complex(0) ? g0Pj : Eigen::VectorXcd(g0Pj - KC * lu.solve(g0Pj));

    Eigen::RowVectorXcd rho = g0iP * lr.C;  // e_i^T G0 V restricted to P
    Complex partial = G0(i, j);
    e.remainders.push_back(e.exact - partial);
    for (int l = 1; l <= m; ++l) {
      const Complex term = (l % 2 ? -1.0 : 1.0) * (rho * g0Pj)(0, 0);
      e.terms.push_back(term);
      partial += term;
      e.remainders.push_back(e.exact - partial);
      rho = rho * KC;
    }
    e.closedRemainder = ((m + 1) % 2 ? -1.0 : 1.0) * (rho * GPj)(0, 0);
    out.push_back(std::move(e));
  }
  return out;
}

DecayReport remainderDecayProbe(const VarianceProfile& p, int M, const EntryDistribution& dist,
                                Complex z, int mMax, int trials, std::uint64_t seed,
                                int parallelism) {
  require(M >= 3, "decay probe: M must be >= 3");
  require(trials >= 1, "decay probe: trials must be >= 1");
  require(mMax >= 1 && mMax <= 8, "decay probe: m_max must lie in [1, 8]");
  require(z.imag() > 0, "decay probe: Im z must be positive");
  const int W = p.blocks();
  const int N = M * W;
  require(N >= 5, "decay probe: N must be >= 5");
  const RealMatrix St = p.varianceMatrix();
  std::vector<std::vector<double>> rem(trials);
  parallelFor(trials, parallelism, [&](std::size_t t) {
    const std::uint64_t ts = deriveSeed(seed, t);
    auto sample = sampleBlockBand(p, M, dist, ts);
    StreamRng rng(ts, 0xDE);
    const int block = int(rng.below(W));
    const int a = block * M + int(rng.below(M));
    int b = block * M + int(rng.below(M - 1));
    if (b >= a) ++b;
    int i, j;
    do i = int(rng.below(N)); while (i == a || i == b);
    do j = int(rng.below(N)); while (j == a || j == b || j == i);
    const Complex value = sampleEntry(St, M, dist, deriveSeed(ts, 1), a, b);
    sample.H(a, b) = sample.H(b, a) = 0;
    const ComplexMatrix G0 =
        (sample.H - z * ComplexMatrix::Identity(N, N)).partialPivLu().inverse();
    const auto e = expansionTerms(G0, {a, b, value}, mMax, {{i, j}})[0];
    for (const auto& r : e.remainders) rem[t].push_back(std::abs(r));
  });
  DecayReport rep;
  rep.M = M;
  rep.N = N;
  rep.trials = trials;
  rep.z = z;
  rep.ensemble = toString(dist.kind);
  for (int m = 0; m <= mMax; ++m) {
    std::vector<double> v;
    for (const auto& r : rem) v.push_back(r[m]);
    rep.medianRemainder.push_back(quantile(v, 0.5));
    if (m >= 1) {
      std::vector<double> ratio;
      for (const auto& r : rem)
        if (r[m - 1] > 0) ratio.push_back(r[m] / r[m - 1]);
      rep.medianRatio.push_back(ratio.empty() ? 0.0 : quantile(ratio, 0.5));
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int m = 1; m <= mMax; ++m) {
    if (rep.medianRemainder[m] <= 0) continue;
    const double y = std::log(rep.medianRemainder[m]);
    sx += m;
    sy += y;
    sxx += double(m) * m;
    sxy += m * y;
    ++n;
  }
  if (n >= 2) rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

CompareReport twoEnsembleMomentCompare(const VarianceProfile& p, int M,
                                       const EntryDistribution& candidate,
                                       const std::vector<MomentPair>& pairs, int n, int trials,
                                       std::uint64_t seed, int parallelism,
                                       const EntryDistribution& reference) {
  require(n == 1 || n == 2, "moment compare: n must be 1 or 2");
  require(trials >= 2, "moment compare: need at least two trials");
  const int N = M * p.blocks();
  for (const auto& q : pairs) {
    require(q.a >= 0 && q.b >= 0 && q.a < N && q.b < N, "moment compare: entry out of range");
    require(q.z.imag() > 0, "moment compare: Im z must be positive");
  }
  // values[arm][trial][pair]
  std::vector<std::vector<std::vector<double>>> values(
      2, std::vector<std::vector<double>>(trials, std::vector<double>(pairs.size())));
  parallelFor(std::size_t(2) * trials, parallelism, [&](std::size_t job) {
    const int arm = int(job % 2);
    const int t = int(job / 2);
    const auto& dist = arm == 0 ? reference : candidate;
    const auto sample = sampleBlockBand(p, M, dist, deriveSeed(seed, job));
    const auto dec = decompose(sample.H);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double g2 = std::norm(resolventEntry(dec, pairs[k].z, pairs[k].a, pairs[k].b));
      values[arm][t][k] = n == 1 ? g2 : g2 * g2;
    }
  });
  CompareReport rep;
  rep.N = N;
  rep.M = M;
  rep.n = n;
  rep.trials = trials;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    MomentEstimate e;
    e.pair = pairs[k];
    double stats[2][2];
    for (int arm = 0; arm < 2; ++arm) {
      double mean = 0, m2 = 0;
      for (int t = 0; t < trials; ++t) {
        const double x = values[arm][t][k];
        const double d = x - mean;
        mean += d / (t + 1);
        m2 += d * (x - mean);
      }
      stats[arm][0] = mean;
      stats[arm][1] = std::sqrt(m2 / (trials - 1) / trials);
    }
    e.meanReference = stats[0][0];
    e.seReference = stats[0][1];
    e.meanCandidate = stats[1][0];
    e.seCandidate = stats[1][1];
    e.diff = e.meanReference - e.meanCandidate;
    e.combinedSe = std::hypot(e.seReference, e.seCandidate);
    e.zscore = e.combinedSe > 0 ? e.diff / e.combinedSe : 0;
    rep.estimates.push_back(e);
  }
  return rep;
}

}  // namespace bandlab
