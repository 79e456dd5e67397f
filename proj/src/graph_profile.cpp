#include "bandlab/graph_profile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "bandlab/linalg.hpp"

namespace bandlab {

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::vector<Edge> edgesOf(const RealMatrix& S) {
  std::vector<Edge> out;
  for (int i = 0; i < S.rows(); ++i)
    for (int j = i + 1; j < S.cols(); ++j)
      if (S(i, j) != 0) out.push_back({i, j, S(i, j)});
  return out;
}

}  // namespace

VarianceProfile::VarianceProfile(RealMatrix S) : S_(std::move(S)) {
  const Index W = S_.rows();
  require(W >= 1 && S_.cols() == W, "profile: S must be square and non-empty");
  const double scale = std::max(1.0, maxNorm(S_));
  for (Index i = 0; i < W; ++i) {
    for (Index j = 0; j < W; ++j) {
      require(std::abs(S_(i, j) - S_(j, i)) <= 1e-12 * scale, "profile: S must be symmetric");
      if (i != j) require(S_(i, j) >= 0, "profile: off-diagonal entries must be non-negative");
    }
    require(std::abs(S_.row(i).sum()) <= 1e-12 * scale, "profile: rows of S must sum to zero");
    require(1 + 2 * S_(i, i) > 0, "profile: 1 + 2 s_ii must be positive");
  }
  edges_ = edgesOf(S_);
  DisjointSets ds{int(W)};
  int components = int(W);
  for (const auto& e : edges_) components -= ds.unite(e.i, e.j);
  require(components == 1, "profile: graph must be connected");

  for (Index i = 0; i < W && W > 1; ++i) {
    const RealMatrix minor = deleteRowCol(S_, i);
    Eigen::FullPivLU<RealMatrix> lu(minor);
    if (!lu.isInvertible()) throw NumericalError("profile: singular minor S^(i)");
    maxMinorInverse_ = std::max(maxMinorInverse_, maxNorm(lu.inverse()));
  }
}

VarianceProfile VarianceProfile::torus(int d, int wSide, double a) {
  require(d >= 1, "torus: d must be >= 1");
  require(wSide >= 2, "torus: w_side must be >= 2");
  require(a > 0, "torus: coupling must be positive");
  require(a < 1.0 / (4.0 * d), "torus: coupling must satisfy a < 1/(4d)");
  Index W = 1;
  for (int k = 0; k < d; ++k) W *= wSide;
  RealMatrix S = RealMatrix::Zero(W, W);
  std::vector<int> coord(d);
  for (Index x = 0; x < W; ++x) {
    Index rest = x;
    for (int k = 0; k < d; ++k) {
      coord[k] = int(rest % wSide);
      rest /= wSide;
    }
    Index stride = 1;
    for (int k = 0; k < d; ++k) {
      for (int step : {1, wSide - 1}) {
        const int c = (coord[k] + step) % wSide;
        const Index y = x + (c - coord[k]) * stride;
        S(x, y) += a;
      }
      stride *= wSide;
    }
    S(x, x) = -2.0 * d * a;
  }
  return VarianceProfile(std::move(S));
}

VarianceProfile VarianceProfile::fromEdges(int W, const std::vector<Edge>& edges) {
  require(W >= 1, "profile: W must be >= 1");
  RealMatrix S = RealMatrix::Zero(W, W);
  for (const auto& e : edges) {
    require(e.i >= 0 && e.i < W && e.j >= 0 && e.j < W, "profile: edge index out of range");
    require(e.i != e.j, "profile: self-loops are not allowed");
    require(e.weight > 0, "profile: edge weights must be positive");
    require(S(e.i, e.j) == 0, "profile: duplicate edge");
    S(e.i, e.j) = S(e.j, e.i) = e.weight;
  }
  for (int i = 0; i < W; ++i) S(i, i) = -S.row(i).sum();
  return VarianceProfile(std::move(S));
}

VarianceProfile VarianceProfile::fromJson(const nlohmann::json& j) {
  if (j.contains("torus")) {
    const auto& t = j.at("torus");
    return torus(t.at("d").get<int>(), t.at("w_side").get<int>(), t.at("a").get<double>());
  }
  const int W = j.at("W").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    require(e.is_array() && e.size() == 3, "profile: edges must be [i, j, w] triples");
    edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<double>()});
  }
  return fromEdges(W, edges);
}

VarianceProfile VarianceProfile::fromFile(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "profile: cannot open " + path);
  return fromJson(nlohmann::json::parse(in));
}

RealMatrix VarianceProfile::varianceMatrix() const {
  return RealMatrix::Identity(blocks(), blocks()) + S_;
}

double VarianceProfile::c0() const { return (1.0 + 2.0 * S_.diagonal().array()).minCoeff(); }

std::optional<double> VarianceProfile::impliedGamma(double C) const {
  if (blocks() < 2 || maxMinorInverse_ <= 0 || C <= 0) return std::nullopt;
  return std::log(maxMinorInverse_ / C) / std::log(double(blocks()));
}

std::optional<double> VarianceProfile::treeBottleneck() const {
  if (blocks() < 2) return std::nullopt;
  auto sorted = edges_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& x, const Edge& y) { return x.weight > y.weight; });
  DisjointSets ds(blocks());
  double bottleneck = std::numeric_limits<double>::infinity();
  for (const auto& e : sorted)
    if (ds.unite(e.i, e.j)) bottleneck = std::min(bottleneck, e.weight);
  return bottleneck;
}

nlohmann::json VarianceProfile::toJson() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : edges_) edges.push_back({e.i + 1, e.j + 1, e.weight});
  return {{"W", blocks()}, {"edges", edges}};
}

std::string VarianceProfile::id() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : toJson().dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AssumptionReport checkAssumptions(const VarianceProfile& p, double C) {
  require(C > 0, "check_assumptions: C must be positive");
  const RealMatrix& S = p.laplacian();
  AssumptionReport r;
  r.rowSums.value = S.rowwise().sum().cwiseAbs().maxCoeff();
  r.rowSums.pass = r.rowSums.value <= 1e-12 * std::max(1.0, maxNorm(S));
  r.rowSums.detail = "max_i |sum_j s_ij|";

  r.c0.value = p.c0();
  r.c0.pass = r.c0.value > 0;
  r.c0.detail = "min_i (1 + 2 s_ii)";

  r.minorInverse.value = p.maxMinorInverse();
  r.minorInverse.pass = true;
  r.minorInverse.detail = "max_i ||(S^(i))^{-1}||_max";
  r.gamma = p.impliedGamma(C);

  const auto b = p.treeBottleneck();
  r.bottleneck.value = b.value_or(0.0);
  r.bottleneck.pass = !b || *b > 0;
  r.bottleneck.detail = b ? "min edge weight of a maximum spanning tree" : "single block";
  return r;
}

nlohmann::json toJson(const AssumptionReport& r) {
  auto cond = [](const ConditionCheck& c) {
    return nlohmann::json{{"pass", c.pass}, {"value", c.value}, {"detail", c.detail}};
  };
  nlohmann::json j{{"row_sums", cond(r.rowSums)},
                   {"c0", cond(r.c0)},
                   {"minor_inverse", cond(r.minorInverse)},
                   {"bottleneck", cond(r.bottleneck)},
                   {"pass", r.allPass()}};
  j["minor_inverse"]["gamma"] = r.gamma ? nlohmann::json(*r.gamma) : nlohmann::json(nullptr);
  return j;
}

RealMatrix flattenedVarianceMatrix(const VarianceProfile& p, int M) {
  require(M >= 1, "flattened_variance_matrix: M must be >= 1");
  const RealMatrix St = p.varianceMatrix();
  const Index W = St.rows();
  RealMatrix T(W * M, W * M);
  for (Index j = 0; j < W; ++j)
    for (Index k = 0; k < W; ++k) T.block(j * M, k * M, M, M).setConstant(St(j, k) / M);
  return T;
}

double minorDeterminant(const RealMatrix& S, const std::vector<Index>& rows,
                        const std::vector<Index>& cols) {
  require(rows.size() == cols.size(), "minor: |I| must equal |J|");
  return determinant(deleteRowsCols(S, rows, cols));
}

}  // namespace bandlab
