#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandlab/types.hpp"

namespace bandlab {

struct Edge {
  int i = 0;  // 0-based block index
  int j = 0;
  double weight = 0;
};

// Block variance profile S: a weighted graph Laplacian on W vertices.
// The flattened variance matrix is (I + S) (x) 1 1^T / M.
class VarianceProfile {
 public:
  // d-dimensional discrete torus with side w_side and uniform coupling a.
  static VarianceProfile torus(int d, int wSide, double a);
  // Diagonal is derived from the edges so that rows sum to zero.
  static VarianceProfile fromEdges(int W, const std::vector<Edge>& edges);
  static VarianceProfile fromJson(const nlohmann::json& j);
  static VarianceProfile fromFile(const std::string& path);

  int blocks() const { return int(S_.rows()); }
  const RealMatrix& laplacian() const { return S_; }
  RealMatrix varianceMatrix() const;  // I + S
  const std::vector<Edge>& edges() const { return edges_; }

  // min_i (1 + 2 s_ii)
  double c0() const;
  // max_i ||(S^(i))^{-1}||_max; 0 for W = 1.
  double maxMinorInverse() const { return maxMinorInverse_; }
  // Exponent gamma with maxMinorInverse() = C W^gamma.
  std::optional<double> impliedGamma(double C = 1.0) const;
  // Bottleneck weight of a maximum spanning tree; nullopt for W = 1.
  std::optional<double> treeBottleneck() const;

  nlohmann::json toJson() const;
  // Stable short identifier derived from the canonical JSON form.
  std::string id() const;

 private:
  explicit VarianceProfile(RealMatrix S);

  RealMatrix S_;
  std::vector<Edge> edges_;
  double maxMinorInverse_ = 0;
};

struct ConditionCheck {
  bool pass = false;
  double value = 0;
  std::string detail;
};

struct AssumptionReport {
  ConditionCheck rowSums;      // (i)  max |sum_j s_ij|
  ConditionCheck c0;           // (ii) min (1 + 2 s_ii)
  ConditionCheck minorInverse; // (iii) max ||(S^(i))^{-1}||_max
  std::optional<double> gamma; // implied by (iii) for the given C
  ConditionCheck bottleneck;   // (iv) spanning-tree bottleneck
  bool allPass() const {
    return rowSums.pass && c0.pass && minorInverse.pass && bottleneck.pass;
  }
};

AssumptionReport checkAssumptions(const VarianceProfile& p, double C = 1.0);
nlohmann::json toJson(const AssumptionReport& r);

// (1/M) (I + S) (x) 1_M 1_M^T, an N x N matrix with N = M W.
RealMatrix flattenedVarianceMatrix(const VarianceProfile& p, int M);

// det of S with rows I and columns J removed (0-based).
double minorDeterminant(const RealMatrix& S, const std::vector<Index>& rows,
                        const std::vector<Index>& cols);

}  // namespace bandlab
