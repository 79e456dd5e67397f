#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "bandlab/types.hpp"

namespace bandlab {

// Copy of `a` with the listed rows and columns removed (0-based, any order).
template <class Derived>
Matrix<typename Derived::Scalar> deleteRowsCols(const Eigen::MatrixBase<Derived>& a,
                                                std::span<const Index> rows,
                                                std::span<const Index> cols) {
  std::vector<Index> keepR, keepC;
  for (Index i = 0; i < a.rows(); ++i)
    if (std::find(rows.begin(), rows.end(), i) == rows.end()) keepR.push_back(i);
  for (Index j = 0; j < a.cols(); ++j)
    if (std::find(cols.begin(), cols.end(), j) == cols.end()) keepC.push_back(j);
  Matrix<typename Derived::Scalar> out(keepR.size(), keepC.size());
  for (Index r = 0; r < out.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c) out(r, c) = a(keepR[r], keepC[c]);
  return out;
}

template <class Derived>
Matrix<typename Derived::Scalar> deleteRowCol(const Eigen::MatrixBase<Derived>& a, Index i) {
  const Index idx[1] = {i};
  return deleteRowsCols(a, idx, idx);
}

// Operator norm induced by the sup-norm: max absolute row sum.
template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real infNorm(
    const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

// Entrywise max norm.
template <class Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real maxNorm(
    const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  return a.cwiseAbs().maxCoeff();
}

template <class Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 0) return typename Derived::Scalar(1);
  return a.partialPivLu().determinant();
}

}  // namespace bandlab
