#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace liplab {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A real value per point, indexed by point id.
template <typename Scalar>
using ScalarField = VectorX<Scalar>;

/// Sorted, duplicate-free list of point ids.
using PointSet = std::vector<Index>;

/// Membership mask over all points of a space.
using PointMask = std::vector<bool>;

struct Edge {
  Index u = 0;
  Index v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

template <typename Scalar>
constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

inline PointMask to_mask(const PointSet& set, Index n) {
  PointMask mask(static_cast<std::size_t>(n), false);
  for (Index i : set) mask[static_cast<std::size_t>(i)] = true;
  return mask;
}

inline PointSet from_mask(const PointMask& mask) {
  PointSet set;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) set.push_back(static_cast<Index>(i));
  return set;
}

inline PointSet complement(const PointSet& set, Index n) {
  PointMask mask = to_mask(set, n);
  mask.flip();
  return from_mask(mask);
}

inline bool is_subset(const PointSet& a, const PointSet& b) {
  std::size_t j = 0;
  for (Index x : a) {
    while (j < b.size() && b[j] < x) ++j;
    if (j == b.size() || b[j] != x) return false;
  }
  return true;
}

}  // namespace liplab
