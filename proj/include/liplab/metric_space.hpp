#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liplab/errors.hpp"
#include "liplab/types.hpp"

namespace liplab {

/// Finite metric measure space: chord distances, an edge graph of admissible curve steps, and a
/// probability mass per point. Immutable after construction.
///
/// Edge (u, v) has length dist(u, v). Zero-mass points are allowed. Metric axioms are not enforced
/// here; validate_metric reports them.
template <typename Scalar = double>
class MetricSpace {
 public:
  static constexpr double kMassTolerance = 1e-12;

  MetricSpace(MatrixX<Scalar> dist, std::vector<Edge> edges, VectorX<Scalar> mass,
              std::vector<std::optional<std::string>> labels = {})
      : dist_(std::move(dist)), mass_(std::move(mass)), labels_(std::move(labels)) {
    const Index n = dist_.rows();
    if (n < 1) throw InvalidSpace("space must contain at least one point");
    if (dist_.cols() != n) throw InvalidSpace("distance matrix must be square");
    if (mass_.size() != n) throw InvalidSpace("mass vector length does not match point count");
    if (!labels_.empty() && static_cast<Index>(labels_.size()) != n)
      throw InvalidSpace("label count does not match point count");

    Scalar total(0);
    for (Index i = 0; i < n; ++i) {
      if (!(mass_(i) >= Scalar(0)) || !std::isfinite(static_cast<double>(mass_(i))))
        throw InvalidSpace("point masses must be finite and nonnegative");
      total += mass_(i);
    }
    if (std::abs(static_cast<double>(total) - 1.0) > kMassTolerance)
      throw InvalidSpace("point masses must sum to 1");

    for (Edge& e : edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) throw InvalidSpace("edge endpoint out of range");
      if (e.u == e.v) throw InvalidSpace("self-loop edges are not allowed");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adjacency_.assign(static_cast<std::size_t>(n), {});
    for (const Edge& e : edges_) {
      adjacency_[static_cast<std::size_t>(e.u)].push_back(e.v);
      adjacency_[static_cast<std::size_t>(e.v)].push_back(e.u);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  Index size() const { return dist_.rows(); }
  const MatrixX<Scalar>& dist() const { return dist_; }
  Scalar dist(Index i, Index j) const { return dist_(i, j); }
  /// Normalized edges: u < v, sorted, no duplicates.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Index>& neighbors(Index i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  bool adjacent(Index u, Index v) const {
    const auto& nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
  }
  const VectorX<Scalar>& mass() const { return mass_; }
  const std::vector<std::optional<std::string>>& labels() const { return labels_; }

  Scalar mass_of(const PointSet& set) const {
    Scalar m(0);
    for (Index i : set) m += mass_(i);
    return m;
  }

  Scalar max_edge_length() const {
    Scalar h(0);
    for (const Edge& e : edges_) h = std::max(h, dist_(e.u, e.v));
    return h;
  }

 private:
  MatrixX<Scalar> dist_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
  VectorX<Scalar> mass_;
  std::vector<std::optional<std::string>> labels_;
};

enum class ViolationKind { Identity, Symmetry, Positivity, Triangle };

/// Offending indices; for Triangle, dist(i, k) > dist(i, j) + dist(j, k). Unused slots are -1.
struct Violation {
  ViolationKind kind;
  Index i = -1;
  Index j = -1;
  Index k = -1;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct MetricCheck {
  static constexpr std::size_t kMaxRecorded = 1000;

  bool metric_ok = true;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;  // first kMaxRecorded, in scan order

  void record(Violation v) {
    metric_ok = false;
    ++violation_count;
    if (violations.size() < kMaxRecorded) violations.push_back(v);
  }
};

inline constexpr double kMetricTolerance = 1e-9;

/// Checks identity, symmetry, positivity and the triangle inequality, the first two and the last
/// with absolute tolerance kMetricTolerance. NaN entries are reported as violations.
template <typename Derived>
MetricCheck validate_metric(const Eigen::MatrixBase<Derived>& d) {
  using S = typename Derived::Scalar;
  const S tol(kMetricTolerance);
  MetricCheck out;
  const Index n = d.rows();
  for (Index i = 0; i < n; ++i) {
    if (!(std::abs(d(i, i)) <= tol)) out.record({ViolationKind::Identity, i, i, -1});
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (!(std::abs(d(i, j) - d(j, i)) <= tol)) out.record({ViolationKind::Symmetry, i, j, -1});
      if (!(d(i, j) > S(0)) || !(d(j, i) > S(0))) out.record({ViolationKind::Positivity, i, j, -1});
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index k = i + 1; k < n; ++k) {
      const S dik = d(i, k);
      for (Index j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        if (!(dik <= d(i, j) + d(j, k) + tol)) out.record({ViolationKind::Triangle, i, j, k});
      }
    }
  }
  return out;
}

template <typename Scalar>
MetricCheck validate_metric(const MetricSpace<Scalar>& space) {
  return validate_metric(space.dist());
}

/// Length of an edge path: the sum of chord distances of consecutive points.
template <typename Scalar>
Scalar path_length(const MetricSpace<Scalar>& space, const std::vector<Index>& path) {
  if (path.empty()) throw InvalidArgument("path must contain at least one point");
  for (Index p : path)
    if (p < 0 || p >= space.size()) throw InvalidArgument("path point out of range");
  Scalar length(0);
  for (std::size_t s = 1; s < path.size(); ++s) {
    const Index a = path[s - 1];
    const Index b = path[s];
    if (a == b || !space.adjacent(a, b))
      throw NonAdjacentStep("path step " + std::to_string(a) + " -> " + std::to_string(b) + " is not an edge");
    length += space.dist(a, b);
  }
  return length;
}

/// inf over w in set of dmat(x, w).
template <typename Derived>
typename Derived::Scalar set_distance(const Eigen::MatrixBase<Derived>& dmat, Index x, const PointSet& set) {
  if (set.empty()) throw EmptySet("distance to an empty set is undefined");
  auto best = infinity<typename Derived::Scalar>();
  for (Index w : set) best = std::min(best, dmat(x, w));
  return best;
}

/// set_distance evaluated at every point.
template <typename Derived>
VectorX<typename Derived::Scalar> set_distance_field(const Eigen::MatrixBase<Derived>& dmat, const PointSet& set) {
  if (set.empty()) throw EmptySet("distance to an empty set is undefined");
  VectorX<typename Derived::Scalar> out(dmat.rows());
  for (Index x = 0; x < dmat.rows(); ++x) out(x) = set_distance(dmat, x, set);
  return out;
}

}  // namespace liplab
