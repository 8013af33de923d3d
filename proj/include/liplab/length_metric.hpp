#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "liplab/metric_space.hpp"
#include "liplab/parallel.hpp"

namespace liplab {

/// Single-source shortest edge-path lengths from `source`, edge (u, v) weighted by dist(u, v).
/// Unreachable points get +inf.
template <typename Scalar>
VectorX<Scalar> length_distance_from(const MetricSpace<Scalar>& space, Index source) {
  using Entry = std::pair<Scalar, Index>;
  const Index n = space.size();
  VectorX<Scalar> best = VectorX<Scalar>::Constant(n, infinity<Scalar>());
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  best(source) = Scalar(0);
  queue.emplace(Scalar(0), source);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (du > best(u)) continue;
    for (Index v : space.neighbors(u)) {
      const Scalar dv = du + space.dist(u, v);
      if (dv < best(v)) {
        best(v) = dv;
        queue.emplace(dv, v);
      }
    }
  }
  return best;
}

/// The length metric d_L: row i holds shortest edge-path lengths from point i. Sources are
/// processed in parallel; the result is identical for any thread count.
template <typename Scalar>
MatrixX<Scalar> length_distance(const MetricSpace<Scalar>& space, unsigned threads = default_thread_count()) {
  const Index n = space.size();
  MatrixX<Scalar> columns(n, n);
  parallel_for(n, threads, [&](Index s) { columns.col(s) = length_distance_from(space, s); });
  columns.transposeInPlace();
  return columns;
}

/// Quasi-convexity diagnostics: C = max over ordered pairs i != j of dL(i, j) / d(i, j).
template <typename Scalar>
struct QuasiConvexity {
  bool connected = true;
  Scalar C = Scalar(1);  // +inf when some pair is unreachable
  std::optional<std::pair<Index, Index>> worst_pair;  // lexicographically smallest maximizer
};

template <typename DerivedD, typename DerivedL>
QuasiConvexity<typename DerivedD::Scalar> quasi_convexity_constant(const Eigen::MatrixBase<DerivedD>& d,
                                                                   const Eigen::MatrixBase<DerivedL>& dL) {
  using S = typename DerivedD::Scalar;
  QuasiConvexity<S> out;
  const Index n = d.rows();
  S worst(-1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const S length = dL(i, j);
      if (!std::isfinite(static_cast<double>(length))) {
        if (out.connected) {
          out.connected = false;
          out.worst_pair = std::pair{i, j};
        }
        continue;
      }
      const S ratio = length / d(i, j);
      if (out.connected && ratio > worst) {
        worst = ratio;
        out.worst_pair = std::pair{i, j};
      }
    }
  }
  if (!out.connected)
    out.C = infinity<S>();
  else if (n > 1)
    out.C = worst;
  return out;
}

template <typename Scalar>
QuasiConvexity<Scalar> quasi_convexity_constant(const MetricSpace<Scalar>& space, const MatrixX<Scalar>& dL) {
  return quasi_convexity_constant(space.dist(), dL);
}

/// Throws NotQuasiConvex when the diagnostics show an unreachable pair.
template <typename Scalar>
Scalar require_quasi_convex(const QuasiConvexity<Scalar>& qc) {
  if (!qc.connected) {
    throw NotQuasiConvex("points " + std::to_string(qc.worst_pair->first) + " and " +
                         std::to_string(qc.worst_pair->second) + " are not joined by any edge path");
  }
  return qc.C;
}

template <typename Scalar>
struct SpaceReport {
  MetricCheck metric;
  QuasiConvexity<Scalar> quasi_convexity;
};

template <typename Scalar>
SpaceReport<Scalar> analyze_space(const MetricSpace<Scalar>& space, unsigned threads = default_thread_count()) {
  const MatrixX<Scalar> dL = length_distance(space, threads);
  return {validate_metric(space), quasi_convexity_constant(space, dL)};
}

}  // namespace liplab
