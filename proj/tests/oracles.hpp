#pragma once

// Reference implementations used only by tests. They share no code path with the library
// routines they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "liplab/metric_space.hpp"
#include "liplab/spacegen.hpp"

namespace liplab::testing {

/// Floyd-Warshall over a row-major buffer: d(i, j) = min(d(i, j), d(i, k) + d(k, j)).
inline MatrixX<double> floyd_warshall(const MetricSpace<double>& space) {
  const auto n = static_cast<std::size_t>(space.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (const Edge& e : space.edges()) {
    const auto u = static_cast<std::size_t>(e.u);
    const auto v = static_cast<std::size_t>(e.v);
    const double w = space.dist(e.u, e.v);
    d[u * n + v] = std::min(d[u * n + v], w);
    d[v * n + u] = std::min(d[v * n + u], w);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double* row_k = &d[k * n];
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d[i * n + k];
      if (dik == inf) continue;
      double* row_i = &d[i * n];
      for (std::size_t j = 0; j < n; ++j) row_i[j] = std::min(row_i[j], dik + row_k[j]);
    }
  }
  MatrixX<double> out(space.size(), space.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = d[i * n + j];
  return out;
}

/// Minimum length over all simple edge paths, by exhaustive depth-first enumeration. Tiny spaces only.
inline MatrixX<double> enumerate_simple_paths(const MetricSpace<double>& space) {
  const Index n = space.size();
  MatrixX<double> best = MatrixX<double>::Constant(n, n, std::numeric_limits<double>::infinity());
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  std::function<void(Index, Index, double)> walk = [&](Index source, Index at, double length) {
    best(source, at) = std::min(best(source, at), length);
    on_path[static_cast<std::size_t>(at)] = true;
    for (const Edge& e : space.edges()) {
      Index next = -1;
      if (e.u == at) next = e.v;
      if (e.v == at) next = e.u;
      if (next >= 0 && !on_path[static_cast<std::size_t>(next)]) walk(source, next, length + space.dist(at, next));
    }
    on_path[static_cast<std::size_t>(at)] = false;
  };
  for (Index s = 0; s < n; ++s) walk(s, s, 0.0);
  return best;
}

/// Pointwise Lipschitz value by a direct scan of the whole row, with the same ball and fallback rule.
inline double brute_pointwise_lip(const MetricSpace<double>& space, const VectorX<double>& f, double h, Index x) {
  double nearest = std::numeric_limits<double>::infinity();
  double in_ball = 0.0;
  bool any = false;
  for (Index y = 0; y < space.size(); ++y) {
    if (y == x) continue;
    nearest = std::min(nearest, space.dist(x, y));
    if (space.dist(x, y) <= h) {
      any = true;
      in_ball = std::max(in_ball, std::abs(f(x) - f(y)) / space.dist(x, y));
    }
  }
  if (any || space.size() == 1) return in_ball;
  double out = 0.0;
  for (Index y = 0; y < space.size(); ++y)
    if (y != x && space.dist(x, y) == nearest) out = std::max(out, std::abs(f(x) - f(y)) / space.dist(x, y));
  return out;
}

/// Random field with values on the dyadic grid 2^-20 Z, so sums and differences are exact.
inline VectorX<double> dyadic_field(SplitMix64& rng, Index n, double amplitude) {
  VectorX<double> f(n);
  for (Index i = 0; i < n; ++i) f(i) = std::ldexp(std::round((2.0 * rng.uniform() - 1.0) * amplitude * 0x1p20), -20);
  return f;
}

/// Positive masses summing to 1.
inline VectorX<double> random_mass(SplitMix64& rng, Index n) {
  VectorX<double> m(n);
  for (Index i = 0; i < n; ++i) m(i) = 0.1 + rng.uniform();
  return m / m.sum();
}

inline MetricSpace<double> with_mass(const MetricSpace<double>& space, VectorX<double> mass) {
  return {space.dist(), space.edges(), std::move(mass), space.labels()};
}

/// Random nonempty proper-or-full subset.
inline PointSet random_subset(SplitMix64& rng, Index n, double keep) {
  PointSet out;
  for (Index i = 0; i < n; ++i)
    if (rng.uniform() < keep) out.push_back(i);
  if (out.empty()) out.push_back(static_cast<Index>(rng.next() % static_cast<std::uint64_t>(n)));
  return out;
}

}  // namespace liplab::testing
