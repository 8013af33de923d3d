#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "liplab/metric_space.hpp"

namespace liplab {

/// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state advanced by 0x9E3779B97F4A7C15, output mixed
/// with multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB. Fixed here so seeded spaces are
/// reproducible in any language.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class GenKind { Path, Grid, RandomGeometric, Sierpinski, Snowflake };

struct GenSpec {
  GenKind kind = GenKind::Path;
  Index n = 1;
  Index rows = 1;
  Index cols = 1;
  double radius = 0.3;
  int level = 0;
  std::uint64_t seed = 0;
  double alpha = 0.5;
};

namespace detail {

inline VectorX<double> uniform_mass(Index n) { return VectorX<double>::Constant(n, 1.0 / static_cast<double>(n)); }

inline MatrixX<double> euclidean(const std::vector<std::pair<double, double>>& xy) {
  const auto n = static_cast<Index>(xy.size());
  MatrixX<double> d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double dx = xy[static_cast<std::size_t>(i)].first - xy[static_cast<std::size_t>(j)].first;
      const double dy = xy[static_cast<std::size_t>(i)].second - xy[static_cast<std::size_t>(j)].second;
      d(i, j) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return d;
}

}  // namespace detail

/// Unit-edge path p0 - p1 - ... with the path metric |i - j|.
inline MetricSpace<double> gen_path(Index n) {
  if (n < 1) throw InvalidArgument("path needs at least one point");
  MatrixX<double> d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = static_cast<double>(std::abs(i - j));
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return {std::move(d), std::move(edges), detail::uniform_mass(n)};
}

/// rows x cols lattice with unit spacing, 4-neighbor edges and the Euclidean chord metric.
/// Point (r, c) has id r * cols + c.
inline MetricSpace<double> gen_grid(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("grid needs at least one row and column");
  std::vector<std::pair<double, double>> xy;
  std::vector<Edge> edges;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      xy.emplace_back(static_cast<double>(r), static_cast<double>(c));
      const Index id = r * cols + c;
      if (c + 1 < cols) edges.push_back({id, id + 1});
      if (r + 1 < rows) edges.push_back({id, id + cols});
    }
  }
  return {detail::euclidean(xy), std::move(edges), detail::uniform_mass(rows * cols)};
}

/// n seeded points in the unit square (x then y drawn per point), joined when their Euclidean
/// distance is at most radius. May be disconnected.
inline MetricSpace<double> gen_random_geometric(Index n, double radius, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random geometric space needs at least one point");
  if (!(radius > 0)) throw InvalidArgument("radius must be positive");
  SplitMix64 rng(seed);
  std::vector<std::pair<double, double>> xy(static_cast<std::size_t>(n));
  for (auto& p : xy) {
    p.first = rng.uniform();
    p.second = rng.uniform();
  }
  MatrixX<double> d = detail::euclidean(xy);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (d(i, j) <= radius) edges.push_back({i, j});
  return {std::move(d), std::move(edges), detail::uniform_mass(n)};
}

/// Level-k Sierpinski gasket graph on the unit equilateral triangle: 3 (3^k + 1) / 2 vertices,
/// edges of length 2^-k, Euclidean chord metric of the planar embedding.
inline MetricSpace<double> gen_sierpinski(int level) {
  if (level < 0) throw InvalidArgument("sierpinski level must be nonnegative");
  // Vertices in lattice coordinates a * e1 + b * e2 with e1 = (1, 0), e2 = (1/2, sqrt(3)/2).
  std::map<std::pair<std::int64_t, std::int64_t>, Index> ids;
  std::vector<std::pair<std::int64_t, std::int64_t>> lattice;
  std::vector<Edge> edges;
  auto vertex = [&](std::int64_t a, std::int64_t b) {
    auto [it, inserted] = ids.try_emplace({a, b}, static_cast<Index>(lattice.size()));
    if (inserted) lattice.emplace_back(a, b);
    return it->second;
  };
  auto build = [&](auto&& self, std::int64_t a, std::int64_t b, std::int64_t side) -> void {
    if (side == 1) {
      const Index p = vertex(a, b);
      const Index q = vertex(a + 1, b);
      const Index s = vertex(a, b + 1);
      edges.push_back({p, q});
      edges.push_back({q, s});
      edges.push_back({p, s});
      return;
    }
    const std::int64_t half = side / 2;
    self(self, a, b, half);
    self(self, a + half, b, half);
    self(self, a, b + half, half);
  };
  build(build, 0, 0, std::int64_t{1} << level);

  const auto n = static_cast<Index>(lattice.size());
  const double unit = std::ldexp(1.0, -level);
  MatrixX<double> d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const std::int64_t da = lattice[static_cast<std::size_t>(i)].first - lattice[static_cast<std::size_t>(j)].first;
      const std::int64_t db =
          lattice[static_cast<std::size_t>(i)].second - lattice[static_cast<std::size_t>(j)].second;
      d(i, j) = std::sqrt(static_cast<double>(da * da + da * db + db * db)) * unit;
    }
  }
  return {std::move(d), std::move(edges), detail::uniform_mass(n)};
}

/// Snowflake transform d -> d^alpha. Edges and masses are kept; edge lengths become d^alpha.
inline MetricSpace<double> snowflake(const MetricSpace<double>& space, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("snowflake alpha must lie in (0, 1)");
  MatrixX<double> d = space.dist().array().pow(alpha).matrix();
  return {std::move(d), space.edges(), space.mass(), space.labels()};
}

/// Dispatches on spec.kind; Snowflake needs a base space.
inline MetricSpace<double> generate(const GenSpec& spec, const MetricSpace<double>* base = nullptr) {
  switch (spec.kind) {
    case GenKind::Path:
      return gen_path(spec.n);
    case GenKind::Grid:
      return gen_grid(spec.rows, spec.cols);
    case GenKind::RandomGeometric:
      return gen_random_geometric(spec.n, spec.radius, spec.seed);
    case GenKind::Sierpinski:
      return gen_sierpinski(spec.level);
    case GenKind::Snowflake:
      if (!base) throw InvalidArgument("snowflake needs a base space");
      return snowflake(*base, spec.alpha);
  }
  throw InvalidArgument("unknown generator kind");
}

}  // namespace liplab
