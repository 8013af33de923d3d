#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "liplab/metric_space.hpp"
#include "liplab/parallel.hpp"

namespace liplab {

/// Radius of the punctured ball that stands in for the limit y -> x in the pointwise Lipschitz
/// constant.
template <typename Scalar = double>
struct Scale {
  Scalar h;
  explicit Scale(Scalar radius) : h(radius) {
    if (!(radius > Scalar(0)) || !std::isfinite(static_cast<double>(radius)))
      throw InvalidArgument("scale h must be positive and finite");
  }
};

/// Per-point comparison sets at scale h: {y != x : d(x, y) <= h}, or, when that ball is empty,
/// the nearest neighbors of x. h_used[x] is h, or the nearest-neighbor distance on fallback.
template <typename Scalar>
struct Neighborhoods {
  Scalar h;
  std::vector<std::vector<Index>> members;
  VectorX<Scalar> h_used;

  const std::vector<Index>& of(Index x) const { return members[static_cast<std::size_t>(x)]; }
};

template <typename Scalar>
Neighborhoods<Scalar> neighborhoods(const MetricSpace<Scalar>& space, Scale<Scalar> scale) {
  const Index n = space.size();
  Neighborhoods<Scalar> out{scale.h, std::vector<std::vector<Index>>(static_cast<std::size_t>(n)),
                            VectorX<Scalar>::Constant(n, scale.h)};
  for (Index x = 0; x < n; ++x) {
    auto& ball = out.members[static_cast<std::size_t>(x)];
    Scalar nearest = infinity<Scalar>();
    for (Index y = 0; y < n; ++y) {
      if (y == x) continue;
      const Scalar d = space.dist(x, y);
      if (d <= scale.h) ball.push_back(y);
      nearest = std::min(nearest, d);
    }
    if (ball.empty() && n > 1) {
      for (Index y = 0; y < n; ++y)
        if (y != x && space.dist(x, y) == nearest) ball.push_back(y);
      out.h_used(x) = nearest;
    }
  }
  return out;
}

namespace detail {

template <typename Scalar, typename Derived>
void check_field(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != space.size()) throw InvalidArgument("field length does not match point count");
  if (!f.allFinite()) throw InvalidArgument("field values must be finite");
}

}  // namespace detail

/// LIP(f): sup over distinct pairs of |f(x) - f(y)| / d(x, y); 0 on a one-point space.
template <typename Scalar, typename Derived>
Scalar global_lip(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f) {
  detail::check_field(space, f);
  Scalar best(0);
  for (Index i = 0; i < space.size(); ++i)
    for (Index j = i + 1; j < space.size(); ++j)
      best = std::max(best, Scalar(std::abs(f(i) - f(j)) / space.dist(i, j)));
  return best;
}

/// Max of |f(x) - f(y)| / d(x, y) over the precomputed comparison set of x.
template <typename Scalar, typename Derived>
Scalar pointwise_lip(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
                     const Neighborhoods<Scalar>& nbhd, Index x) {
  Scalar best(0);
  for (Index y : nbhd.of(x)) best = std::max(best, Scalar(std::abs(f(x) - f(y)) / space.dist(x, y)));
  return best;
}

template <typename Scalar, typename Derived>
Scalar pointwise_lip(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f, Scale<Scalar> scale,
                     Index x) {
  detail::check_field(space, f);
  if (x < 0 || x >= space.size()) throw InvalidArgument("point id out of range");
  return pointwise_lip(space, f, neighborhoods(space, scale), x);
}

template <typename Scalar>
struct LipProfile {
  Scalar h;
  VectorX<Scalar> lip;
  VectorX<Scalar> h_used;

  Scalar max() const { return lip.size() ? lip.maxCoeff() : Scalar(0); }
};

template <typename Scalar, typename Derived>
LipProfile<Scalar> lip_field(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
                             const Neighborhoods<Scalar>& nbhd, unsigned threads = default_thread_count()) {
  detail::check_field(space, f);
  const VectorX<Scalar> values = f;
  LipProfile<Scalar> out{nbhd.h, VectorX<Scalar>(space.size()), nbhd.h_used};
  parallel_for(space.size(), threads, [&](Index x) { out.lip(x) = pointwise_lip(space, values, nbhd, x); });
  return out;
}

template <typename Scalar, typename Derived>
LipProfile<Scalar> lip_field(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
                             Scale<Scalar> scale) {
  return lip_field(space, f, neighborhoods(space, scale));
}

/// ||f||_inf + ||Lip_h f||_inf.
template <typename Scalar, typename Derived>
Scalar dinf_norm(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
                 const Neighborhoods<Scalar>& nbhd) {
  const LipProfile<Scalar> profile = lip_field(space, f, nbhd);
  return f.cwiseAbs().maxCoeff() + profile.max();
}

template <typename Scalar, typename Derived>
Scalar dinf_norm(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f, Scale<Scalar> scale) {
  return dinf_norm(space, f, neighborhoods(space, scale));
}

/// Points with Lip_h f <= tau, and their total mass.
template <typename Scalar>
struct SingularSet {
  PointSet members;
  Scalar tau;
  Scalar measure;
};

template <typename Scalar>
Scalar singular_measure(const MetricSpace<Scalar>& space, const SingularSet<Scalar>& set) {
  return space.mass_of(set.members);
}

template <typename Scalar>
SingularSet<Scalar> singular_set(const MetricSpace<Scalar>& space, const LipProfile<Scalar>& profile, Scalar tau) {
  if (!(tau >= Scalar(0))) throw InvalidArgument("singularity threshold tau must be nonnegative");
  SingularSet<Scalar> out{{}, tau, Scalar(0)};
  for (Index x = 0; x < space.size(); ++x)
    if (profile.lip(x) <= tau) out.members.push_back(x);
  out.measure = singular_measure(space, out);
  return out;
}

template <typename Scalar, typename Derived>
SingularSet<Scalar> singular_set(const MetricSpace<Scalar>& space, const Eigen::MatrixBase<Derived>& f,
                                 Scale<Scalar> scale, Scalar tau) {
  return singular_set(space, lip_field(space, f, scale), tau);
}

}  // namespace liplab
