#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liplab/length_metric.hpp"
#include "liplab/lipschitz.hpp"

namespace liplab {

/// {z : d(z, S) < eps}.
template <typename Derived>
PointSet eps_neighborhood(const Eigen::MatrixBase<Derived>& dmat, const PointSet& set,
                          typename Derived::Scalar eps) {
  if (!(eps > 0)) throw InvalidArgument("epsilon must be positive");
  const auto to_set = set_distance_field(dmat, set);
  PointSet out;
  for (Index z = 0; z < to_set.size(); ++z)
    if (to_set(z) < eps) out.push_back(z);
  return out;
}

template <typename Scalar>
struct LevelMass {
  Scalar value;
  Scalar mass;
  friend bool operator==(const LevelMass&, const LevelMass&) = default;
};

/// Distinct values of d(., S), ascending, each with the mass of its level set.
template <typename Derived, typename DerivedM>
std::vector<LevelMass<typename Derived::Scalar>> level_set_masses(const Eigen::MatrixBase<Derived>& dmat,
                                                                  const PointSet& set,
                                                                  const Eigen::MatrixBase<DerivedM>& mass) {
  using S = typename Derived::Scalar;
  const auto to_set = set_distance_field(dmat, set);
  std::map<S, S> levels;
  for (Index z = 0; z < to_set.size(); ++z) levels[to_set(z)] += mass(z);
  std::vector<LevelMass<S>> out;
  out.reserve(levels.size());
  for (const auto& [value, m] : levels) out.push_back({value, m});
  return out;
}

template <typename Scalar>
struct EpsilonChoice {
  Scalar epsilon;
  Scalar annulus_mass;  // m({0 < d(., S) < epsilon})
  bool warning = false;  // the r budget admitted no nonempty annulus
};

/// Chooses epsilon at the midpoint of a gap between consecutive attained values of d(., S), so the
/// level set {d(., S) = epsilon} is empty. Takes the outermost gap whose annulus mass is below r;
/// gaps past the largest attained value are never used, so the complement of S^eps stays nonempty
/// whenever d(., S) takes a positive value.
template <typename Derived, typename DerivedM>
EpsilonChoice<typename Derived::Scalar> select_epsilon(const Eigen::MatrixBase<Derived>& dmat, const PointSet& set,
                                                       const Eigen::MatrixBase<DerivedM>& mass,
                                                       typename Derived::Scalar r) {
  using S = typename Derived::Scalar;
  if (!(r > 0)) throw InvalidArgument("measure budget r must be positive");
  const auto levels = level_set_masses(dmat, set, mass);

  std::vector<LevelMass<S>> positive;
  for (const auto& level : levels)
    if (level.value > S(0)) positive.push_back(level);

  if (positive.empty()) {
    S nearest = infinity<S>();
    for (Index i = 0; i < dmat.rows(); ++i)
      for (Index j = 0; j < dmat.cols(); ++j)
        if (i != j && dmat(i, j) > S(0)) nearest = std::min(nearest, dmat(i, j));
    const S eps = std::isfinite(static_cast<double>(nearest)) ? nearest / S(2) : S(0.5);
    return {eps, S(0), false};
  }

  std::optional<EpsilonChoice<S>> best;
  S below(0);  // mass of positive levels strictly inside the current gap's annulus
  for (std::size_t i = 0; i < positive.size(); ++i) {
    if (!(below < r)) break;
    const S lo = i == 0 ? S(0) : positive[i - 1].value;
    const S hi = positive[i].value;
    const S mid = lo + (hi - lo) / S(2);
    if (mid > lo && mid < hi) best = EpsilonChoice<S>{mid, below, false};
    below += positive[i].mass;
  }
  if (!best) {
    // Every gap is unusable (no representable midpoint); fall back to just above zero.
    const S eps = std::nextafter(S(0), positive.front().value);
    return {eps, S(0), true};
  }
  best->warning = best->annulus_mass == S(0) && !(positive.front().mass < r);
  return *best;
}

/// Length distance to K: ghat(x) = min over w in K of dL(x, w).
template <typename Derived>
VectorX<typename Derived::Scalar> distance_to_complement(const Eigen::MatrixBase<Derived>& dL, const PointSet& K) {
  auto ghat = set_distance_field(dL, K);
  if (!ghat.allFinite()) throw NotQuasiConvex("some point cannot reach K along edge paths");
  return ghat;
}

template <typename Scalar = double>
struct PerturbParams {
  Scalar delta;
  Scalar r;
  Scalar tau;
  Scale<Scalar> h;
  std::optional<Scalar> epsilon;

  void validate() const {
    if (!(delta > 0) || !std::isfinite(static_cast<double>(delta)))
      throw InvalidArgument("delta must be positive and finite");
    if (!(r > 0 && r <= 1)) throw InvalidArgument("r must lie in (0, 1]");
    if (!(tau >= 0) || !std::isfinite(static_cast<double>(tau)))
      throw InvalidArgument("tau must be nonnegative and finite");
    if (epsilon && !(*epsilon > 0)) throw InvalidArgument("epsilon override must be positive");
  }
};

template <typename Scalar>
struct VerifyReport {
  Scalar dinf_distance = 0;
  bool norm_ok = false;
  Scalar singular_measure_before = 0;
  Scalar singular_measure_after = 0;
  bool measure_ok = false;
  bool inclusion_ok = false;
  bool atom_free = false;

  bool all_ok() const { return norm_ok && measure_ok && inclusion_ok && atom_free; }
  friend bool operator==(const VerifyReport&, const VerifyReport&) = default;
};

template <typename Scalar>
struct PerturbResult {
  ScalarField<Scalar> g;
  Scalar epsilon = 0;
  Scalar lambda = 0;
  Scalar M = 0;
  Scalar C = 1;
  ScalarField<Scalar> ghat;
  PointSet K;
  bool noop = false;  // S_tau(f) was empty and g = f
  bool empty_k_fallback = false;
  bool epsilon_warning = false;
  VerifyReport<Scalar> verification;
};

/// Length metric and its quasi-convexity constant, computed once per space.
template <typename Scalar>
struct LengthGeometry {
  MatrixX<Scalar> dL;
  QuasiConvexity<Scalar> qc;
};

template <typename Scalar>
LengthGeometry<Scalar> length_geometry(const MetricSpace<Scalar>& space) {
  MatrixX<Scalar> dL = length_distance(space);
  auto qc = quasi_convexity_constant(space, dL);
  return {std::move(dL), qc};
}

/// Recomputes every report field from f, g and the chosen epsilon.
template <typename Scalar>
VerifyReport<Scalar> verify(const MetricSpace<Scalar>& space, const ScalarField<Scalar>& f,
                            const ScalarField<Scalar>& g, const PerturbParams<Scalar>& params,
                            const PerturbResult<Scalar>& result) {
  detail::check_field(space, f);
  detail::check_field(space, g);
  const auto nbhd = neighborhoods(space, params.h);
  VerifyReport<Scalar> report;

  const ScalarField<Scalar> diff = g - f;
  report.dinf_distance = dinf_norm(space, diff, nbhd);
  report.norm_ok = report.dinf_distance <= params.delta;

  const auto before = singular_set(space, lip_field(space, f, nbhd), params.tau);
  const auto after = singular_set(space, lip_field(space, g, nbhd), params.tau);
  report.singular_measure_before = before.measure;
  report.singular_measure_after = after.measure;
  report.measure_ok = after.measure < params.r;

  if (before.members.empty()) {
    report.inclusion_ok = after.members.empty();
    report.atom_free = true;
    return report;
  }

  const PointMask singular = to_mask(before.members, space.size());
  PointSet annulus;
  for (Index z : eps_neighborhood(space.dist(), before.members, result.epsilon))
    if (!singular[static_cast<std::size_t>(z)]) annulus.push_back(z);
  report.inclusion_ok = is_subset(after.members, annulus);

  const auto to_set = set_distance_field(space.dist(), before.members);
  Scalar level_mass(0);
  for (Index z = 0; z < space.size(); ++z)
    if (to_set(z) == result.epsilon) level_mass += space.mass()(z);
  report.atom_free = level_mass == Scalar(0);
  return report;
}

/// Builds g = f + lambda * d_L(., K) with K the complement of the epsilon-neighborhood of
/// S_tau(f), and lambda = delta / (2 max(M, C, 1)). Throws ThresholdTooCoarse when
/// lambda <= 2 tau and NotQuasiConvex when the edge graph is disconnected.
template <typename Scalar>
PerturbResult<Scalar> perturb(const MetricSpace<Scalar>& space, const LengthGeometry<Scalar>& geometry,
                              const ScalarField<Scalar>& f, const PerturbParams<Scalar>& params) {
  params.validate();
  detail::check_field(space, f);
  const Scalar C = require_quasi_convex(geometry.qc);
  const Index n = space.size();
  const auto nbhd = neighborhoods(space, params.h);
  const auto singular = singular_set(space, lip_field(space, f, nbhd), params.tau);

  PerturbResult<Scalar> result;
  result.C = C;
  if (singular.members.empty()) {
    result.g = f;
    result.ghat = ScalarField<Scalar>::Zero(n);
    result.noop = true;
    result.K = complement({}, n);
    result.verification = verify(space, f, result.g, params, result);
    return result;
  }

  if (params.epsilon) {
    result.epsilon = *params.epsilon;
    Scalar annulus(0);
    bool atom = false;
    const auto to_set = set_distance_field(space.dist(), singular.members);
    for (Index z = 0; z < n; ++z) {
      if (to_set(z) > 0 && to_set(z) < result.epsilon) annulus += space.mass()(z);
      if (to_set(z) == result.epsilon) atom = true;
    }
    result.epsilon_warning = !(annulus < params.r) || atom;
  } else {
    const auto choice = select_epsilon(space.dist(), singular.members, space.mass(), params.r);
    result.epsilon = choice.epsilon;
    result.epsilon_warning = choice.warning;
  }

  result.K = complement(eps_neighborhood(space.dist(), singular.members, result.epsilon), n);
  if (result.K.empty()) {
    Index anchor = 0;
    for (Index i = 1; i < n; ++i)
      if (space.mass()(i) < space.mass()(anchor)) anchor = i;
    result.K = {anchor};
    result.empty_k_fallback = true;
  }

  result.ghat = distance_to_complement(geometry.dL, result.K);
  result.M = result.ghat.maxCoeff();
  result.lambda = params.delta / (Scalar(2) * std::max({result.M, C, Scalar(1)}));
  auto check_threshold = [&] {
    if (!(result.lambda > Scalar(2) * params.tau))
      throw ThresholdTooCoarse("lambda = " + std::to_string(static_cast<double>(result.lambda)) +
                               " does not exceed 2 tau = " + std::to_string(static_cast<double>(2 * params.tau)));
  };
  check_threshold();

  result.g = f + result.lambda * result.ghat;
  // Floating-point evaluation of g - f can overshoot delta when the bound is tight, by up to an
  // ulp of f. Shrink lambda by a relative step that doubles until the recomputed norm fits.
  Scalar distance = dinf_norm(space, ScalarField<Scalar>(result.g - f), nbhd);
  Scalar shrink = 4 * std::numeric_limits<Scalar>::epsilon();
  for (int attempt = 0; attempt < 64 && distance > params.delta; ++attempt) {
    shrink = std::min(Scalar(0.5), std::max(shrink, (distance - params.delta) / distance) * 2);
    result.lambda *= Scalar(1) - shrink;
    result.g = f + result.lambda * result.ghat;
    distance = dinf_norm(space, ScalarField<Scalar>(result.g - f), nbhd);
  }
  check_threshold();

  result.verification = verify(space, f, result.g, params, result);
  return result;
}

template <typename Scalar>
PerturbResult<Scalar> perturb(const MetricSpace<Scalar>& space, const ScalarField<Scalar>& f,
                              const PerturbParams<Scalar>& params) {
  return perturb(space, length_geometry(space), f, params);
}

/// Half the gap between tau and the smallest lip value t* at which m({Lip_h f <= t*}) reaches r.
/// Any u with ||Lip_h u||_inf below the margin keeps m(S_tau(f + u)) < r. Returns 0 when
/// m(S_tau(f)) >= r already.
template <typename Scalar>
Scalar openness_margin(const MetricSpace<Scalar>& space, const ScalarField<Scalar>& f, Scale<Scalar> scale,
                       Scalar tau, Scalar r) {
  const auto profile = lip_field(space, f, scale);
  if (!(singular_set(space, profile, tau).measure < r)) return Scalar(0);

  std::vector<std::pair<Scalar, Scalar>> by_lip;  // (lip, mass)
  for (Index x = 0; x < space.size(); ++x) by_lip.emplace_back(profile.lip(x), space.mass()(x));
  std::sort(by_lip.begin(), by_lip.end());

  Scalar cumulative(0);
  Scalar jump = by_lip.back().first;
  for (std::size_t i = 0; i < by_lip.size();) {
    const Scalar value = by_lip[i].first;
    for (; i < by_lip.size() && by_lip[i].first == value; ++i) cumulative += by_lip[i].second;
    if (!(cumulative < r)) {
      jump = value;
      break;
    }
  }
  return (jump - tau) / Scalar(2);
}

enum class StepStatus { Ok, FlagsFailed, ThresholdTooCoarse, Failed };

template <typename Scalar>
struct DemoStep {
  Scalar delta = 0;
  Scalar r = 0;
  StepStatus status = StepStatus::Failed;
  std::optional<PerturbResult<Scalar>> result;
  std::string error;
};

/// Perturbs the original f once per (delta_k, r_k) of the schedule. r_k must be strictly
/// decreasing and positive. Failing steps are recorded and the sweep continues.
template <typename Scalar>
std::vector<DemoStep<Scalar>> residual_demo(const MetricSpace<Scalar>& space, const ScalarField<Scalar>& f,
                                            const std::vector<std::pair<Scalar, Scalar>>& schedule, Scalar tau,
                                            Scale<Scalar> scale) {
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k].second > 0)) throw InvalidArgument("schedule r_k must be positive");
    if (k > 0 && !(schedule[k].second < schedule[k - 1].second))
      throw InvalidArgument("schedule r_k must be strictly decreasing");
  }
  std::vector<DemoStep<Scalar>> steps;
  if (schedule.empty()) return steps;

  const auto geometry = length_geometry(space);
  for (const auto& [delta, r] : schedule) {
    DemoStep<Scalar> step;
    step.delta = delta;
    step.r = r;
    try {
      step.result = perturb(space, geometry, f, PerturbParams<Scalar>{delta, r, tau, scale, std::nullopt});
      step.status = step.result->verification.all_ok() ? StepStatus::Ok : StepStatus::FlagsFailed;
    } catch (const ThresholdTooCoarse& e) {
      step.status = StepStatus::ThresholdTooCoarse;
      step.error = e.what();
    } catch (const Error& e) {
      step.status = StepStatus::Failed;
      step.error = e.what();
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace liplab
