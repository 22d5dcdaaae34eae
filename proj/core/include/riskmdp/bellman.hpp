#pragma once

#include <optional>
#include <span>
#include <vector>

#include "riskmdp/distribution.hpp"
#include "riskmdp/model.hpp"
#include "riskmdp/risk_measure.hpp"

namespace riskmdp {

/// Relative tolerance under which two action values count as tied; ties go
/// to the smallest action index.
inline constexpr double kTieTolerance = 1e-12;

/// Law of c(x,a,T(x,a,Z)) + beta * v(T(x,a,Z)) under the disturbance law.
/// `stage` selects a per-stage cost table when the model has one.
/// Throws Error{InfeasibleAction} if a is not in D(x).
DiscreteDistribution stage_law(const MdpModel& m, const ValueFunction& v, StateIndex x,
                               ActionIndex a, std::optional<std::size_t> stage = std::nullopt);

/// rho applied to the stage law.
double bellman_L(const MdpModel& m, const RiskMeasure& rm, const ValueFunction& v, StateIndex x,
                 ActionIndex a, std::optional<std::size_t> stage = std::nullopt);

struct BellmanUpdate {
  ValueFunction value;
  std::vector<ActionIndex> action;
};

/// v'(x) = min over D(x) of bellman_L; the returned action is the smallest
/// index whose value is within kTieTolerance of the minimum.
BellmanUpdate bellman_T(const MdpModel& m, const RiskMeasure& rm, const ValueFunction& v,
                        std::optional<std::size_t> stage = std::nullopt);

/// Fixed-decision operator T_d v(x) = L v(x, d(x)).
ValueFunction bellman_T_rule(const MdpModel& m, const RiskMeasure& rm, const ValueFunction& v,
                             std::span<const ActionIndex> rule,
                             std::optional<std::size_t> stage = std::nullopt);

/// Actions of D(x) whose value is within kTieTolerance of the minimum.
std::vector<ActionIndex> argmin_set(const MdpModel& m, const RiskMeasure& rm,
                                    const ValueFunction& v, StateIndex x,
                                    std::optional<std::size_t> stage = std::nullopt);

/// max_x |v1(x) - v2(x)| / b(x). Throws Error{DimensionMismatch}, and
/// Error{DomainError} if some b(x) < 1.
double weighted_norm(const ValueFunction& v1, const ValueFunction& v2, std::span<const double> b);

/// True when `value` is within the tie tolerance of `best`.
inline bool within_tie(double value, double best) noexcept {
  const double scale = std::max(1.0, std::abs(best));
  return value <= best + kTieTolerance * scale;
}

}  // namespace riskmdp
