#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riskmdp/model.hpp"
#include "riskmdp/risk_measure.hpp"

namespace riskmdp {

enum class BoundingMode {
  /// Coherent rho; lower and upper local bounds with growth rate alpha.
  Coherent,
  /// Monotone model with a positive homogeneous, comonotonic additive rho.
  ComonotoneMonotone,
  /// Constant lower bound on the cost, increasing upper bound, alpha >= 1.
  BoundedBelow,
  /// Constant bounds on the cost itself, alpha = 1, any monetary rho.
  BoundedCost,
};

std::string to_string(BoundingMode mode);
/// Inverse of to_string; throws Error{InvalidSpec}.
BoundingMode bounding_mode_from_string(const std::string& name);

/// Local bounding functions lb <= -eps_lower and ub >= eps_upper with
/// eps_lower + eps_upper = 1, so that b = ub - lb >= 1.
struct BoundingSpec {
  std::vector<double> lb;
  std::vector<double> ub;
  double eps_lower = 0.5;
  double eps_upper = 0.5;
  double alpha = 1.0;
  BoundingMode mode = BoundingMode::Coherent;

  /// Constant bounds -(K + eps_lower), K + eps_upper.
  static BoundingSpec constant(std::size_t n_states, double k, double alpha, BoundingMode mode);
  std::vector<double> weight() const;
};

/// Throws Error{PreconditionViolated} if the spec is malformed or does not
/// fit the model.
void check_spec(const MdpModel& m, const BoundingSpec& spec);

struct BoundViolation {
  StateIndex state;
  std::optional<ActionIndex> action;
  std::optional<DisturbanceIndex> disturbance;
  std::string condition;
  double lhs;
  double rhs;
};

struct BoundsReport {
  BoundingMode mode;
  double alpha;
  double modulus;  // alpha * beta
  bool ok = false;
  std::vector<BoundViolation> violations;
  /// lb <= c_N <= ub; informational, not part of `ok`.
  bool terminal_within = true;
  /// Present when ok and alpha * beta < 1.
  std::optional<std::vector<double>> global_lb;
  std::optional<std::vector<double>> global_ub;
  /// ub - lb.
  std::vector<double> weight;
};

/// Checks the mode's local bounding inequalities for every admissible pair
/// and, when they hold and alpha * beta < 1, emits lb/(1-alpha*beta) and
/// ub/(1-alpha*beta). Stage cost tables are checked alongside the
/// stationary one.
///
/// Throws Error{PreconditionViolated} for a malformed spec, for a risk
/// measure the mode does not cover, and for alpha * beta >= 1 in the
/// Coherent and ComonotoneMonotone modes.
BoundsReport verify_bounds(const MdpModel& m, const RiskMeasure& rm, const BoundingSpec& spec);

/// Smallest alpha for which the growth inequalities of `spec.mode` hold with
/// the spec's lb/ub (infinity if none does). BoundedBelow results are
/// clamped to at least 1; BoundedCost always returns 1.
double minimal_alpha(const MdpModel& m, const RiskMeasure& rm, const BoundingSpec& spec);

}  // namespace riskmdp
