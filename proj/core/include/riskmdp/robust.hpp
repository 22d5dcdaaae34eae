#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "riskmdp/bounds.hpp"
#include "riskmdp/model.hpp"
#include "riskmdp/risk_measure.hpp"
#include "riskmdp/solvers.hpp"

namespace riskmdp {

/// Nature's set of reweightings of the disturbance law induced by a coherent
/// risk measure: densities q with Q(A) <= rho(1_A) for every event A.
class DualSet {
 public:
  /// Throws Error{NotCoherent}.
  explicit DualSet(RiskMeasure rm);

  const RiskMeasure& measure() const noexcept { return rm_; }

  /// Maximizing reweighting for outcome `values` under `probs`.
  std::vector<double> maximizer(std::span<const double> values,
                                std::span<const double> probs) const;

  /// Whether q (one entry per outcome) lies in the set for base law p, up to
  /// `tol`. Uses the closed-form cap for expectation and ES and subset
  /// enumeration otherwise (Error{TooLargeForEnumeration} beyond 20 outcomes).
  bool admissible(std::span<const double> q, std::span<const double> p, double tol = 1e-12) const;

 private:
  RiskMeasure rm_;
};

/// Adversary DP for a fixed policy: W_N = c_N and
/// W_n(x) = max_q sum_z q_z (c + beta W_{n+1})(x, d_n(x), z).
/// Returns W_0..W_N. Throws Error{InfeasiblePolicy}.
std::vector<ValueFunction> nature_best_response(const MdpModel& m, const DualSet& ds,
                                                const Policy& pi, std::size_t horizon);

struct GameResult {
  /// G_0..G_N.
  std::vector<ValueFunction> values;
  Policy policy;
};

/// Minimax DP: G_n(x) = min_a max_q sum_z q_z (c + beta G_{n+1})(x, a, z),
/// ties to the smallest action index.
GameResult robust_game_value(const MdpModel& m, const DualSet& ds, std::size_t horizon);

inline constexpr double kEnumerationLimit = 1e6;

/// Number of Markov policies over `horizon` stages, as a double.
double markov_policy_count(const MdpModel& m, std::size_t horizon);

struct EquivalenceReport {
  std::size_t horizon = 0;
  double tol = 0.0;
  /// max over stages and states of |J_n - G_n|.
  double dp_gap = 0.0;
  bool enumerated = false;
  std::size_t policies = 0;
  /// max over states of |min_pi W_0^pi - J_0| and |min_pi W_0^pi - G_0|.
  std::optional<double> enumeration_gap;
  /// Interchange bound G_0 <= W_0^pi held for every enumerated policy.
  std::optional<bool> interchange_ok;
  bool ok = false;
};

/// Compares the recursive value (solve_finite), the minimax DP and, when
/// `enumerate` is set, the pointwise minimum of nature's best responses over
/// all Markov policies.
/// Throws Error{NotCoherent} and Error{TooLargeForEnumeration} (more than
/// kEnumerationLimit policies with `enumerate` set).
EquivalenceReport verify_equivalence(const MdpModel& m, const RiskMeasure& rm,
                                     std::size_t horizon, double tol, bool enumerate);

/// Value iteration with the minimax operator; same stopping rule and
/// preconditions as solve_infinite.
InfiniteSolveResult robust_value_iteration(const MdpModel& m, const DualSet& ds,
                                           const BoundingSpec& spec,
                                           const InfiniteOptions& opts = {});

struct InfiniteEquivalenceReport {
  /// ||J - G||_b between the two fixed-point approximations.
  double gap = 0.0;
  /// tol plus both error bounds.
  double allowed = 0.0;
  bool ok = false;
};

InfiniteEquivalenceReport verify_equivalence_infinite(const MdpModel& m, const RiskMeasure& rm,
                                                      const BoundingSpec& spec, double tol);

}  // namespace riskmdp
