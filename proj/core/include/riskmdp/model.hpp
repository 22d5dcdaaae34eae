#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace riskmdp {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;
using DisturbanceIndex = std::size_t;

/// Sentinel used by parsers for a transition target that cannot be
/// represented (e.g. negative in the input file).
inline constexpr StateIndex kInvalidState = std::numeric_limits<StateIndex>::max();

/// Finite decision model with tabulated dynamics.
///
/// Tables are dense over (state, action, disturbance); entries for actions
/// outside D(x) are ignored. `cost(x, a, z)` is the cost of the realized
/// transition to `transition(x, a, z)`.
class MdpModel {
 public:
  MdpModel() = default;
  MdpModel(std::size_t n_states, std::size_t n_actions, std::vector<double> disturbance_probs);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t n_disturbances() const noexcept { return disturbance_probs_.size(); }

  const std::vector<double>& disturbance_probs() const noexcept { return disturbance_probs_; }
  /// Optional real value per disturbance index; empty when absent.
  const std::vector<double>& disturbance_labels() const noexcept { return disturbance_labels_; }
  void set_disturbance_labels(std::vector<double> labels) { disturbance_labels_ = std::move(labels); }

  /// Optional real label per state (monotone-model mode); empty when absent.
  const std::vector<double>& state_labels() const noexcept { return state_labels_; }
  void set_state_labels(std::vector<double> labels) { state_labels_ = std::move(labels); }
  bool has_state_labels() const noexcept { return !state_labels_.empty(); }

  const std::vector<ActionIndex>& admissible(StateIndex x) const { return admissible_.at(x); }
  void set_admissible(StateIndex x, std::vector<ActionIndex> actions) {
    admissible_.at(x) = std::move(actions);
  }
  bool is_admissible(StateIndex x, ActionIndex a) const;

  StateIndex transition(StateIndex x, ActionIndex a, DisturbanceIndex z) const {
    return transition_[flat(x, a, z)];
  }
  void set_transition(StateIndex x, ActionIndex a, DisturbanceIndex z, StateIndex target) {
    transition_[flat(x, a, z)] = target;
  }

  /// Stationary cost table.
  double cost(StateIndex x, ActionIndex a, DisturbanceIndex z) const {
    return cost_[flat(x, a, z)];
  }
  /// Stage-`n` cost: the per-stage table when present, otherwise the
  /// stationary one.
  double cost(std::size_t stage, StateIndex x, ActionIndex a, DisturbanceIndex z) const {
    if (stage < stage_costs_.size()) return stage_costs_[stage][flat(x, a, z)];
    return cost_[flat(x, a, z)];
  }
  void set_cost(StateIndex x, ActionIndex a, DisturbanceIndex z, double c) {
    cost_[flat(x, a, z)] = c;
  }
  /// Per-stage cost tables for non-stationary finite horizons. Each table has
  /// the layout of the stationary one; see `flat`.
  const std::vector<std::vector<double>>& stage_costs() const noexcept { return stage_costs_; }
  void set_stage_costs(std::vector<std::vector<double>> tables) { stage_costs_ = std::move(tables); }

  const std::vector<double>& terminal_cost() const noexcept { return terminal_cost_; }
  void set_terminal_cost(std::vector<double> c) { terminal_cost_ = std::move(c); }

  double discount() const noexcept { return discount_; }
  void set_discount(double beta) noexcept { discount_ = beta; }

  std::size_t flat(StateIndex x, ActionIndex a, DisturbanceIndex z) const noexcept {
    return (x * n_actions_ + a) * disturbance_probs_.size() + z;
  }
  const std::vector<StateIndex>& transition_table() const noexcept { return transition_; }
  const std::vector<double>& cost_table() const noexcept { return cost_; }

  bool operator==(const MdpModel&) const = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> disturbance_probs_;
  std::vector<double> disturbance_labels_;
  std::vector<double> state_labels_;
  std::vector<std::vector<ActionIndex>> admissible_;
  std::vector<StateIndex> transition_;
  std::vector<double> cost_;
  std::vector<std::vector<double>> stage_costs_;
  std::vector<double> terminal_cost_;
  double discount_ = 1.0;
};

struct Diagnostic {
  enum class Kind {
    EmptyAdmissibleSet,
    BadAction,
    BadTransition,
    NonFiniteCost,
    BadDisturbance,
    BadDiscount,
    BadTerminalCost,
    LabelsNotIncreasing,
    DimensionMismatch,
  };
  Kind kind;
  std::optional<StateIndex> state;
  std::optional<ActionIndex> action;
  std::optional<DisturbanceIndex> disturbance;
  std::optional<std::size_t> stage;
  std::string message;
};

std::string to_string(Diagnostic::Kind kind);
/// e.g. "BadTransition{x=1,a=0,z=2}: target 7 out of range".
std::string to_string(const Diagnostic& d);

/// Empty iff every model invariant holds.
std::vector<Diagnostic> validate_model(const MdpModel& m);

/// Monotone-model conditions used by value-monotonicity results: state labels
/// strictly increasing, D(y) subset of D(x) for x < y, transitions increasing
/// in the state, stage costs increasing in the state along every (a, z), and
/// terminal cost increasing. Returns one message per violation.
std::vector<std::string> monotone_model_violations(const MdpModel& m);

struct ValueFunction {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](StateIndex x) const { return values[x]; }
  double& operator[](StateIndex x) { return values[x]; }
  bool operator==(const ValueFunction&) const = default;
};

/// Markov policy: one decision rule per stage. A stationary policy holds a
/// single rule applied at every stage.
struct Policy {
  std::vector<std::vector<ActionIndex>> stages;
  bool stationary = false;

  static Policy stationary_rule(std::vector<ActionIndex> rule) { return {{std::move(rule)}, true}; }
  const std::vector<ActionIndex>& rule(std::size_t stage) const {
    return stationary ? stages.front() : stages.at(stage);
  }
  bool operator==(const Policy&) const = default;
};

/// Throws Error{InfeasiblePolicy} unless every used rule picks from D(x).
void check_policy(const MdpModel& m, const Policy& pi, std::size_t horizon);

}  // namespace riskmdp
