#include "riskmdp/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskmdp/error.hpp"

namespace riskmdp {

DiscreteDistribution stage_law(const MdpModel& m, const ValueFunction& v, StateIndex x,
                               ActionIndex a, std::optional<std::size_t> stage) {
  if (!m.is_admissible(x, a)) {
    throw Error(ErrorCode::InfeasibleAction,
                "action " + std::to_string(a) + " not admissible in state " + std::to_string(x));
  }
  const std::size_t nz = m.n_disturbances();
  const double beta = m.discount();
  std::vector<double> outcomes(nz);
  for (DisturbanceIndex z = 0; z < nz; ++z) {
    const double c = stage ? m.cost(*stage, x, a, z) : m.cost(x, a, z);
    outcomes[z] = c + beta * v[m.transition(x, a, z)];
  }
  return DiscreteDistribution::make(outcomes, m.disturbance_probs());
}

double bellman_L(const MdpModel& m, const RiskMeasure& rm, const ValueFunction& v, StateIndex x,
                 ActionIndex a, std::optional<std::size_t> stage) {
  return evaluate(rm, stage_law(m, v, x, a, stage));
}

BellmanUpdate bellman_T(const MdpModel& m, const RiskMeasure& rm, const ValueFunction& v,
                        std::optional<std::size_t> stage) {
  BellmanUpdate out{ValueFunction{std::vector<double>(m.n_states())},
                    std::vector<ActionIndex>(m.n_states())};
  std::vector<double> values;
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    const auto& actions = m.admissible(x);
    values.resize(actions.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < actions.size(); ++k) {
      values[k] = bellman_L(m, rm, v, x, actions[k], stage);
      best = std::min(best, values[k]);
    }
    ActionIndex chosen = std::numeric_limits<ActionIndex>::max();
    for (std::size_t k = 0; k < actions.size(); ++k) {
      if (within_tie(values[k], best)) chosen = std::min(chosen, actions[k]);
    }
    out.value[x] = best;
    out.action[x] = chosen;
  }
  return out;
}

ValueFunction bellman_T_rule(const MdpModel& m, const RiskMeasure& rm, const ValueFunction& v,
                             std::span<const ActionIndex> rule, std::optional<std::size_t> stage) {
  if (rule.size() != m.n_states()) {
    throw Error(ErrorCode::DimensionMismatch, "decision rule does not cover every state");
  }
  ValueFunction out{std::vector<double>(m.n_states())};
  for (StateIndex x = 0; x < m.n_states(); ++x) out[x] = bellman_L(m, rm, v, x, rule[x], stage);
  return out;
}

std::vector<ActionIndex> argmin_set(const MdpModel& m, const RiskMeasure& rm,
                                    const ValueFunction& v, StateIndex x,
                                    std::optional<std::size_t> stage) {
  const auto& actions = m.admissible(x);
  std::vector<double> values(actions.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < actions.size(); ++k) {
    values[k] = bellman_L(m, rm, v, x, actions[k], stage);
    best = std::min(best, values[k]);
  }
  std::vector<ActionIndex> out;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (within_tie(values[k], best)) out.push_back(actions[k]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double weighted_norm(const ValueFunction& v1, const ValueFunction& v2, std::span<const double> b) {
  if (v1.size() != v2.size() || v1.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "value functions and weight differ in length");
  }
  double out = 0.0;
  for (std::size_t x = 0; x < b.size(); ++x) {
    if (!(b[x] >= 1.0)) throw Error(ErrorCode::DomainError, "weight b(x) must be at least 1");
    out = std::max(out, std::abs(v1[x] - v2[x]) / b[x]);
  }
  return out;
}

}  // namespace riskmdp
