#include "riskmdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskmdp/error.hpp"

namespace riskmdp {

MdpModel::MdpModel(std::size_t n_states, std::size_t n_actions,
                   std::vector<double> disturbance_probs)
    : n_states_(n_states),
      n_actions_(n_actions),
      disturbance_probs_(std::move(disturbance_probs)),
      admissible_(n_states),
      transition_(n_states * n_actions * disturbance_probs_.size(), 0),
      cost_(transition_.size(), 0.0),
      terminal_cost_(n_states, 0.0) {}

bool MdpModel::is_admissible(StateIndex x, ActionIndex a) const {
  if (x >= n_states_) return false;
  const auto& d = admissible_[x];
  return std::find(d.begin(), d.end(), a) != d.end();
}

std::string to_string(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::Kind::EmptyAdmissibleSet: return "EmptyAdmissibleSet";
    case Diagnostic::Kind::BadAction: return "BadAction";
    case Diagnostic::Kind::BadTransition: return "BadTransition";
    case Diagnostic::Kind::NonFiniteCost: return "NonFiniteCost";
    case Diagnostic::Kind::BadDisturbance: return "BadDisturbance";
    case Diagnostic::Kind::BadDiscount: return "BadDiscount";
    case Diagnostic::Kind::BadTerminalCost: return "BadTerminalCost";
    case Diagnostic::Kind::LabelsNotIncreasing: return "LabelsNotIncreasing";
    case Diagnostic::Kind::DimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

std::string to_string(const Diagnostic& d) {
  std::ostringstream os;
  os << to_string(d.kind) << '{';
  const char* sep = "";
  if (d.stage) os << sep << "n=" << *d.stage, sep = ",";
  if (d.state) os << sep << "x=" << *d.state, sep = ",";
  if (d.action) os << sep << "a=" << *d.action, sep = ",";
  if (d.disturbance) os << sep << "z=" << *d.disturbance, sep = ",";
  os << '}';
  if (!d.message.empty()) os << ": " << d.message;
  return os.str();
}

std::vector<Diagnostic> validate_model(const MdpModel& m) {
  using Kind = Diagnostic::Kind;
  std::vector<Diagnostic> out;
  const auto report = [&](Kind k, std::optional<StateIndex> x, std::optional<ActionIndex> a,
                          std::optional<DisturbanceIndex> z, std::string msg) {
    out.push_back(Diagnostic{k, x, a, z, std::nullopt, std::move(msg)});
  };

  if (m.n_states() == 0) report(Kind::DimensionMismatch, {}, {}, {}, "model has no states");
  if (m.n_actions() == 0) report(Kind::DimensionMismatch, {}, {}, {}, "model has no actions");

  const auto& probs = m.disturbance_probs();
  if (probs.empty()) {
    report(Kind::BadDisturbance, {}, {}, {}, "disturbance law has no outcomes");
  } else {
    double total = 0.0;
    for (std::size_t z = 0; z < probs.size(); ++z) {
      if (!(probs[z] >= 0.0) || !std::isfinite(probs[z])) {
        report(Kind::BadDisturbance, {}, {}, z, "probability negative or not finite");
      }
      total += probs[z];
    }
    if (std::abs(total - 1.0) > 1e-9) {
      report(Kind::BadDisturbance, {}, {}, {}, "probabilities sum to " + std::to_string(total));
    }
  }
  if (!m.disturbance_labels().empty() && m.disturbance_labels().size() != probs.size()) {
    report(Kind::DimensionMismatch, {}, {}, {}, "disturbance labels do not match outcomes");
  }

  if (!(m.discount() > 0.0 && m.discount() <= 1.0)) {
    report(Kind::BadDiscount, {}, {}, {}, "discount must lie in (0, 1]");
  }

  if (m.terminal_cost().size() != m.n_states()) {
    report(Kind::DimensionMismatch, {}, {}, {}, "terminal cost length differs from state count");
  } else {
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      if (!std::isfinite(m.terminal_cost()[x])) {
        report(Kind::BadTerminalCost, x, {}, {}, "terminal cost not finite");
      }
    }
  }

  const auto& labels = m.state_labels();
  if (!labels.empty()) {
    if (labels.size() != m.n_states()) {
      report(Kind::DimensionMismatch, {}, {}, {}, "state labels do not match state count");
    } else {
      for (StateIndex x = 1; x < labels.size(); ++x) {
        if (!(labels[x] > labels[x - 1])) {
          report(Kind::LabelsNotIncreasing, x, {}, {}, "state labels must strictly increase");
        }
      }
    }
  }

  const std::size_t table_size = m.n_states() * m.n_actions() * m.n_disturbances();
  for (std::size_t n = 0; n < m.stage_costs().size(); ++n) {
    if (m.stage_costs()[n].size() != table_size) {
      out.push_back(Diagnostic{Kind::DimensionMismatch, {}, {}, {}, n,
                               "stage cost table has the wrong size"});
    }
  }

  for (StateIndex x = 0; x < m.n_states(); ++x) {
    const auto& d = m.admissible(x);
    if (d.empty()) {
      report(Kind::EmptyAdmissibleSet, x, {}, {}, "no admissible action");
      continue;
    }
    for (const ActionIndex a : d) {
      if (a >= m.n_actions()) {
        report(Kind::BadAction, x, a, {}, "action index out of range");
        continue;
      }
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) {
        const StateIndex target = m.transition(x, a, z);
        if (target >= m.n_states()) {
          report(Kind::BadTransition, x, a, z,
                 target == kInvalidState ? "target out of range"
                                         : "target " + std::to_string(target) + " out of range");
        }
        if (!std::isfinite(m.cost(x, a, z))) {
          report(Kind::NonFiniteCost, x, a, z, "cost not finite");
        }
        for (std::size_t n = 0; n < m.stage_costs().size(); ++n) {
          if (m.stage_costs()[n].size() == table_size && !std::isfinite(m.cost(n, x, a, z))) {
            out.push_back(Diagnostic{Kind::NonFiniteCost, x, a, z, n, "stage cost not finite"});
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> monotone_model_violations(const MdpModel& m) {
  std::vector<std::string> out;
  const auto& labels = m.state_labels();
  if (labels.size() != m.n_states()) {
    out.emplace_back("monotone models need one label per state");
    return out;
  }
  for (StateIndex x = 1; x < m.n_states(); ++x) {
    if (!(labels[x] > labels[x - 1])) {
      out.push_back("labels not strictly increasing at state " + std::to_string(x));
    }
  }
  const std::size_t stages = std::max<std::size_t>(1, m.stage_costs().size());
  for (StateIndex y = 1; y < m.n_states(); ++y) {
    const StateIndex x = y - 1;
    if (m.terminal_cost()[x] > m.terminal_cost()[y]) {
      out.push_back("terminal cost decreases between states " + std::to_string(x) + " and " +
                    std::to_string(y));
    }
    for (const ActionIndex a : m.admissible(y)) {
      if (!m.is_admissible(x, a)) {
        out.push_back("D(" + std::to_string(y) + ") not contained in D(" + std::to_string(x) + ")");
        continue;
      }
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) {
        if (labels[m.transition(x, a, z)] > labels[m.transition(y, a, z)]) {
          out.push_back("transition decreases in the state at (x=" + std::to_string(y) +
                        ",a=" + std::to_string(a) + ",z=" + std::to_string(z) + ")");
        }
        for (std::size_t n = 0; n < stages; ++n) {
          if (m.cost(n, x, a, z) > m.cost(n, y, a, z)) {
            out.push_back("cost decreases in the state at (x=" + std::to_string(y) +
                          ",a=" + std::to_string(a) + ",z=" + std::to_string(z) + ")");
          }
        }
      }
    }
  }
  return out;
}

void check_policy(const MdpModel& m, const Policy& pi, std::size_t horizon) {
  if (pi.stages.empty() || (!pi.stationary && pi.stages.size() < horizon)) {
    throw Error(ErrorCode::InfeasiblePolicy, "policy has fewer decision rules than stages");
  }
  const std::size_t rules = pi.stationary ? 1 : horizon;
  for (std::size_t n = 0; n < rules; ++n) {
    const auto& rule = pi.stages[n];
    if (rule.size() != m.n_states()) {
      throw Error(ErrorCode::InfeasiblePolicy, "decision rule " + std::to_string(n) +
                                                   " does not cover every state");
    }
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      if (!m.is_admissible(x, rule[x])) {
        throw Error(ErrorCode::InfeasiblePolicy,
                    "rule " + std::to_string(n) + " picks inadmissible action " +
                        std::to_string(rule[x]) + " in state " + std::to_string(x));
      }
    }
  }
}

}  // namespace riskmdp
