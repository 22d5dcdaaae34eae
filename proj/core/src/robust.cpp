#include "riskmdp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskmdp/bellman.hpp"
#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

double robust_L(const MdpModel& m, const DualSet& ds, const ValueFunction& v, StateIndex x,
                ActionIndex a, std::optional<std::size_t> stage) {
  const std::size_t nz = m.n_disturbances();
  std::vector<double> values(nz);
  for (DisturbanceIndex z = 0; z < nz; ++z) {
    const double c = stage ? m.cost(*stage, x, a, z) : m.cost(x, a, z);
    values[z] = c + m.discount() * v[m.transition(x, a, z)];
  }
  const auto q = ds.maximizer(values, m.disturbance_probs());
  double out = 0.0;
  for (DisturbanceIndex z = 0; z < nz; ++z) out += q[z] * values[z];
  return out;
}

struct RobustUpdate {
  ValueFunction value;
  std::vector<ActionIndex> action;
};

RobustUpdate robust_T(const MdpModel& m, const DualSet& ds, const ValueFunction& v,
                      std::optional<std::size_t> stage) {
  RobustUpdate out{ValueFunction{std::vector<double>(m.n_states())},
                   std::vector<ActionIndex>(m.n_states())};
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    const auto& actions = m.admissible(x);
    std::vector<double> values(actions.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < actions.size(); ++k) {
      values[k] = robust_L(m, ds, v, x, actions[k], stage);
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

void require_valid(const MdpModel& m) {
  const auto diags = validate_model(m);
  if (!diags.empty()) throw Error(ErrorCode::InvalidModel, to_string(diags.front()));
}

}  // namespace

DualSet::DualSet(RiskMeasure rm) : rm_(std::move(rm)) {
  if (!rm_.is_coherent()) {
    throw Error(ErrorCode::NotCoherent, rm_.describe() + " has no dual set: not coherent");
  }
}

std::vector<double> DualSet::maximizer(std::span<const double> values,
                                       std::span<const double> probs) const {
  return dual_weights(rm_, values, probs);
}

bool DualSet::admissible(std::span<const double> q, std::span<const double> p, double tol) const {
  if (q.size() != p.size()) throw Error(ErrorCode::LengthMismatch, "density and law differ");
  double total = 0.0;
  for (double e : q) {
    if (!(e >= -tol)) return false;
    total += e;
  }
  if (std::abs(total - 1.0) > tol * static_cast<double>(q.size() + 1)) return false;

  if (std::holds_alternative<RiskMeasure::Expectation>(rm_.kind())) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (std::abs(q[i] - p[i]) > tol) return false;
    }
    return true;
  }
  if (const auto* es = std::get_if<RiskMeasure::ExpectedShortfall>(&rm_.kind())) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] > p[i] / (1.0 - es->level) + tol) return false;
    }
    return true;
  }
  const std::size_t n = q.size();
  if (n > 20) throw Error(ErrorCode::TooLargeForEnumeration, "subset check beyond 20 outcomes");
  std::vector<double> indicator(n);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double qa = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      indicator[i] = (mask >> i) & 1u ? 1.0 : 0.0;
      qa += indicator[i] * q[i];
    }
    const double cap = evaluate(rm_, DiscreteDistribution::make(indicator, p));
    if (qa > cap + tol) return false;
  }
  return true;
}

std::vector<ValueFunction> nature_best_response(const MdpModel& m, const DualSet& ds,
                                                const Policy& pi, std::size_t horizon) {
  require_valid(m);
  check_policy(m, pi, horizon);
  std::vector<ValueFunction> w(horizon + 1);
  w[horizon] = ValueFunction{m.terminal_cost()};
  for (std::size_t n = horizon; n-- > 0;) {
    w[n].values.resize(m.n_states());
    const auto& rule = pi.rule(n);
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      w[n][x] = robust_L(m, ds, w[n + 1], x, rule[x], n);
    }
  }
  return w;
}

GameResult robust_game_value(const MdpModel& m, const DualSet& ds, std::size_t horizon) {
  require_valid(m);
  if (horizon == 0) throw Error(ErrorCode::InvalidSpec, "horizon must be at least 1");
  GameResult r;
  r.values.resize(horizon + 1);
  r.values[horizon] = ValueFunction{m.terminal_cost()};
  r.policy.stages.resize(horizon);
  for (std::size_t n = horizon; n-- > 0;) {
    auto update = robust_T(m, ds, r.values[n + 1], n);
    r.values[n] = std::move(update.value);
    r.policy.stages[n] = std::move(update.action);
  }
  return r;
}

double markov_policy_count(const MdpModel& m, std::size_t horizon) {
  double per_stage = 1.0;
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    per_stage *= static_cast<double>(m.admissible(x).size());
  }
  return std::pow(per_stage, static_cast<double>(horizon));
}

EquivalenceReport verify_equivalence(const MdpModel& m, const RiskMeasure& rm,
                                     std::size_t horizon, double tol, bool enumerate) {
  const DualSet ds(rm);
  EquivalenceReport r;
  r.horizon = horizon;
  r.tol = tol;
  const double count = markov_policy_count(m, horizon);
  if (enumerate && count > kEnumerationLimit) {
    throw Error(ErrorCode::TooLargeForEnumeration,
                std::to_string(count) + " Markov policies exceed the enumeration limit");
  }

  const auto recursive = solve_finite(m, rm, horizon);
  const auto game = robust_game_value(m, ds, horizon);
  for (std::size_t n = 0; n <= horizon; ++n) {
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      r.dp_gap = std::max(r.dp_gap, std::abs(recursive.values[n][x] - game.values[n][x]));
    }
  }
  r.ok = r.dp_gap <= tol;
  if (!enumerate) return r;

  const std::size_t ns = m.n_states();
  std::vector<std::size_t> digit(horizon * ns, 0);
  Policy pi;
  pi.stages.assign(horizon, std::vector<ActionIndex>(ns));
  std::vector<double> best(ns, std::numeric_limits<double>::infinity());
  bool interchange = true;
  for (;;) {
    for (std::size_t n = 0; n < horizon; ++n) {
      for (StateIndex x = 0; x < ns; ++x) pi.stages[n][x] = m.admissible(x)[digit[n * ns + x]];
    }
    const auto w = nature_best_response(m, ds, pi, horizon);
    for (StateIndex x = 0; x < ns; ++x) {
      best[x] = std::min(best[x], w[0][x]);
      if (game.values[0][x] > w[0][x] + tol) interchange = false;
    }
    ++r.policies;
    std::size_t i = 0;
    for (; i < digit.size(); ++i) {
      if (++digit[i] < m.admissible(i % ns).size()) break;
      digit[i] = 0;
    }
    if (i == digit.size()) break;
  }
  double gap = 0.0;
  for (StateIndex x = 0; x < ns; ++x) {
    gap = std::max(gap, std::abs(best[x] - recursive.values[0][x]));
    gap = std::max(gap, std::abs(best[x] - game.values[0][x]));
  }
  r.enumerated = true;
  r.enumeration_gap = gap;
  r.interchange_ok = interchange;
  r.ok = r.ok && gap <= tol && interchange;
  return r;
}

InfiniteSolveResult robust_value_iteration(const MdpModel& m, const DualSet& ds,
                                           const BoundingSpec& spec, const InfiniteOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tolerance must be positive");
  require_valid(m);
  const double modulus = spec.alpha * m.discount();
  if (modulus >= 1.0) {
    throw Error(ErrorCode::NotContractive,
                "alpha * beta = " + std::to_string(modulus) + " is not below 1");
  }
  if (!m.stage_costs().empty() ||
      std::any_of(m.terminal_cost().begin(), m.terminal_cost().end(),
                  [](double c) { return c != 0.0; })) {
    throw Error(ErrorCode::PreconditionViolated,
                "infinite horizon needs stationary costs and zero terminal cost");
  }
  const auto bounds = verify_bounds(m, ds.measure(), spec);
  if (!bounds.ok) throw Error(ErrorCode::PreconditionViolated, "bounds do not verify");

  InfiniteSolveResult r;
  r.modulus = modulus;
  const std::size_t max_iter = opts.max_iter.value_or(default_max_iter(opts.tol, modulus));
  ValueFunction v = opts.start.value_or(ValueFunction{std::vector<double>(m.n_states(), 0.0)});
  for (std::size_t k = 1; k <= max_iter; ++k) {
    auto next = robust_T(m, ds, v, std::nullopt);
    r.residual = weighted_norm(next.value, v, bounds.weight);
    r.error_bound = modulus * r.residual / (1.0 - modulus);
    r.iterations = k;
    r.trace.push_back({k, r.residual, r.error_bound});
    v = std::move(next.value);
    if (r.error_bound <= opts.tol) {
      r.converged = true;
      break;
    }
  }
  r.policy = Policy::stationary_rule(robust_T(m, ds, v, std::nullopt).action);
  r.value = std::move(v);
  return r;
}

InfiniteEquivalenceReport verify_equivalence_infinite(const MdpModel& m, const RiskMeasure& rm,
                                                      const BoundingSpec& spec, double tol) {
  const DualSet ds(rm);
  InfiniteOptions opts;
  opts.tol = tol;
  const auto recursive = solve_infinite(m, rm, spec, opts);
  const auto robust = robust_value_iteration(m, ds, spec, opts);
  InfiniteEquivalenceReport r;
  r.gap = weighted_norm(recursive.value, robust.value, spec.weight());
  r.allowed = tol + recursive.error_bound + robust.error_bound;
  r.ok = recursive.converged && robust.converged && r.gap <= r.allowed;
  return r;
}

}  // namespace riskmdp
