#include "riskmdp/examples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "riskmdp/bellman.hpp"
#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(ErrorCode::InvalidParams, msg);
}

void require_law(std::span<const double> probs, std::size_t n, const std::string& what) {
  require(probs.size() == n && n > 0, what + ": law and support differ in length");
  double total = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, what + ": probabilities must lie in [0,1]");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-9, what + ": probabilities must sum to one");
}

void require_discount(double beta) {
  require(beta > 0.0 && beta <= 1.0, "discount must lie in (0, 1]");
}

}  // namespace

// ---- House selling -------------------------------------------------------

MdpModel build_house_selling(const HouseSellingParams& params) {
  const std::size_t k = params.offers.size();
  require(k > 0, "house selling needs at least one offer");
  require_law(params.offer_probs, k, "offer law");
  for (std::size_t i = 0; i < k; ++i) {
    require(std::isfinite(params.offers[i]), "offers must be finite");
    require(i == 0 || params.offers[i] > params.offers[i - 1], "offers must increase strictly");
  }
  require(std::isfinite(params.rent), "rent must be finite");
  require_discount(params.discount);
  require(params.horizon >= 1, "horizon must be at least 1");

  const StateIndex sold = k;
  MdpModel m(k + 1, 2, params.offer_probs);
  for (StateIndex x = 0; x < k; ++x) {
    m.set_admissible(x, {kStop, kContinue});
    for (DisturbanceIndex z = 0; z < k; ++z) {
      m.set_transition(x, kStop, z, sold);
      m.set_cost(x, kStop, z, params.offers[x]);
      m.set_transition(x, kContinue, z, z);
      m.set_cost(x, kContinue, z, params.rent);
    }
  }
  m.set_admissible(sold, {kStop});
  for (DisturbanceIndex z = 0; z < k; ++z) m.set_transition(sold, kStop, z, sold);
  std::vector<double> terminal(params.offers);
  terminal.push_back(0.0);
  m.set_terminal_cost(std::move(terminal));
  m.set_discount(params.discount);
  m.set_disturbance_labels(params.offers);
  return m;
}

std::vector<double> house_selling_thresholds(const HouseSellingParams& params,
                                             std::span<const RiskMeasure> rms,
                                             const FiniteSolveResult& result) {
  const std::size_t horizon = result.policy.stages.size();
  require(rms.size() == 1 || rms.size() == horizon, "expected one risk measure per stage");
  std::vector<double> t(horizon);
  std::vector<double> next(params.offers.size());
  for (std::size_t n = 0; n < horizon; ++n) {
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = params.discount * result.values[n + 1][i];
    }
    const auto& rm = rms.size() == 1 ? rms[0] : rms[n];
    t[n] = params.rent + evaluate(rm, DiscreteDistribution::make(next, params.offer_probs));
  }
  return t;
}

ThresholdResult extract_threshold(std::span<const ActionIndex> rule,
                                  std::span<const double> labels, ActionIndex stop) {
  if (rule.size() != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rule and labels differ in length");
  }
  std::vector<StateIndex> order(rule.size());
  for (StateIndex x = 0; x < order.size(); ++x) order[x] = x;
  std::stable_sort(order.begin(), order.end(),
                   [&](StateIndex a, StateIndex b) { return labels[a] < labels[b]; });

  ThresholdResult r;
  r.threshold = -std::numeric_limits<double>::infinity();
  std::optional<StateIndex> first_continue;
  for (StateIndex x : order) {
    if (rule[x] == stop) {
      if (first_continue) {
        r.witness = first_continue;
        return r;
      }
      r.threshold = labels[x];
    } else if (!first_continue) {
      first_continue = x;
    }
  }
  r.is_threshold = true;
  return r;
}

// ---- Casino --------------------------------------------------------------

MdpModel build_casino(const CasinoParams& params) {
  require(params.p >= 0.0 && params.p <= 1.0, "p must lie in [0, 1]");
  require(params.horizon >= 1 && params.horizon <= 20, "horizon must lie in 1..20");
  require(params.max_capital >= 1, "max capital must be positive");
  const std::size_t top = (std::size_t{1} << params.horizon) * params.max_capital;
  require(top <= 1u << 16, "capital grid too large");

  MdpModel m(top + 1, top / 2 + 1, {1.0 - params.p, params.p});
  std::vector<double> labels(top + 1), terminal(top + 1);
  for (StateIndex x = 0; x <= top; ++x) {
    labels[x] = static_cast<double>(x);
    terminal[x] = -static_cast<double>(x);
    const std::size_t max_bet = std::min(x, top - x);
    std::vector<ActionIndex> bets(max_bet + 1);
    for (ActionIndex a = 0; a <= max_bet; ++a) {
      bets[a] = a;
      m.set_transition(x, a, 0, x - a);
      m.set_transition(x, a, 1, x + a);
    }
    m.set_admissible(x, std::move(bets));
  }
  m.set_state_labels(std::move(labels));
  m.set_disturbance_labels({-1.0, 1.0});
  m.set_terminal_cost(std::move(terminal));
  m.set_discount(1.0);
  return m;
}

double casino_rho_minus_z(double p, const RiskMeasure& rm) {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  const double atoms[] = {-1.0, 1.0};
  const double probs[] = {p, 1.0 - p};
  return evaluate(rm, DiscreteDistribution::make(atoms, probs));
}

double casino_closed_form(double p, const RiskMeasure& rm, std::size_t steps_to_go, double x) {
  const double r = casino_rho_minus_z(p, rm);
  if (r >= 0.0) return -x;
  return -x * std::pow(1.0 - r, static_cast<double>(steps_to_go));
}

Policy casino_bold_play(const MdpModel& casino) {
  const std::size_t top = casino.n_states() - 1;
  std::vector<ActionIndex> rule(casino.n_states());
  for (StateIndex x = 0; x <= top; ++x) rule[x] = std::min(x, top - x);
  return Policy::stationary_rule(std::move(rule));
}

Policy casino_never_bet(const MdpModel& casino) {
  return Policy::stationary_rule(std::vector<ActionIndex>(casino.n_states(), 0));
}

std::pair<double, double> casino_p_star_bracket(const RiskMeasure& rm, double width) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (casino_rho_minus_z(mid, rm) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {lo, hi};
}

// ---- Cash balance --------------------------------------------------------

std::vector<double> CashBalanceParams::quadratic(int radius, double scale) {
  std::vector<double> out;
  for (int level = -radius; level <= radius; ++level) {
    out.push_back(scale * static_cast<double>(level) * static_cast<double>(level));
  }
  return out;
}

MdpModel build_cash_balance(const CashBalanceParams& params) {
  const int r = params.radius;
  require(r >= 1, "radius must be positive");
  const std::size_t n = static_cast<std::size_t>(2 * r + 1);
  require(params.holding.size() == n, "holding cost needs one entry per grid level");
  require(params.holding[static_cast<std::size_t>(r)] == 0.0, "holding cost must vanish at 0");
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(params.holding[i]) && params.holding[i] >= 0.0,
            "holding cost must be finite and nonnegative");
  }
  require(!convexity_witness(params.holding, 0.0), "holding cost must be convex on the grid");
  require(params.cost_up > 0.0 && params.cost_down > 0.0 && std::isfinite(params.cost_up) &&
              std::isfinite(params.cost_down),
          "transfer costs must be positive");
  require_law(params.shock_probs, params.shocks.size(), "shock law");
  require_discount(params.discount);

  int zmin = std::numeric_limits<int>::max();
  int zmax = std::numeric_limits<int>::min();
  for (std::size_t k = 0; k < params.shocks.size(); ++k) {
    if (params.shock_probs[k] == 0.0) continue;
    zmin = std::min(zmin, params.shocks[k]);
    zmax = std::max(zmax, params.shocks[k]);
  }
  const int lo = -r + zmax;
  const int hi = r + zmin;
  require(lo <= hi, "shocks are too wide for the grid");

  MdpModel m(n, n, params.shock_probs);
  std::vector<double> labels(n);
  std::vector<ActionIndex> band;
  for (int a = lo; a <= hi; ++a) band.push_back(static_cast<ActionIndex>(a + r));
  for (StateIndex x = 0; x < n; ++x) {
    const int level = static_cast<int>(x) - r;
    labels[x] = level;
    m.set_admissible(x, band);
    for (ActionIndex a : band) {
      const int target = static_cast<int>(a) - r;
      const int move = target - level;
      const double transfer = move > 0 ? params.cost_up * move : params.cost_down * -move;
      const double c = transfer + params.holding[a];
      for (DisturbanceIndex z = 0; z < params.shocks.size(); ++z) {
        const int next = std::clamp(target - params.shocks[z], -r, r);
        m.set_transition(x, a, z, static_cast<StateIndex>(next + r));
        m.set_cost(x, a, z, c);
      }
    }
  }
  std::vector<double> shock_labels(params.shocks.begin(), params.shocks.end());
  m.set_state_labels(std::move(labels));
  m.set_disturbance_labels(std::move(shock_labels));
  m.set_discount(params.discount);
  return m;
}

TwoThresholdResult extract_two_thresholds(const MdpModel& cash, std::span<const ActionIndex> rule) {
  if (rule.size() != cash.n_states() || !cash.has_state_labels()) {
    throw Error(ErrorCode::DimensionMismatch, "rule must cover every labelled state");
  }
  TwoThresholdResult r;
  std::optional<StateIndex> first, last;
  for (StateIndex x = 0; x < rule.size(); ++x) {
    if (rule[x] == x) {
      if (!first) first = x;
      last = x;
    }
  }
  if (!first) {
    r.witness = 0;
    return r;
  }
  for (StateIndex x = 0; x < rule.size(); ++x) {
    const ActionIndex expected = x < *first ? *first : (x > *last ? *last : x);
    if (rule[x] != expected) {
      r.witness = x;
      return r;
    }
  }
  const auto& labels = cash.state_labels();
  const auto& band = cash.admissible(0);
  r.is_two_threshold = true;
  r.s_minus = labels[*first];
  r.s_plus = labels[*last];
  r.boundary_active = *first == band.front() || *last == band.back();
  return r;
}

std::optional<StateIndex> convexity_witness(std::span<const double> values, double tol) {
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i - 1] - 2.0 * values[i] + values[i + 1] < -tol) return i;
  }
  return std::nullopt;
}

// ---- VaR myopia ----------------------------------------------------------

MdpModel build_var_myopic(const VarMyopicParams& params) {
  const std::size_t n = params.labels.size();
  require(n >= 1, "need at least one state");
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(params.labels[i]), "labels must be finite");
    require(i == 0 || params.labels[i] > params.labels[i - 1], "labels must increase strictly");
  }
  require(!params.action_shifts.empty(), "need at least one action");
  require_law(params.shock_probs, params.shocks.size(), "shock law");
  require(params.cost_now >= 0.0 && params.cost_next >= 0.0, "cost weights must be nonnegative");
  require(std::isfinite(params.cost_next_sq), "cost weights must be finite");
  require_discount(params.discount);

  const std::size_t na = params.action_shifts.size();
  MdpModel m(n, na, params.shock_probs);
  std::vector<ActionIndex> all(na);
  for (ActionIndex a = 0; a < na; ++a) all[a] = a;
  const long top = static_cast<long>(n) - 1;
  for (StateIndex x = 0; x < n; ++x) {
    m.set_admissible(x, all);
    for (ActionIndex a = 0; a < na; ++a) {
      for (DisturbanceIndex z = 0; z < params.shocks.size(); ++z) {
        const long raw = static_cast<long>(x) + params.action_shifts[a] + params.shocks[z];
        const auto y = static_cast<StateIndex>(std::clamp(raw, 0L, top));
        const double ly = params.labels[y];
        m.set_transition(x, a, z, y);
        m.set_cost(x, a, z,
                   params.cost_now * params.labels[x] + params.cost_next * ly +
                       params.cost_next_sq * ly * ly);
      }
    }
  }
  m.set_state_labels(params.labels);
  std::vector<double> shock_labels(params.shocks.begin(), params.shocks.end());
  m.set_disturbance_labels(std::move(shock_labels));
  m.set_discount(params.discount);
  return m;
}

MyopiaReport verify_myopia(const MdpModel& m, double level, std::size_t horizon) {
  const auto violations = monotone_model_violations(m);
  if (!violations.empty()) throw Error(ErrorCode::MonotonicityViolation, violations.front());
  if (!m.stage_costs().empty()) {
    throw Error(ErrorCode::MonotonicityViolation, "myopia check needs stationary costs");
  }
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    std::map<StateIndex, double> by_target;
    for (ActionIndex a : m.admissible(x)) {
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) {
        const auto [it, fresh] = by_target.emplace(m.transition(x, a, z), m.cost(x, a, z));
        if (!fresh && it->second != m.cost(x, a, z)) {
          throw Error(ErrorCode::MonotonicityViolation,
                      "cost depends on the action at state " + std::to_string(x));
        }
      }
    }
  }

  const auto var = RiskMeasure::value_at_risk(level);
  const auto& labels = m.state_labels();
  MyopiaReport r;
  r.myopic_rule.resize(m.n_states());
  std::vector<double> next(m.n_disturbances());
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    double best = std::numeric_limits<double>::infinity();
    ActionIndex chosen = 0;
    for (ActionIndex a : m.admissible(x)) {
      for (DisturbanceIndex z = 0; z < next.size(); ++z) next[z] = labels[m.transition(x, a, z)];
      const double q = evaluate(var, DiscreteDistribution::make(next, m.disturbance_probs()));
      if (q < best) {
        best = q;
        chosen = a;
      }
    }
    r.myopic_rule[x] = chosen;
  }

  const auto solved = solve_finite(m, var, horizon);
  for (std::size_t n = 0; n < horizon; ++n) {
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      const auto set = argmin_set(m, var, solved.values[n + 1], x, n);
      if (!std::binary_search(set.begin(), set.end(), r.myopic_rule[x])) {
        r.mismatches.emplace_back(n, x);
      }
    }
  }
  r.solver_stationary = std::all_of(solved.policy.stages.begin(), solved.policy.stages.end(),
                                    [&](const auto& rule) { return rule == solved.policy.stages[0]; });
  r.holds = r.mismatches.empty();
  return r;
}

std::optional<std::pair<std::size_t, StateIndex>> increasing_witness(
    const std::vector<ValueFunction>& values, std::span<const double> labels,
    std::span<const StateIndex> states, double tol) {
  std::vector<StateIndex> order(states.begin(), states.end());
  if (order.empty()) {
    order.resize(labels.size());
    for (StateIndex x = 0; x < order.size(); ++x) order[x] = x;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](StateIndex a, StateIndex b) { return labels[a] < labels[b]; });
  for (std::size_t n = 0; n < values.size(); ++n) {
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (values[n][order[i]] < values[n][order[i - 1]] - tol) {
        return std::make_pair(n, order[i]);
      }
    }
  }
  return std::nullopt;
}

}  // namespace riskmdp
