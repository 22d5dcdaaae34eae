#include "riskmdp/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "riskmdp/bellman.hpp"
#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

void require_valid(const MdpModel& m) {
  const auto diags = validate_model(m);
  if (!diags.empty()) throw Error(ErrorCode::InvalidModel, to_string(diags.front()));
}

const RiskMeasure& stage_measure(std::span<const RiskMeasure> rms, std::size_t n) {
  return rms.size() == 1 ? rms[0] : rms[n];
}

void require_stage_measures(std::span<const RiskMeasure> rms, std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorCode::InvalidSpec, "horizon must be at least 1");
  if (rms.size() != 1 && rms.size() != horizon) {
    throw Error(ErrorCode::InvalidSpec, "expected 1 or " + std::to_string(horizon) +
                                            " risk measures, got " + std::to_string(rms.size()));
  }
}

ValueFunction zeros(std::size_t n) { return ValueFunction{std::vector<double>(n, 0.0)}; }

}  // namespace

FiniteSolveResult solve_finite(const MdpModel& m, std::span<const RiskMeasure> rms,
                               std::size_t horizon) {
  require_stage_measures(rms, horizon);
  require_valid(m);
  FiniteSolveResult r;
  r.values.resize(horizon + 1);
  r.values[horizon] = ValueFunction{m.terminal_cost()};
  r.policy.stages.resize(horizon);
  r.stage_seconds.resize(horizon);
  for (std::size_t n = horizon; n-- > 0;) {
    const auto t0 = std::chrono::steady_clock::now();
    auto update = bellman_T(m, stage_measure(rms, n), r.values[n + 1], n);
    r.values[n] = std::move(update.value);
    r.policy.stages[n] = std::move(update.action);
    r.stage_seconds[n] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return r;
}

FiniteSolveResult solve_finite(const MdpModel& m, const RiskMeasure& rm, std::size_t horizon) {
  return solve_finite(m, std::span<const RiskMeasure>(&rm, 1), horizon);
}

std::vector<ValueFunction> evaluate_policy_finite(const MdpModel& m,
                                                  std::span<const RiskMeasure> rms,
                                                  const Policy& pi, std::size_t horizon) {
  require_stage_measures(rms, horizon);
  require_valid(m);
  check_policy(m, pi, horizon);
  std::vector<ValueFunction> values(horizon + 1);
  values[horizon] = ValueFunction{m.terminal_cost()};
  for (std::size_t n = horizon; n-- > 0;) {
    values[n] = bellman_T_rule(m, stage_measure(rms, n), values[n + 1], pi.rule(n), n);
  }
  return values;
}

std::vector<ValueFunction> evaluate_policy_finite(const MdpModel& m, const RiskMeasure& rm,
                                                  const Policy& pi, std::size_t horizon) {
  return evaluate_policy_finite(m, std::span<const RiskMeasure>(&rm, 1), pi, horizon);
}

std::size_t default_max_iter(double tol, double modulus) {
  constexpr double cap = 1e6;
  if (modulus <= 0.0) return 2;
  const double steps = 10.0 * std::ceil(std::log(tol) / std::log(modulus));
  return static_cast<std::size_t>(std::clamp(steps, 2.0, cap));
}

InfiniteSolveResult solve_infinite(const MdpModel& m, const RiskMeasure& rm,
                                   const BoundingSpec& spec, const InfiniteOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tolerance must be positive");
  require_valid(m);
  const double modulus = spec.alpha * m.discount();
  if (modulus >= 1.0) {
    throw Error(ErrorCode::NotContractive,
                "alpha * beta = " + std::to_string(modulus) + " is not below 1");
  }
  if (!m.stage_costs().empty()) {
    throw Error(ErrorCode::PreconditionViolated, "infinite horizon needs stationary costs");
  }
  if (std::any_of(m.terminal_cost().begin(), m.terminal_cost().end(),
                  [](double c) { return c != 0.0; })) {
    throw Error(ErrorCode::PreconditionViolated, "infinite horizon needs zero terminal cost");
  }
  const auto bounds = verify_bounds(m, rm, spec);
  if (!bounds.ok) {
    const auto& v = bounds.violations.front();
    throw Error(ErrorCode::PreconditionViolated,
                "bounds fail at state " + std::to_string(v.state) + ": " + v.condition);
  }
  if (opts.start && opts.start->size() != m.n_states()) {
    throw Error(ErrorCode::DimensionMismatch, "start vector has the wrong length");
  }

  InfiniteSolveResult r;
  r.modulus = modulus;
  const std::size_t max_iter = opts.max_iter.value_or(default_max_iter(opts.tol, modulus));
  const auto& b = bounds.weight;
  ValueFunction v = opts.start.value_or(zeros(m.n_states()));
  for (std::size_t k = 1; k <= max_iter; ++k) {
    auto next = bellman_T(m, rm, v);
    r.residual = weighted_norm(next.value, v, b);
    r.error_bound = modulus * r.residual / (1.0 - modulus);
    r.iterations = k;
    r.trace.push_back({k, r.residual, r.error_bound});
    v = std::move(next.value);
    if (r.error_bound <= opts.tol) {
      r.converged = true;
      break;
    }
  }
  r.policy = Policy::stationary_rule(bellman_T(m, rm, v).action);
  r.value = std::move(v);
  return r;
}

ContractionReport check_contraction(const MdpModel& m, const RiskMeasure& rm,
                                    const BoundingSpec& spec, std::size_t trials,
                                    std::uint64_t seed) {
  require_valid(m);
  const auto bounds = verify_bounds(m, rm, spec);
  if (!bounds.ok || !bounds.global_lb) {
    throw Error(ErrorCode::PreconditionViolated,
                "contraction check needs verified bounds with alpha * beta < 1");
  }
  const auto& glb = *bounds.global_lb;
  const auto& gub = *bounds.global_ub;
  const auto& b = bounds.weight;
  const bool increasing = spec.mode == BoundingMode::BoundedBelow;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample = [&] {
    std::vector<double> t(m.n_states());
    for (auto& e : t) e = unit(rng);
    if (increasing) std::sort(t.begin(), t.end());
    ValueFunction v{std::vector<double>(m.n_states())};
    for (StateIndex x = 0; x < m.n_states(); ++x) v[x] = glb[x] + t[x] * (gub[x] - glb[x]);
    return v;
  };

  ContractionReport r;
  r.modulus = bounds.modulus;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto v1 = sample();
    const auto v2 = sample();
    const double den = weighted_norm(v1, v2, b);
    if (den == 0.0) {
      ++r.skipped;
      continue;
    }
    const double num = weighted_norm(bellman_T(m, rm, v1).value, bellman_T(m, rm, v2).value, b);
    r.max_ratio = std::max(r.max_ratio, num / den);
    ++r.pairs;
  }
  return r;
}

bool weak_increase_check(const MdpModel& m, const RiskMeasure& rm, const BoundingSpec& spec,
                         const Policy& pi, std::size_t horizon) {
  require_valid(m);
  check_policy(m, pi, horizon);
  const auto bounds = verify_bounds(m, rm, spec);
  if (!bounds.ok) {
    throw Error(ErrorCode::PreconditionViolated, "weak increase check needs verified bounds");
  }
  const double modulus = bounds.modulus;
  auto value = [&](std::size_t k) {
    ValueFunction v = zeros(m.n_states());
    for (std::size_t n = k; n-- > 0;) v = bellman_T_rule(m, rm, v, pi.rule(n));
    return v;
  };
  ValueFunction prev = value(0);
  for (std::size_t k = 1; k <= horizon; ++k) {
    ValueFunction cur = value(k);
    const double shift = std::pow(modulus, static_cast<double>(k - 1));
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      if (cur[x] < prev[x] + shift * spec.lb[x] - 1e-9) return false;
    }
    prev = std::move(cur);
  }
  return true;
}

}  // namespace riskmdp
