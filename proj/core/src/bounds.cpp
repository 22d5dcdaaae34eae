#include "riskmdp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

constexpr double kBoundTolerance = 1e-9;

bool leq(double lhs, double rhs) {
  return lhs <= rhs + kBoundTolerance * std::max(1.0, std::abs(rhs));
}

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
}

bool is_nondecreasing(const std::vector<double>& v) {
  return std::is_sorted(v.begin(), v.end());
}

// rho of z -> f(T(x, a, z)).
template <class F>
double rho_of_next(const MdpModel& m, const RiskMeasure& rm, StateIndex x, ActionIndex a, F f) {
  std::vector<double> values(m.n_disturbances());
  for (DisturbanceIndex z = 0; z < values.size(); ++z) values[z] = f(m.transition(x, a, z));
  return evaluate(rm, DiscreteDistribution::make(values, m.disturbance_probs()));
}

std::vector<std::vector<double>> cost_tables(const MdpModel& m) {
  std::vector<std::vector<double>> out{m.cost_table()};
  for (const auto& t : m.stage_costs()) out.push_back(t);
  return out;
}

double rho_of_cost(const MdpModel& m, const RiskMeasure& rm, const std::vector<double>& table,
                   StateIndex x, ActionIndex a) {
  std::vector<double> values(m.n_disturbances());
  for (DisturbanceIndex z = 0; z < values.size(); ++z) values[z] = table[m.flat(x, a, z)];
  return evaluate(rm, DiscreteDistribution::make(values, m.disturbance_probs()));
}

void require_mode_fits(const RiskMeasure& rm, BoundingMode mode) {
  switch (mode) {
    case BoundingMode::Coherent:
      if (!rm.is_coherent()) {
        throw Error(ErrorCode::PreconditionViolated,
                    rm.describe() + " is not coherent; Coherent bounding mode does not apply");
      }
      break;
    case BoundingMode::ComonotoneMonotone:
    case BoundingMode::BoundedBelow:
      if (!rm.is_distortion_type()) {
        throw Error(ErrorCode::PreconditionViolated,
                    rm.describe() + " is not positive homogeneous and comonotonic additive");
      }
      break;
    case BoundingMode::BoundedCost:
      break;
  }
}

}  // namespace

std::string to_string(BoundingMode mode) {
  switch (mode) {
    case BoundingMode::Coherent: return "Coherent";
    case BoundingMode::ComonotoneMonotone: return "ComonotoneMonotone";
    case BoundingMode::BoundedBelow: return "BoundedBelow";
    case BoundingMode::BoundedCost: return "BoundedCost";
  }
  return "Unknown";
}

BoundingMode bounding_mode_from_string(const std::string& name) {
  for (auto mode : {BoundingMode::Coherent, BoundingMode::ComonotoneMonotone,
                    BoundingMode::BoundedBelow, BoundingMode::BoundedCost}) {
    if (to_string(mode) == name) return mode;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown bounding mode '" + name + "'");
}

BoundingSpec BoundingSpec::constant(std::size_t n_states, double k, double alpha,
                                    BoundingMode mode) {
  BoundingSpec s;
  s.lb.assign(n_states, -(k + s.eps_lower));
  s.ub.assign(n_states, k + s.eps_upper);
  s.alpha = alpha;
  s.mode = mode;
  return s;
}

std::vector<double> BoundingSpec::weight() const {
  std::vector<double> b(lb.size());
  for (std::size_t x = 0; x < b.size(); ++x) b[x] = ub[x] - lb[x];
  return b;
}

void check_spec(const MdpModel& m, const BoundingSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::PreconditionViolated, msg); };
  if (spec.lb.size() != m.n_states() || spec.ub.size() != m.n_states()) {
    fail("bounding functions must have one entry per state");
  }
  if (!(spec.eps_lower >= 0.0) || !(spec.eps_upper >= 0.0) ||
      std::abs(spec.eps_lower + spec.eps_upper - 1.0) > 1e-12) {
    fail("eps split must be nonnegative and sum to one");
  }
  if (!std::isfinite(spec.alpha) || spec.alpha < 0.0) fail("alpha must be finite and >= 0");
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    if (!std::isfinite(spec.lb[x]) || !std::isfinite(spec.ub[x])) fail("bounds must be finite");
    if (spec.lb[x] > -spec.eps_lower) {
      fail("lb(" + std::to_string(x) + ") exceeds -eps_lower");
    }
    if (spec.ub[x] < spec.eps_upper) fail("ub(" + std::to_string(x) + ") below eps_upper");
  }
  switch (spec.mode) {
    case BoundingMode::Coherent:
      break;
    case BoundingMode::ComonotoneMonotone:
      if (!is_nondecreasing(spec.lb) || !is_nondecreasing(spec.ub)) {
        fail("ComonotoneMonotone mode needs increasing bounding functions");
      }
      break;
    case BoundingMode::BoundedBelow:
      if (!is_constant(spec.lb)) fail("BoundedBelow mode needs a constant lower bound");
      if (!is_nondecreasing(spec.ub)) fail("BoundedBelow mode needs an increasing upper bound");
      if (spec.alpha < 1.0) fail("BoundedBelow mode needs alpha >= 1");
      break;
    case BoundingMode::BoundedCost:
      if (!is_constant(spec.lb) || !is_constant(spec.ub)) {
        fail("BoundedCost mode needs constant bounds");
      }
      if (spec.alpha != 1.0) fail("BoundedCost mode needs alpha = 1");
      break;
  }
}

BoundsReport verify_bounds(const MdpModel& m, const RiskMeasure& rm, const BoundingSpec& spec) {
  check_spec(m, spec);
  require_mode_fits(rm, spec.mode);
  const double modulus = spec.alpha * m.discount();
  if (modulus >= 1.0 && (spec.mode == BoundingMode::Coherent ||
                         spec.mode == BoundingMode::ComonotoneMonotone)) {
    throw Error(ErrorCode::PreconditionViolated,
                "alpha * beta = " + std::to_string(modulus) + " must be below 1 in " +
                    to_string(spec.mode) + " mode");
  }

  BoundsReport r{spec.mode, spec.alpha, modulus, false, {}, true, std::nullopt, std::nullopt,
                 spec.weight()};
  auto check = [&](bool holds, StateIndex x, std::optional<ActionIndex> a,
                   std::optional<DisturbanceIndex> z, const char* cond, double lhs, double rhs) {
    if (!holds) r.violations.push_back({x, a, z, cond, lhs, rhs});
  };

  if (spec.mode == BoundingMode::ComonotoneMonotone) {
    for (const auto& msg : monotone_model_violations(m)) {
      r.violations.push_back({0, std::nullopt, std::nullopt, "monotone model: " + msg, 0.0, 0.0});
    }
  }

  const auto tables = cost_tables(m);
  const double alpha = spec.alpha;
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    const double lbx = spec.lb[x];
    const double ubx = spec.ub[x];
    for (ActionIndex a : m.admissible(x)) {
      for (const auto& table : tables) {
        if (spec.mode == BoundingMode::BoundedBelow || spec.mode == BoundingMode::BoundedCost) {
          for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) {
            if (m.disturbance_probs()[z] == 0.0) continue;
            const double c = table[m.flat(x, a, z)];
            check(leq(lbx, c), x, a, z, "c >= lb", c, lbx);
            if (spec.mode == BoundingMode::BoundedCost) check(leq(c, ubx), x, a, z, "c <= ub", c, ubx);
          }
        }
        if (spec.mode == BoundingMode::BoundedCost) continue;
        const double rc = rho_of_cost(m, rm, table, x, a);
        if (spec.mode != BoundingMode::BoundedBelow) {
          check(leq(lbx, rc), x, a, std::nullopt, "rho(c) >= lb(x)", rc, lbx);
        }
        check(leq(rc, ubx), x, a, std::nullopt, "rho(c) <= ub(x)", rc, ubx);
      }
      if (spec.mode == BoundingMode::BoundedCost) continue;
      if (spec.mode == BoundingMode::Coherent) {
        const double lhs = rho_of_next(m, rm, x, a, [&](StateIndex y) { return -spec.lb[y]; });
        check(leq(lhs, -alpha * lbx), x, a, std::nullopt, "rho(-lb(T)) <= -alpha lb(x)", lhs,
              -alpha * lbx);
      }
      if (spec.mode == BoundingMode::ComonotoneMonotone) {
        const double lhs = rho_of_next(m, rm, x, a, [&](StateIndex y) { return spec.lb[y]; });
        check(leq(alpha * lbx, lhs), x, a, std::nullopt, "rho(lb(T)) >= alpha lb(x)", lhs,
              alpha * lbx);
      }
      const double rhs_ub = alpha * ubx;
      const double lhs = rho_of_next(m, rm, x, a, [&](StateIndex y) { return spec.ub[y]; });
      check(leq(lhs, rhs_ub), x, a, std::nullopt, "rho(ub(T)) <= alpha ub(x)", lhs, rhs_ub);
    }
    const double cn = m.terminal_cost()[x];
    if (cn < lbx || cn > ubx) r.terminal_within = false;
  }

  r.ok = r.violations.empty();
  if (r.ok && modulus < 1.0) {
    std::vector<double> glb(spec.lb), gub(spec.ub);
    for (auto& v : glb) v /= 1.0 - modulus;
    for (auto& v : gub) v /= 1.0 - modulus;
    r.global_lb = std::move(glb);
    r.global_ub = std::move(gub);
  }
  return r;
}

double minimal_alpha(const MdpModel& m, const RiskMeasure& rm, const BoundingSpec& spec) {
  if (spec.mode == BoundingMode::BoundedCost) return 1.0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Smallest alpha >= 0 with num <= alpha * den for den >= 0.
  auto needed = [&](double num, double den) {
    if (den > 0.0) return std::max(0.0, num / den);
    return num <= 0.0 ? 0.0 : inf;
  };
  double alpha = spec.mode == BoundingMode::BoundedBelow ? 1.0 : 0.0;
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    for (ActionIndex a : m.admissible(x)) {
      const double up = rho_of_next(m, rm, x, a, [&](StateIndex y) { return spec.ub[y]; });
      alpha = std::max(alpha, needed(up, spec.ub[x]));
      if (spec.mode == BoundingMode::Coherent) {
        const double lo = rho_of_next(m, rm, x, a, [&](StateIndex y) { return -spec.lb[y]; });
        alpha = std::max(alpha, needed(lo, -spec.lb[x]));
      } else if (spec.mode == BoundingMode::ComonotoneMonotone) {
        // alpha * lb(x) <= rho(lb(T)) with lb(x) <= 0.
        const double lo = rho_of_next(m, rm, x, a, [&](StateIndex y) { return spec.lb[y]; });
        alpha = std::max(alpha, needed(-lo, -spec.lb[x]));
      }
    }
  }
  return alpha;
}

}  // namespace riskmdp
