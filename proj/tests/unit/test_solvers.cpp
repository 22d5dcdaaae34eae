#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "riskmdp/bellman.hpp"
#include "riskmdp/error.hpp"
#include "riskmdp/examples.hpp"
#include "riskmdp/solvers.hpp"
#include "riskmdp_test/classic_dp.hpp"
#include "riskmdp_test/error_code.hpp"
#include "riskmdp_test/random_models.hpp"

namespace riskmdp {
namespace {

using testing::error_code_of;

double max_abs_cost(const MdpModel& m) {
  double k = 0.0;
  for (double c : m.cost_table()) k = std::max(k, std::abs(c));
  return k;
}

BoundingSpec constant_spec(const MdpModel& m, BoundingMode mode = BoundingMode::Coherent) {
  return BoundingSpec::constant(m.n_states(), max_abs_cost(m), 1.0, mode);
}

const HouseSellingParams kHouse{{0, 1, 2, 3}, {0.25, 0.25, 0.25, 0.25}, 0.5, 1.0, 2};

TEST(SolveFinite, CasinoBoldPlay) {
  const CasinoParams p{0.75, 2, 4};
  const auto m = build_casino(p);
  const auto r = solve_finite(m, RiskMeasure::expectation(), 2);
  ASSERT_EQ(r.values.size(), 3u);
  ASSERT_EQ(r.policy.stages.size(), 2u);
  for (StateIndex x = 0; x <= p.max_capital; ++x) {
    EXPECT_NEAR(r.values[0][x], -2.25 * static_cast<double>(x), 1e-12);
  }
  for (std::size_t n = 0; n < 2; ++n) {
    for (StateIndex x = 0; x <= (std::size_t{1} << n) * p.max_capital; ++x) {
      EXPECT_EQ(r.policy.stages[n][x], x) << "n=" << n << " x=" << x;
    }
  }
  EXPECT_EQ(r.stage_seconds.size(), 2u);
}

TEST(SolveFinite, HouseSellingThresholds) {
  const auto m = build_house_selling(kHouse);
  const auto e = RiskMeasure::expectation();
  const auto r = solve_finite(m, e, 2);
  const auto t = house_selling_thresholds(kHouse, std::span(&e, 1), r);
  EXPECT_DOUBLE_EQ(t[1], 2.0);
  EXPECT_DOUBLE_EQ(t[0], 1.75);
  for (StateIndex x = 0; x < 4; ++x) EXPECT_DOUBLE_EQ(r.values[0][x], std::min<double>(x, 1.75));
}

TEST(SolveFinite, SingleStageIsOneBellmanStep) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const auto m = testing::random_model(rng, {6, 4, 5, 0.9, -5, 5, true});
    const auto rm = RiskMeasure::expected_shortfall(0.6);
    const auto r = solve_finite(m, rm, 1);
    const auto step = bellman_T(m, rm, ValueFunction{m.terminal_cost()});
    EXPECT_EQ(r.values[0], step.value);
    EXPECT_EQ(r.policy.stages[0], step.action);
  }
}

TEST(SolveFinite, StageMeasuresAndStageCosts) {
  const auto m0 = build_house_selling(kHouse);
  const std::vector<RiskMeasure> rms{RiskMeasure::expectation(),
                                     RiskMeasure::expected_shortfall(0.5)};
  const auto r = solve_finite(m0, rms, 2);
  const auto t = house_selling_thresholds(kHouse, rms, r);
  EXPECT_DOUBLE_EQ(t[1], 3.0);
  EXPECT_EQ(error_code_of([&] { solve_finite(m0, rms, 3); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(error_code_of([&] { solve_finite(m0, rms[0], 0); }), ErrorCode::InvalidSpec);

  auto m = m0;
  auto stage0 = m.cost_table();
  for (auto& c : stage0) c += 1.0;
  m.set_stage_costs({stage0, m.cost_table()});
  const auto shifted = solve_finite(m, RiskMeasure::expectation(), 2);
  const auto base = solve_finite(m0, RiskMeasure::expectation(), 2);
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    EXPECT_DOUBLE_EQ(shifted.values[0][x], base.values[0][x] + 1.0);
    EXPECT_DOUBLE_EQ(shifted.values[1][x], base.values[1][x]);
  }
}

TEST(SolveFinite, InvalidModelIsRejected) {
  auto m = build_house_selling(kHouse);
  m.set_transition(0, 1, 0, 99);
  EXPECT_EQ(error_code_of([&] { solve_finite(m, RiskMeasure::expectation(), 1); }),
            ErrorCode::InvalidModel);
}

TEST(EvaluatePolicy, GreedyPolicyReproducesOptimalValues) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 50; ++t) {
    const auto m = testing::random_model(rng, {6, 4, 5, 0.9, -5, 5, true});
    for (const auto& rm : {RiskMeasure::expectation(), RiskMeasure::expected_shortfall(0.8),
                           RiskMeasure::value_at_risk(0.3), RiskMeasure::entropic(0.2)}) {
      const auto r = solve_finite(m, rm, 4);
      const auto v = evaluate_policy_finite(m, rm, r.policy, 4);
      for (std::size_t n = 0; n <= 4; ++n) {
        for (StateIndex x = 0; x < m.n_states(); ++x) {
          EXPECT_NEAR(v[n][x], r.values[n][x], 1e-12);
        }
      }
      const auto other = evaluate_policy_finite(m, rm, testing::random_policy(rng, m, 4), 4);
      for (StateIndex x = 0; x < m.n_states(); ++x) {
        EXPECT_GE(other[0][x], r.values[0][x] - 1e-12);
      }
    }
  }
}

TEST(EvaluatePolicy, TrivialPolicies) {
  const auto casino = build_casino({0.75, 3, 2});
  const auto never = evaluate_policy_finite(casino, RiskMeasure::expected_shortfall(0.5),
                                            casino_never_bet(casino), 3);
  for (StateIndex x = 0; x < casino.n_states(); ++x) {
    EXPECT_EQ(never[0][x], -static_cast<double>(x));
  }
  const auto house = build_house_selling(kHouse);
  const auto stop = evaluate_policy_finite(house, RiskMeasure::expectation(),
                                           Policy::stationary_rule({0, 0, 0, 0, 0}), 2);
  for (StateIndex x = 0; x < 4; ++x) EXPECT_EQ(stop[0][x], static_cast<double>(x));
  EXPECT_EQ(error_code_of([&] {
              evaluate_policy_finite(house, RiskMeasure::expectation(),
                                     Policy::stationary_rule({0, 0, 0, 0, 1}), 2);
            }),
            ErrorCode::InfeasiblePolicy);
}

TEST(SolveInfinite, ZeroCostConvergesImmediately) {
  std::mt19937_64 rng(43);
  auto m = testing::random_model(rng);
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    for (ActionIndex a = 0; a < m.n_actions(); ++a) {
      for (DisturbanceIndex z = 0; z < m.n_disturbances(); ++z) m.set_cost(x, a, z, 0.0);
    }
  }
  const auto r = solve_infinite(m, RiskMeasure::expected_shortfall(0.5), constant_spec(m));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  for (double v : r.value.values) EXPECT_EQ(v, 0.0);
}

TEST(SolveInfinite, MatchesClassicValueIteration) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 30; ++t) {
    const auto m = testing::random_model(rng, {5, 4, 5, 0.9});
    InfiniteOptions opts;
    opts.tol = 1e-12;
    const auto r = solve_infinite(m, RiskMeasure::expectation(), constant_spec(m), opts);
    ASSERT_TRUE(r.converged);
    const auto oracle = testing::classic_value_iteration(m, 1e-13);
    for (StateIndex x = 0; x < m.n_states(); ++x) {
      EXPECT_NEAR(r.value[x], oracle.values[x], 1e-10);
      EXPECT_EQ(r.policy.rule(0)[x], oracle.actions[x]);
    }
    EXPECT_EQ(r.trace.size(), r.iterations);
    EXPECT_NEAR(r.modulus, 0.9, 1e-15);
    EXPECT_LE(r.error_bound, opts.tol);
  }
}

TEST(SolveInfinite, FixedPointResidualAndUniqueness) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 20; ++t) {
    const auto m = testing::random_model(rng);
    const auto rm = RiskMeasure::expected_shortfall(0.8);
    const auto spec = constant_spec(m);
    InfiniteOptions opts;
    opts.tol = 1e-8;
    const auto r = solve_infinite(m, rm, spec, opts);
    ASSERT_TRUE(r.converged);
    const auto again = bellman_T(m, rm, r.value);
    EXPECT_LE(weighted_norm(again.value, r.value, spec.weight()), r.residual + 1e-15);
    EXPECT_EQ(again.action, r.policy.rule(0));

    const auto bounds = verify_bounds(m, rm, spec);
    opts.start = ValueFunction{*bounds.global_ub};
    const auto from_top = solve_infinite(m, rm, spec, opts);
    ASSERT_TRUE(from_top.converged);
    EXPECT_LE(weighted_norm(from_top.value, r.value, spec.weight()), 2 * opts.tol);
  }
}

TEST(SolveInfinite, StageConsistencyWithFiniteHorizon) {
  std::mt19937_64 rng(46);
  const auto m = testing::random_model(rng);
  const auto rm = RiskMeasure::value_at_risk(0.4);
  const auto finite = solve_finite(m, rm, 6);
  ValueFunction v{std::vector<double>(m.n_states(), 0.0)};
  for (std::size_t k = 1; k <= 6; ++k) {
    v = bellman_T(m, rm, v).value;
    EXPECT_EQ(finite.values[6 - k], v);
  }
}

TEST(SolveInfinite, Preconditions) {
  std::mt19937_64 rng(47);
  auto m = testing::random_model(rng);
  const auto rm = RiskMeasure::expectation();
  auto spec = constant_spec(m);
  InfiniteOptions few;
  few.max_iter = 3;
  const auto partial = solve_infinite(m, rm, spec, few);
  EXPECT_FALSE(partial.converged);
  EXPECT_EQ(partial.iterations, 3u);

  m.set_discount(1.0);
  EXPECT_EQ(error_code_of([&] { solve_infinite(m, rm, spec); }), ErrorCode::NotContractive);
  m.set_discount(0.9);
  auto with_terminal = m;
  with_terminal.set_terminal_cost(std::vector<double>(m.n_states(), 1.0));
  EXPECT_EQ(error_code_of([&] { solve_infinite(with_terminal, rm, spec); }),
            ErrorCode::PreconditionViolated);
  spec.ub.assign(m.n_states(), 0.5);
  EXPECT_EQ(error_code_of([&] { solve_infinite(m, rm, spec); }), ErrorCode::PreconditionViolated);
}

TEST(SolveInfinite, DefaultIterationCap) {
  EXPECT_EQ(default_max_iter(1e-8, 0.9), 1750u);
  EXPECT_EQ(default_max_iter(1e-8, 0.999999999999), 1000000u);
}

TEST(SolveInfinite, BoundedCostWithAnyMonetaryMeasure) {
  std::mt19937_64 rng(48);
  for (int t = 0; t < 20; ++t) {
    const auto m = testing::random_model(rng);
    const auto spec = constant_spec(m, BoundingMode::BoundedCost);
    for (const auto& rm : {RiskMeasure::value_at_risk(0.8), RiskMeasure::entropic(0.1)}) {
      const auto r = solve_infinite(m, rm, spec);
      EXPECT_TRUE(r.converged) << rm.describe();
      const auto c = check_contraction(m, rm, spec, 50, 9);
      EXPECT_LE(c.max_ratio, m.discount() + 1e-9) << rm.describe();
    }
  }
}

TEST(CheckContraction, ExpectationAndShortfall) {
  std::mt19937_64 rng(49);
  for (int t = 0; t < 20; ++t) {
    const auto m = testing::random_model(rng);
    for (const auto& rm : {RiskMeasure::expectation(), RiskMeasure::expected_shortfall(0.8)}) {
      const auto c = check_contraction(m, rm, constant_spec(m), 100, 5);
      EXPECT_TRUE(c.within()) << c.max_ratio;
      EXPECT_LE(c.max_ratio, 0.9 + 1e-9);
      EXPECT_EQ(c.pairs + c.skipped, 100u);
    }
  }
}

TEST(CheckContraction, IncoherentMeasureRejectedInCoherentMode) {
  std::mt19937_64 rng(50);
  const auto m = testing::random_model(rng);
  EXPECT_EQ(error_code_of([&] {
              check_contraction(m, RiskMeasure::value_at_risk(0.9), constant_spec(m), 10, 1);
            }),
            ErrorCode::PreconditionViolated);
}

TEST(CheckContraction, BoundedBelowOnMonotoneModels) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    auto m = testing::random_monotone_model(rng, 6, 0.8);
    m.set_terminal_cost(std::vector<double>(m.n_states(), 0.0));
    BoundingSpec spec;
    spec.mode = BoundingMode::BoundedBelow;
    spec.eps_lower = 1.0;
    spec.eps_upper = 0.0;
    spec.lb.assign(m.n_states(), -1.0);
    spec.ub.assign(m.n_states(), max_abs_cost(m));
    spec.alpha = 1.0;
    const auto rm = RiskMeasure::value_at_risk(0.6);
    ASSERT_TRUE(verify_bounds(m, rm, spec).ok);
    const auto c = check_contraction(m, rm, spec, 100, 3);
    EXPECT_TRUE(c.within()) << c.max_ratio;
  }
}

TEST(WeakIncrease, HoldsOnRandomModels) {
  std::mt19937_64 rng(52);
  const auto rm = RiskMeasure::expected_shortfall(0.8);
  for (int t = 0; t < 100; ++t) {
    const auto m = testing::random_model(rng);
    const auto pi = testing::random_policy(rng, m, 5);
    EXPECT_TRUE(weak_increase_check(m, rm, constant_spec(m), pi, 5));
  }
}

TEST(WeakIncrease, NonnegativeCostsIncrease) {
  std::mt19937_64 rng(53);
  const auto m = testing::random_model(rng, {6, 4, 5, 0.9, 0.0, 3.0});
  BoundingSpec spec = constant_spec(m);
  spec.lb.assign(m.n_states(), -spec.eps_lower);
  const auto pi = testing::random_policy(rng, m, 6);
  EXPECT_TRUE(weak_increase_check(m, RiskMeasure::expectation(), spec, pi, 6));
}

TEST(WeakIncrease, CasinoBoldPlay) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto casino = build_casino({0.5, n, 1});
    BoundingSpec spec;
    spec.mode = BoundingMode::BoundedBelow;
    spec.eps_lower = 1.0;
    spec.eps_upper = 0.0;
    spec.lb.assign(casino.n_states(), -1.0);
    spec.ub = casino.state_labels();
    for (auto& u : spec.ub) u += 1.0;
    spec.alpha = 2.0;
    EXPECT_TRUE(weak_increase_check(casino, RiskMeasure::expected_shortfall(0.5), spec,
                                    casino_bold_play(casino), n));
  }
}

}  // namespace
}  // namespace riskmdp
