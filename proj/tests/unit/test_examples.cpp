#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "riskmdp/bellman.hpp"
#include "riskmdp/error.hpp"
#include "riskmdp/examples.hpp"
#include "riskmdp_test/classic_dp.hpp"
#include "riskmdp_test/error_code.hpp"
#include "riskmdp_test/random_models.hpp"

namespace riskmdp {
namespace {

using testing::error_code_of;

// ---- Casino --------------------------------------------------------------

TEST(Casino, RhoOfMinusZ) {
  EXPECT_DOUBLE_EQ(casino_rho_minus_z(0.5, RiskMeasure::expectation()), 0.0);
  EXPECT_DOUBLE_EQ(casino_rho_minus_z(0.75, RiskMeasure::expectation()), -0.5);
  EXPECT_DOUBLE_EQ(casino_rho_minus_z(0.75, RiskMeasure::expected_shortfall(0.5)), 0.0);
  EXPECT_DOUBLE_EQ(casino_rho_minus_z(1.0, RiskMeasure::expected_shortfall(0.9)), -1.0);
  EXPECT_DOUBLE_EQ(casino_rho_minus_z(0.0, RiskMeasure::expectation()), 1.0);
}

TEST(Casino, ClosedFormAndOptimalPolicy) {
  const std::vector<RiskMeasure> rms{RiskMeasure::expectation(),
                                     RiskMeasure::expected_shortfall(0.5),
                                     RiskMeasure::expected_shortfall(0.9)};
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (const auto& rm : rms) {
      for (std::size_t n = 1; n <= 5; ++n) {
        const auto m = build_casino({p, n, 4});
        const auto solved = solve_finite(m, rm, n);
        const bool bold = casino_rho_minus_z(p, rm) < 0.0;
        const auto pi = bold ? casino_bold_play(m) : casino_never_bet(m);
        const auto by_policy = evaluate_policy_finite(m, rm, pi, n);
        for (StateIndex x = 0; x <= 4; ++x) {
          const double expected = casino_closed_form(p, rm, n, static_cast<double>(x));
          EXPECT_NEAR(solved.values[0][x], expected, 1e-9 * std::max(1.0, std::abs(expected)))
              << "p=" << p << " " << rm.describe() << " N=" << n << " x=" << x;
          EXPECT_NEAR(by_policy[0][x], expected, 1e-9 * std::max(1.0, std::abs(expected)));
        }
      }
    }
  }
}

TEST(Casino, BracketForPStar) {
  const auto e = casino_p_star_bracket(RiskMeasure::expectation(), 1e-9);
  EXPECT_LE(e.second - e.first, 1e-9);
  EXPECT_LE(e.first, 0.5);
  EXPECT_GE(e.second, 0.5);
  EXPECT_LT(e.second - 0.5, 1e-9);
  const auto es = casino_p_star_bracket(RiskMeasure::expected_shortfall(0.5), 1e-9);
  EXPECT_NEAR(es.first, 0.75, 1e-9);
  EXPECT_GE(casino_rho_minus_z(es.first, RiskMeasure::expected_shortfall(0.5)), 0.0);
  EXPECT_LT(casino_rho_minus_z(es.second, RiskMeasure::expected_shortfall(0.5)), 0.0);
}

TEST(Casino, InvalidParams) {
  EXPECT_EQ(error_code_of([] { build_casino({1.5, 1, 4}); }), ErrorCode::InvalidParams);
  EXPECT_EQ(error_code_of([] { build_casino({0.5, 0, 4}); }), ErrorCode::InvalidParams);
  EXPECT_EQ(error_code_of([] { build_casino({0.5, 1, 0}); }), ErrorCode::InvalidParams);
  EXPECT_EQ(error_code_of([] { build_casino({0.5, 15, 4}); }), ErrorCode::InvalidParams);
}

// ---- House selling -------------------------------------------------------

const HouseSellingParams kHouse{{0, 1, 2, 3}, {.25, .25, .25, .25}, 0.5, 1.0, 2};

TEST(HouseSelling, ThresholdsUnderExpectation) {
  const auto m = build_house_selling(kHouse);
  const auto rm = RiskMeasure::expectation();
  const auto solved = solve_finite(m, rm, 2);
  const auto t = house_selling_thresholds(kHouse, std::span(&rm, 1), solved);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_DOUBLE_EQ(t[1], 2.0);
  EXPECT_DOUBLE_EQ(t[0], 1.75);
  for (std::size_t n = 0; n < 2; ++n) {
    const std::vector<ActionIndex> rule(solved.policy.stages[n].begin(),
                                        solved.policy.stages[n].end() - 1);
    const auto th = extract_threshold(rule, kHouse.offers);
    EXPECT_TRUE(th.is_threshold);
    EXPECT_LE(th.threshold, t[n]);
    for (StateIndex x = 0; x < 4; ++x) {
      if (kHouse.offers[x] < t[n]) {
        EXPECT_EQ(rule[x], kStop);
      } else if (kHouse.offers[x] > t[n]) {
        EXPECT_EQ(rule[x], kContinue);
      }
    }
  }
}

TEST(HouseSelling, RiskAversionLowersTheBarToStop) {
  const auto m = build_house_selling(kHouse);
  const auto e = RiskMeasure::expectation();
  const auto es = RiskMeasure::expected_shortfall(0.5);
  const auto te = house_selling_thresholds(kHouse, std::span(&e, 1), solve_finite(m, e, 2));
  const auto ts = house_selling_thresholds(kHouse, std::span(&es, 1), solve_finite(m, es, 2));
  EXPECT_DOUBLE_EQ(ts[1], 3.0);
  for (std::size_t n = 0; n < 2; ++n) EXPECT_GE(ts[n], te[n]);
  for (std::size_t n = 0; n + 1 < 2; ++n) EXPECT_LE(te[n], te[n + 1]);
}

TEST(HouseSelling, RandomLawsGiveThresholdRules) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 30; ++t) {
    HouseSellingParams hp;
    double level = 0.0;
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
      level += u(rng);
      hp.offers.push_back(level);
      hp.offer_probs.push_back(u(rng));
      total += hp.offer_probs.back();
    }
    for (double& p : hp.offer_probs) p /= total;
    hp.offer_probs.back() = 1.0 - (hp.offer_probs[0] + hp.offer_probs[1] + hp.offer_probs[2] +
                                   hp.offer_probs[3]);
    hp.rent = u(rng);
    hp.discount = 0.95;
    hp.horizon = 4;
    const auto m = build_house_selling(hp);
    for (const auto& rm : {RiskMeasure::expectation(), RiskMeasure::expected_shortfall(0.7),
                           RiskMeasure::value_at_risk(0.6)}) {
      const auto solved = solve_finite(m, rm, hp.horizon);
      const auto thresholds = house_selling_thresholds(hp, std::span(&rm, 1), solved);
      for (std::size_t n = 0; n < hp.horizon; ++n) {
        const std::vector<ActionIndex> rule(solved.policy.stages[n].begin(),
                                            solved.policy.stages[n].end() - 1);
        EXPECT_TRUE(extract_threshold(rule, hp.offers).is_threshold) << rm.describe();
        if (n + 1 < hp.horizon) {
          EXPECT_LE(thresholds[n], thresholds[n + 1] + 1e-12);
        }
      }
    }
  }
}

TEST(HouseSelling, ExtractThreshold) {
  const std::vector<double> labels{0, 1, 2, 3};
  const std::vector<ActionIndex> ok{kStop, kStop, kStop, kContinue};
  const auto a = extract_threshold(ok, labels);
  EXPECT_TRUE(a.is_threshold);
  EXPECT_EQ(a.threshold, 2.0);
  const std::vector<ActionIndex> gap{kStop, kContinue, kStop, kContinue};
  const auto b = extract_threshold(gap, labels);
  EXPECT_FALSE(b.is_threshold);
  ASSERT_TRUE(b.witness.has_value());
  EXPECT_EQ(*b.witness, 1u);
  const std::vector<ActionIndex> never(4, kContinue);
  EXPECT_TRUE(std::isinf(extract_threshold(never, labels).threshold));
  EXPECT_EQ(error_code_of([&] { extract_threshold(ok, std::span(labels).first(2)); }),
            ErrorCode::DimensionMismatch);
}

TEST(HouseSelling, InvalidParams) {
  EXPECT_EQ(error_code_of([] { build_house_selling({{}, {}, 0.0, 1.0, 1}); }),
            ErrorCode::InvalidParams);
  EXPECT_EQ(error_code_of([] { build_house_selling({{1, 0}, {.5, .5}, 0.0, 1.0, 1}); }),
            ErrorCode::InvalidParams);
  EXPECT_EQ(error_code_of([] { build_house_selling({{0, 1}, {.5, .4}, 0.0, 1.0, 1}); }),
            ErrorCode::InvalidParams);
  EXPECT_EQ(error_code_of([] { build_house_selling({{0, 1}, {.5, .5}, 0.0, 0.0, 1}); }),
            ErrorCode::InvalidParams);
}

// ---- Cash balance --------------------------------------------------------

CashBalanceParams cash_fixture(double transfer) {
  CashBalanceParams p;
  p.radius = 10;
  p.holding = CashBalanceParams::quadratic(10);
  p.cost_up = transfer;
  p.cost_down = transfer;
  p.shocks = {-1, 0, 1};
  p.shock_probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  p.discount = 0.9;
  return p;
}

InfiniteSolveResult solve_cash(const MdpModel& m, const RiskMeasure& rm) {
  double k = 0.0;
  for (StateIndex x = 0; x < m.n_states(); ++x) {
    for (ActionIndex a : m.admissible(x)) k = std::max(k, m.cost(x, a, 0));
  }
  const auto spec = BoundingSpec::constant(m.n_states(), k, 1.0, BoundingMode::Coherent);
  InfiniteOptions opts;
  opts.tol = 1e-10;
  return solve_infinite(m, rm, spec, opts);
}

TEST(CashBalance, TwoThresholdPolicyAndConvexValue) {
  const auto m = build_cash_balance(cash_fixture(1.0));
  for (const auto& rm : {RiskMeasure::expectation(), RiskMeasure::expected_shortfall(0.9)}) {
    const auto r = solve_cash(m, rm);
    ASSERT_TRUE(r.converged);
    const auto tt = extract_two_thresholds(m, r.policy.rule(0));
    EXPECT_TRUE(tt.is_two_threshold) << rm.describe();
    EXPECT_LE(tt.s_minus, 0.0);
    EXPECT_GE(tt.s_plus, 0.0);
    EXPECT_FALSE(convexity_witness(r.value.values, 1e-7).has_value()) << rm.describe();
  }
}

TEST(CashBalance, ExpensiveTransfersMeanDoingNothing) {
  const auto m = build_cash_balance(cash_fixture(1e6));
  const auto r = solve_cash(m, RiskMeasure::expected_shortfall(0.9));
  const auto& band = m.admissible(0);
  for (ActionIndex a : band) EXPECT_EQ(r.policy.rule(0)[a], a);
  const auto tt = extract_two_thresholds(m, r.policy.rule(0));
  EXPECT_TRUE(tt.is_two_threshold);
  EXPECT_TRUE(tt.boundary_active);
}

TEST(CashBalance, FreeHoldingKeepsTheBalance) {
  auto p = cash_fixture(1.0);
  p.holding.assign(21, 0.0);
  const auto m = build_cash_balance(p);
  const auto r = solve_cash(m, RiskMeasure::expected_shortfall(0.9));
  for (ActionIndex a : m.admissible(0)) EXPECT_EQ(r.policy.rule(0)[a], a);
  for (double v : r.value.values) EXPECT_GE(v, -1e-9);
}

TEST(CashBalance, ExtractorsAndInvalidParams) {
  const auto m = build_cash_balance(cash_fixture(1.0));
  std::vector<ActionIndex> rule(m.n_states());
  for (StateIndex x = 0; x < rule.size(); ++x) rule[x] = std::clamp<StateIndex>(x, 8, 12);
  const auto tt = extract_two_thresholds(m, rule);
  EXPECT_TRUE(tt.is_two_threshold);
  EXPECT_EQ(tt.s_minus, -2.0);
  EXPECT_EQ(tt.s_plus, 2.0);
  rule[3] = 9;
  const auto bad = extract_two_thresholds(m, rule);
  EXPECT_FALSE(bad.is_two_threshold);
  EXPECT_EQ(bad.witness, std::optional<StateIndex>(3));

  const std::vector<double> concave{0, 1, 1.5, 1.8};
  EXPECT_EQ(convexity_witness(concave), std::optional<StateIndex>(1));
  const std::vector<double> convex{4, 1, 0, 1, 4};
  EXPECT_FALSE(convexity_witness(convex).has_value());

  auto p = cash_fixture(1.0);
  p.holding[10] = 1.0;
  EXPECT_EQ(error_code_of([&] { build_cash_balance(p); }), ErrorCode::InvalidParams);
  p = cash_fixture(0.0);
  EXPECT_EQ(error_code_of([&] { build_cash_balance(p); }), ErrorCode::InvalidParams);
  p = cash_fixture(1.0);
  p.holding[3] = 100.0;
  EXPECT_EQ(error_code_of([&] { build_cash_balance(p); }), ErrorCode::InvalidParams);
  p = cash_fixture(1.0);
  p.shocks = {-15, 15};
  p.shock_probs = {0.5, 0.5};
  EXPECT_EQ(error_code_of([&] { build_cash_balance(p); }), ErrorCode::InvalidParams);
}

// ---- VaR myopia ----------------------------------------------------------

TEST(VarMyopia, DeterministicDynamics) {
  VarMyopicParams p;
  p.labels = {0, 1, 2, 3, 4};
  p.action_shifts = {0, -1, 1};
  p.shocks = {0};
  p.shock_probs = {1.0};
  const auto m = build_var_myopic(p);
  const auto r = verify_myopia(m, 0.5, 4);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.myopic_rule[2], 1u);
  EXPECT_EQ(r.myopic_rule[0], 0u);
}

TEST(VarMyopia, SmallRandomShocks) {
  VarMyopicParams p;
  p.labels = {0, 1, 2};
  p.action_shifts = {0, -1};
  p.shocks = {0, 1};
  p.shock_probs = {0.5, 0.5};
  const auto m = build_var_myopic(p);
  const auto r = verify_myopia(m, 0.5, 3);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.mismatches.empty());
}

TEST(VarMyopia, HoldsOnRandomMonotoneFixtures) {
  std::mt19937_64 rng(72);
  std::uniform_int_distribution<int> shift(-2, 2);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 40; ++t) {
    VarMyopicParams p;
    double level = 0.0;
    for (int i = 0; i < 6; ++i) p.labels.push_back(level += u(rng));
    for (int a = 0; a < 3; ++a) p.action_shifts.push_back(shift(rng));
    double total = 0.0;
    for (int z = 0; z < 3; ++z) {
      p.shocks.push_back(shift(rng));
      p.shock_probs.push_back(u(rng));
      total += p.shock_probs.back();
    }
    for (double& q : p.shock_probs) q /= total;
    p.shock_probs.back() = 1.0 - p.shock_probs[0] - p.shock_probs[1];
    p.cost_now = u(rng);
    p.cost_next = u(rng);
    p.discount = 0.9;
    const auto m = build_var_myopic(p);
    for (double level : {0.1, 0.5, 0.9}) {
      const auto r = verify_myopia(m, level, 4);
      EXPECT_TRUE(r.holds) << "trial " << t << " level " << level;
    }
  }
}

TEST(VarMyopia, RejectsNonMonotoneModels) {
  std::mt19937_64 rng(73);
  const auto m = testing::random_model(rng);
  EXPECT_EQ(error_code_of([&] { verify_myopia(m, 0.5, 2); }), ErrorCode::MonotonicityViolation);
  EXPECT_EQ(error_code_of([] {
              VarMyopicParams p;
              p.labels = {1, 0};
              p.action_shifts = {0};
              p.shocks = {0};
              p.shock_probs = {1.0};
              build_var_myopic(p);
            }),
            ErrorCode::InvalidParams);
}

// ---- Monotone values -----------------------------------------------------

TEST(MonotoneValues, IncreaseWithTheStateLabel) {
  std::mt19937_64 rng(74);
  const auto phi = StepSpectrum::normalized({{0.0, 1.0}, {0.6, 3.0}});
  const std::vector<RiskMeasure> rms{
      RiskMeasure::expectation(), RiskMeasure::expected_shortfall(0.8),
      RiskMeasure::value_at_risk(0.7), RiskMeasure::spectral(phi),
      RiskMeasure::entropic(0.5)};
  for (int t = 0; t < 40; ++t) {
    const auto m = testing::random_monotone_model(rng);
    ASSERT_TRUE(monotone_model_violations(m).empty());
    for (const auto& rm : rms) {
      const auto solved = solve_finite(m, rm, 4);
      EXPECT_FALSE(increasing_witness(solved.values, m.state_labels()).has_value())
          << rm.describe();
    }
  }
}

TEST(MonotoneValues, HouseSellingOfferStates) {
  const auto m = build_house_selling(kHouse);
  const auto solved = solve_finite(m, RiskMeasure::expected_shortfall(0.5), 2);
  const std::vector<StateIndex> offers{0, 1, 2, 3};
  std::vector<double> labels(kHouse.offers);
  labels.push_back(0.0);
  EXPECT_FALSE(increasing_witness(solved.values, labels, offers).has_value());
}

TEST(MonotoneValues, WitnessReportsTheFirstDrop) {
  const std::vector<ValueFunction> v{{{0, 1, 2}}, {{0, 2, 1}}};
  const std::vector<double> labels{0, 1, 2};
  const auto w = increasing_witness(v, labels);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->first, 1u);
  EXPECT_EQ(w->second, 2u);
}

}  // namespace
}  // namespace riskmdp
