#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "riskmdp/axioms.hpp"
#include "riskmdp/error.hpp"
#include "riskmdp/risk_measure.hpp"
#include "riskmdp_test/classic_dp.hpp"
#include "riskmdp_test/error_code.hpp"

namespace riskmdp {
namespace {

using testing::error_code_of;

DiscreteDistribution uniform4() {
  const double atoms[] = {1, 2, 3, 4};
  const double probs[] = {0.25, 0.25, 0.25, 0.25};
  return DiscreteDistribution::make(atoms, probs);
}

StepSpectrum random_spectrum(RandomLaws& gen) {
  const std::size_t k = gen.index(1, 5);
  std::vector<double> starts{0.0};
  for (std::size_t i = 1; i < k; ++i) starts.push_back(gen.uniform(0.0, 1.0));
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  std::vector<StepSpectrum::Step> steps;
  double value = gen.uniform(0.0, 1.0);
  for (double s : starts) {
    steps.push_back({s, value});
    value += gen.uniform(0.0, 3.0);
  }
  return StepSpectrum::normalized(std::move(steps));
}

TEST(RiskMeasure, FixtureValues) {
  const auto d = uniform4();
  EXPECT_DOUBLE_EQ(evaluate(RiskMeasure::expected_shortfall(0.5), d), 3.5);
  EXPECT_EQ(evaluate(RiskMeasure::value_at_risk(0.5), d), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(RiskMeasure::expectation(), d), 2.5);
  EXPECT_DOUBLE_EQ(evaluate(RiskMeasure::expected_shortfall(0.0), d), 2.5);
  const double atoms[] = {0.0, std::log(2.0)};
  const double probs[] = {0.5, 0.5};
  EXPECT_NEAR(evaluate(RiskMeasure::entropic(1.0), DiscreteDistribution::make(atoms, probs)),
              std::log(1.5), 1e-12);
}

TEST(RiskMeasure, NormalizedOnPointMasses) {
  for (const auto& rm :
       {RiskMeasure::expectation(), RiskMeasure::value_at_risk(0.3),
        RiskMeasure::expected_shortfall(0.9), RiskMeasure::entropic(2.0),
        RiskMeasure::spectral(StepSpectrum::normalized({{0.0, 1.0}, {0.5, 2.0}})),
        RiskMeasure::mixture(0.3, RiskMeasure::expectation(), RiskMeasure::value_at_risk(0.9))}) {
    EXPECT_NEAR(evaluate(rm, DiscreteDistribution::point_mass(7.0)), 7.0, 1e-12) << rm.describe();
  }
}

TEST(RiskMeasure, EsAndVarMatchOracles) {
  RandomLaws gen(21);
  for (int t = 0; t < 500; ++t) {
    const auto d = gen.law();
    std::vector<double> atoms(d.atoms().begin(), d.atoms().end());
    std::vector<double> probs(d.probs().begin(), d.probs().end());
    const double level = gen.uniform(0.0, 0.99);
    EXPECT_NEAR(evaluate(RiskMeasure::expected_shortfall(level), d),
                testing::brute_expected_shortfall(atoms, probs, level), 1e-10);
    const double vlevel = gen.uniform(0.01, 0.99);
    EXPECT_EQ(evaluate(RiskMeasure::value_at_risk(vlevel), d),
              testing::brute_quantile(atoms, probs, vlevel));
  }
}

TEST(RiskMeasure, IdentityDistortionIsExpectation) {
  RandomLaws gen(22);
  const auto rm = RiskMeasure::distortion(DistortionFunction::identity());
  for (int t = 0; t < 1000; ++t) {
    const auto d = gen.law();
    EXPECT_NEAR(evaluate(rm, d), d.mean(), 1e-12);
  }
}

TEST(RiskMeasure, SpectralAndDistortionRepresentationsAgree) {
  RandomLaws gen(23);
  for (int t = 0; t < 1000; ++t) {
    const auto phi = random_spectrum(gen);
    const auto d = gen.law();
    const double spectral = evaluate(RiskMeasure::spectral(phi), d);
    const double distortion =
        evaluate(RiskMeasure::distortion(DistortionFunction::from_spectrum(phi)), d);
    EXPECT_NEAR(spectral, distortion, 1e-12);
  }
}

TEST(RiskMeasure, BuiltinDistortionsMatchDedicatedKinds) {
  RandomLaws gen(24);
  for (int t = 0; t < 300; ++t) {
    const auto d = gen.law();
    const double level = gen.uniform(0.05, 0.95);
    EXPECT_NEAR(evaluate(RiskMeasure::distortion(DistortionFunction::es_cap(level)), d),
                evaluate(RiskMeasure::expected_shortfall(level), d), 1e-12);
    EXPECT_NEAR(evaluate(RiskMeasure::spectral(StepSpectrum::expected_shortfall(level)), d),
                evaluate(RiskMeasure::expected_shortfall(level), d), 1e-12);
  }
}

TEST(RiskMeasure, EntropicGuard) {
  const double atoms[] = {0.0, 1000.0};
  const double probs[] = {0.5, 0.5};
  const auto d = DiscreteDistribution::make(atoms, probs);
  EXPECT_EQ(error_code_of([&] { evaluate(RiskMeasure::entropic(1.0), d); }), ErrorCode::Overflow);
  EXPECT_EQ(error_code_of([] { RiskMeasure::entropic(0.0); }), ErrorCode::InvalidSpec);
}

TEST(RiskMeasure, FactoriesValidateLevels) {
  EXPECT_TRUE(error_code_of([] { RiskMeasure::value_at_risk(1.0); }));
  EXPECT_TRUE(error_code_of([] { RiskMeasure::expected_shortfall(-0.1); }));
  EXPECT_TRUE(error_code_of([] {
    RiskMeasure::mixture(1.5, RiskMeasure::expectation(), RiskMeasure::expectation());
  }));
}

TEST(RiskMeasure, Classification) {
  EXPECT_TRUE(RiskMeasure::expected_shortfall(0.5).is_coherent());
  EXPECT_FALSE(RiskMeasure::value_at_risk(0.5).is_coherent());
  EXPECT_TRUE(RiskMeasure::value_at_risk(0.5).is_distortion_type());
  EXPECT_FALSE(RiskMeasure::entropic(1.0).is_distortion_type());
  EXPECT_FALSE(RiskMeasure::entropic(1.0).is_coherent());
  EXPECT_FALSE(
      RiskMeasure::distortion(DistortionFunction::var_indicator(0.5)).is_coherent());
  EXPECT_TRUE(RiskMeasure::mixture(0.5, RiskMeasure::expectation(),
                                   RiskMeasure::expected_shortfall(0.9))
                  .is_coherent());
  EXPECT_EQ(RiskMeasure::expected_shortfall(0.9).describe(), "ES(0.9)");
}

TEST(RiskMeasure, DualSupremumAttainsValue) {
  RandomLaws gen(25);
  for (int t = 0; t < 500; ++t) {
    const auto d = gen.law();
    const double level = gen.uniform(0.0, 0.95);
    const auto phi = random_spectrum(gen);
    for (const auto& rm :
         {RiskMeasure::expected_shortfall(level), RiskMeasure::expectation(),
          RiskMeasure::spectral(phi), RiskMeasure::distortion(DistortionFunction::from_spectrum(phi)),
          RiskMeasure::mixture(0.4, RiskMeasure::expected_shortfall(level), RiskMeasure::spectral(phi))}) {
      const auto sol = dual_sup(rm, d);
      EXPECT_NEAR(sol.value, evaluate(rm, d), 1e-12) << rm.describe();
      double total = 0.0;
      for (double q : sol.density) {
        EXPECT_GE(q, 0.0);
        total += q;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    const auto es = dual_sup(RiskMeasure::expected_shortfall(level), d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      EXPECT_LE(es.density[i], d.probs()[i] / (1.0 - level) + 1e-15);
    }
  }
}

TEST(RiskMeasure, DualWeightsHandleTiesAndOrder) {
  const double values[] = {3.0, 1.0, 3.0, 2.0};
  const double probs[] = {0.25, 0.25, 0.25, 0.25};
  const auto q = dual_weights(RiskMeasure::expected_shortfall(0.5), values, probs);
  EXPECT_DOUBLE_EQ(q[0] + q[2], 1.0);
  EXPECT_EQ(q[1], 0.0);
  EXPECT_EQ(q[3], 0.0);
}

TEST(RiskMeasure, DualOfIncoherentMeasureIsRejected) {
  const auto d = uniform4();
  EXPECT_EQ(error_code_of([&] { dual_sup(RiskMeasure::value_at_risk(0.5), d); }),
            ErrorCode::NotCoherent);
  EXPECT_EQ(error_code_of([&] { dual_sup(RiskMeasure::entropic(1.0), d); }),
            ErrorCode::NotCoherent);
}

}  // namespace
}  // namespace riskmdp
