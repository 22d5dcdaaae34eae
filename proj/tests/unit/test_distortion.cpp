#include <gtest/gtest.h>

#include "riskmdp/distortion.hpp"
#include "riskmdp/error.hpp"
#include "riskmdp_test/error_code.hpp"

namespace riskmdp {
namespace {

using testing::error_code_of;

TEST(StepSpectrum, ExpectedShortfallShape) {
  const auto phi = StepSpectrum::expected_shortfall(0.75);
  EXPECT_EQ(phi(0.5), 0.0);
  EXPECT_DOUBLE_EQ(phi(0.8), 4.0);
  EXPECT_DOUBLE_EQ(phi.integral_to(1.0), 1.0);
  EXPECT_DOUBLE_EQ(phi.integral_to(0.875), 0.5);
  const auto flat = StepSpectrum::expected_shortfall(0.0);
  EXPECT_DOUBLE_EQ(flat(0.3), 1.0);
}

TEST(StepSpectrum, RejectsInvalidSteps) {
  using S = StepSpectrum::Step;
  EXPECT_EQ(error_code_of([] { StepSpectrum({S{0.1, 1.0}}); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(error_code_of([] { StepSpectrum({S{0.0, 2.0}, S{0.5, 0.0}}); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(error_code_of([] { StepSpectrum({S{0.0, 0.5}}); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(error_code_of([] { StepSpectrum({S{0.0, 0.0}, S{0.5, 2.0}, S{0.5, 2.0}}); }),
            ErrorCode::InvalidSpec);
}

TEST(StepSpectrum, NormalizedRescales) {
  const auto phi = StepSpectrum::normalized({{0.0, 1.0}, {0.5, 3.0}});
  EXPECT_DOUBLE_EQ(phi.integral_to(1.0), 1.0);
  EXPECT_DOUBLE_EQ(phi(0.7) / phi(0.2), 3.0);
}

TEST(DistortionFunction, Shapes) {
  EXPECT_EQ(DistortionFunction::identity()(0.3), 0.3);
  const auto var = DistortionFunction::var_indicator(0.9);
  EXPECT_EQ(var(0.05), 0.0);
  EXPECT_EQ(var(0.2), 1.0);
  EXPECT_FALSE(var.is_concave());
  const auto es = DistortionFunction::es_cap(0.5);
  EXPECT_DOUBLE_EQ(es(0.25), 0.5);
  EXPECT_EQ(es(0.75), 1.0);
  EXPECT_TRUE(es.is_concave());
  EXPECT_DOUBLE_EQ(es.dual(0.75), 0.5);
}

TEST(DistortionFunction, PiecewiseLinearValidation) {
  EXPECT_EQ(error_code_of([] { DistortionFunction::piecewise_linear({{0.0, 0.0}, {0.5, 0.7}}); }),
            ErrorCode::InvalidSpec);
  EXPECT_EQ(error_code_of([] {
              DistortionFunction::piecewise_linear({{0.0, 0.0}, {0.5, 0.7}, {1.0, 0.6}});
            }),
            ErrorCode::InvalidSpec);
  const auto convex = DistortionFunction::piecewise_linear({{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}});
  EXPECT_FALSE(convex.is_concave());
  const auto concave = DistortionFunction::piecewise_linear({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
  EXPECT_TRUE(concave.is_concave());
  EXPECT_DOUBLE_EQ(concave(0.25), 0.4);
}

TEST(DistortionFunction, FromSpectrumIsDualIntegral) {
  const auto phi = StepSpectrum::normalized({{0.0, 1.0}, {0.3, 2.0}, {0.8, 5.0}});
  const auto g = DistortionFunction::from_spectrum(phi);
  EXPECT_TRUE(g.is_concave());
  for (double u : {0.0, 0.1, 0.2, 0.5, 0.7, 0.9, 1.0}) {
    EXPECT_NEAR(g(u), 1.0 - phi.integral_to(1.0 - u), 1e-15) << u;
  }
}

}  // namespace
}  // namespace riskmdp
