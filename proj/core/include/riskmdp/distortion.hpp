#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace riskmdp {

/// Right-continuous nondecreasing step function phi on [0, 1) with
/// integral 1. Breakpoint i holds value phi_i on [u_i, u_{i+1}).
class StepSpectrum {
 public:
  struct Step {
    double from;
    double value;
    bool operator==(const Step&) const = default;
  };

  /// Validates: first step starts at 0, starts strictly increasing and < 1,
  /// values nonnegative and nondecreasing, integral equal to 1 within 1e-12.
  /// Throws Error{InvalidSpec}.
  explicit StepSpectrum(std::vector<Step> steps);

  /// Spectrum of expected shortfall at `level`: (1/(1-level)) on [level, 1).
  static StepSpectrum expected_shortfall(double level);
  /// Rescales arbitrary nonnegative nondecreasing steps to integrate to one.
  static StepSpectrum normalized(std::vector<Step> steps);

  const std::vector<Step>& steps() const noexcept { return steps_; }

  double operator()(double u) const noexcept;
  /// Dual distortion gbar(x) = integral of phi over [0, x].
  double integral_to(double x) const noexcept;

  bool operator==(const StepSpectrum&) const = default;

 private:
  std::vector<Step> steps_;
};

/// Distortion function g: [0,1] -> [0,1], nondecreasing, g(0)=0, g(1)=1.
class DistortionFunction {
 public:
  struct Identity {
    bool operator==(const Identity&) const = default;
  };
  /// g(u) = 1 on (1 - level, 1], 0 otherwise. Induces value-at-risk.
  struct VarIndicator {
    double level;
    bool operator==(const VarIndicator&) const = default;
  };
  /// g(u) = min(u / (1 - level), 1). Induces expected shortfall.
  struct EsCap {
    double level;
    bool operator==(const EsCap&) const = default;
  };
  /// Linear interpolation between knots (u, g(u)); u = 0 and u = 1 present.
  struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;
    bool operator==(const PiecewiseLinear&) const = default;
  };
  using Representation = std::variant<Identity, VarIndicator, EsCap, PiecewiseLinear>;

  /// Throws Error{InvalidSpec} if the representation is not a distortion.
  explicit DistortionFunction(Representation rep);

  static DistortionFunction identity() { return DistortionFunction(Identity{}); }
  static DistortionFunction var_indicator(double level) {
    return DistortionFunction(VarIndicator{level});
  }
  static DistortionFunction es_cap(double level) { return DistortionFunction(EsCap{level}); }
  static DistortionFunction piecewise_linear(std::vector<std::pair<double, double>> knots) {
    return DistortionFunction(PiecewiseLinear{std::move(knots)});
  }
  /// g(u) = 1 - gbar(1 - u) with gbar the integral of the spectrum.
  static DistortionFunction from_spectrum(const StepSpectrum& phi);

  const Representation& representation() const noexcept { return rep_; }

  double operator()(double u) const noexcept;
  /// gbar(u) = 1 - g(1 - u).
  double dual(double u) const noexcept { return 1.0 - (*this)(1.0 - u); }
  bool is_concave() const noexcept;

  bool operator==(const DistortionFunction&) const = default;

 private:
  Representation rep_;
};

}  // namespace riskmdp
