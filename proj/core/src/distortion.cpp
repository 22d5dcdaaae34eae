#include "riskmdp/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

constexpr double kSpectrumNormTolerance = 1e-12;
constexpr double kConcavityTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double spectrum_mass(const std::vector<StepSpectrum::Step>& steps) {
  double mass = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double to = i + 1 < steps.size() ? steps[i + 1].from : 1.0;
    mass += steps[i].value * (to - steps[i].from);
  }
  return mass;
}

void check_steps_shape(const std::vector<StepSpectrum::Step>& steps) {
  if (steps.empty() || steps.front().from != 0.0) {
    throw Error(ErrorCode::InvalidSpec, "spectrum must start at u = 0");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (!std::isfinite(s.value) || s.value < 0.0) {
      throw Error(ErrorCode::InvalidSpec, "spectrum values must be finite and nonnegative");
    }
    if (!(s.from >= 0.0 && s.from < 1.0)) {
      throw Error(ErrorCode::InvalidSpec, "spectrum breakpoints must lie in [0, 1)");
    }
    if (i > 0) {
      if (!(s.from > steps[i - 1].from)) {
        throw Error(ErrorCode::InvalidSpec, "spectrum breakpoints must be strictly increasing");
      }
      if (s.value < steps[i - 1].value) {
        throw Error(ErrorCode::InvalidSpec, "spectrum must be nondecreasing");
      }
    }
  }
}

}  // namespace

StepSpectrum::StepSpectrum(std::vector<Step> steps) : steps_(std::move(steps)) {
  check_steps_shape(steps_);
  const double mass = spectrum_mass(steps_);
  if (std::abs(mass - 1.0) > kSpectrumNormTolerance) {
    throw Error(ErrorCode::InvalidSpec,
                "spectrum must integrate to 1, got " + std::to_string(mass));
  }
}

StepSpectrum StepSpectrum::expected_shortfall(double level) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "expected shortfall level must lie in [0, 1)");
  }
  if (level == 0.0) return StepSpectrum({{0.0, 1.0}});
  return StepSpectrum({{0.0, 0.0}, {level, 1.0 / (1.0 - level)}});
}

StepSpectrum StepSpectrum::normalized(std::vector<Step> steps) {
  check_steps_shape(steps);
  const double mass = spectrum_mass(steps);
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidSpec, "spectrum has zero mass");
  for (auto& s : steps) s.value /= mass;
  return StepSpectrum(std::move(steps));
}

double StepSpectrum::operator()(double u) const noexcept {
  const auto it = std::upper_bound(steps_.begin(), steps_.end(), u,
                                   [](double x, const Step& s) { return x < s.from; });
  if (it == steps_.begin()) return steps_.front().value;
  return std::prev(it)->value;
}

double StepSpectrum::integral_to(double x) const noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const double from = steps_[i].from;
    if (from >= x) break;
    const double to = std::min(i + 1 < steps_.size() ? steps_[i + 1].from : 1.0, x);
    acc += steps_[i].value * (to - from);
  }
  return std::min(acc, 1.0);
}

DistortionFunction::DistortionFunction(Representation rep) : rep_(std::move(rep)) {
  std::visit(overloaded{
                 [](const Identity&) {},
                 [](const VarIndicator& v) {
                   if (!(v.level > 0.0 && v.level < 1.0)) {
                     throw Error(ErrorCode::InvalidSpec, "VaR level must lie in (0, 1)");
                   }
                 },
                 [](const EsCap& e) {
                   if (!(e.level >= 0.0 && e.level < 1.0)) {
                     throw Error(ErrorCode::InvalidSpec, "ES level must lie in [0, 1)");
                   }
                 },
                 [](const PiecewiseLinear& p) {
                   const auto& k = p.knots;
                   if (k.size() < 2 || k.front().first != 0.0 || k.back().first != 1.0) {
                     throw Error(ErrorCode::InvalidSpec,
                                 "piecewise-linear distortion needs knots at u = 0 and u = 1");
                   }
                   if (k.front().second != 0.0 || k.back().second != 1.0) {
                     throw Error(ErrorCode::InvalidSpec, "distortion must satisfy g(0)=0, g(1)=1");
                   }
                   for (std::size_t i = 1; i < k.size(); ++i) {
                     if (!(k[i].first > k[i - 1].first)) {
                       throw Error(ErrorCode::InvalidSpec, "knot abscissae must strictly increase");
                     }
                     if (!(k[i].second >= k[i - 1].second)) {
                       throw Error(ErrorCode::InvalidSpec, "distortion must be nondecreasing");
                     }
                   }
                 },
             },
             rep_);
}

DistortionFunction DistortionFunction::from_spectrum(const StepSpectrum& phi) {
  // gbar is linear between breakpoints, so g(u) = 1 - gbar(1-u) is linear
  // between the mirrored breakpoints.
  std::vector<std::pair<double, double>> knots;
  knots.reserve(phi.steps().size() + 1);
  knots.emplace_back(0.0, 0.0);
  for (auto it = phi.steps().rbegin(); it != phi.steps().rend(); ++it) {
    if (it->from == 0.0) continue;
    const double u = 1.0 - it->from;
    knots.emplace_back(u, 1.0 - phi.integral_to(it->from));
  }
  knots.emplace_back(1.0, 1.0);
  return piecewise_linear(std::move(knots));
}

double DistortionFunction::operator()(double u) const noexcept {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return std::visit(
      overloaded{
          [u](const Identity&) { return u; },
          [u](const VarIndicator& v) { return u > 1.0 - v.level ? 1.0 : 0.0; },
          [u](const EsCap& e) { return std::min(u / (1.0 - e.level), 1.0); },
          [u](const PiecewiseLinear& p) {
            const auto& k = p.knots;
            const auto it = std::upper_bound(
                k.begin(), k.end(), u, [](double x, const auto& knot) { return x < knot.first; });
            const auto& hi = *it;
            const auto& lo = *std::prev(it);
            const double t = (u - lo.first) / (hi.first - lo.first);
            return lo.second + t * (hi.second - lo.second);
          },
      },
      rep_);
}

bool DistortionFunction::is_concave() const noexcept {
  return std::visit(overloaded{
                        [](const Identity&) { return true; },
                        [](const VarIndicator&) { return false; },
                        [](const EsCap&) { return true; },
                        [](const PiecewiseLinear& p) {
                          const auto& k = p.knots;
                          double prev_slope = INFINITY;
                          for (std::size_t i = 1; i < k.size(); ++i) {
                            const double slope =
                                (k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first);
                            if (slope > prev_slope + kConcavityTolerance) return false;
                            prev_slope = slope;
                          }
                          return true;
                        },
                    },
                    rep_);
}

}  // namespace riskmdp
