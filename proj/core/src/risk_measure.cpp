#include "riskmdp/risk_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

constexpr double kEntropicExponentLimit = 700.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Telescoping form of the distortion integral on sorted atoms:
// sum_i x_i * (g(S_{i-1}) - g(S_i)) with S_i = 1 - F_i.
double evaluate_distortion(const DistortionFunction& g, const DiscreteDistribution& d) {
  const auto xs = d.atoms();
  const auto cum = d.cumulative();
  double acc = 0.0;
  double g_prev = 1.0;  // g(S_0) = g(1)
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double g_cur = g(1.0 - cum[i]);
    acc += xs[i] * (g_prev - g_cur);
    g_prev = g_cur;
  }
  return acc;
}

// sum_i x_i * (gbar(F_i) - gbar(F_{i-1})).
double evaluate_spectral(const StepSpectrum& phi, const DiscreteDistribution& d) {
  const auto xs = d.atoms();
  const auto cum = d.cumulative();
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cur = phi.integral_to(cum[i]);
    acc += xs[i] * (cur - prev);
    prev = cur;
  }
  return acc;
}

double evaluate_entropic(double gamma, const DiscreteDistribution& d) {
  const double extent = std::max(std::abs(d.min()), std::abs(d.max()));
  if (gamma * extent > kEntropicExponentLimit) {
    throw Error(ErrorCode::Overflow, "entropic risk measure: gamma * max|x| exceeds 700");
  }
  const double top = gamma * d.max();
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sum += d.probs()[i] * std::exp(gamma * d.atoms()[i] - top);
  }
  return (top + std::log(sum)) / gamma;
}

std::string fmt_level(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Adds the rank weights of `rm` for sample points visited in `order`
// (descending value), scaled by `scale`, into `q`.
void accumulate_dual(const RiskMeasure& rm, std::span<const double> probs,
                     const std::vector<std::size_t>& order, double scale, std::vector<double>& q) {
  const auto add_concave = [&](auto&& g) {
    double top_mass = 0.0;
    double g_prev = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      top_mass += probs[order[k]];
      const double g_cur = k + 1 == order.size() ? 1.0 : g(std::min(top_mass, 1.0));
      q[order[k]] += scale * (g_cur - g_prev);
      g_prev = g_cur;
    }
  };
  std::visit(
      overloaded{
          [&](const RiskMeasure::Expectation&) {
            for (std::size_t i = 0; i < probs.size(); ++i) q[i] += scale * probs[i];
          },
          [&](const RiskMeasure::ExpectedShortfall& es) {
            // Greedy fill from the largest outcome with cap p_i / (1 - level).
            double remaining = 1.0;
            for (const std::size_t i : order) {
              const double take = std::min(probs[i] / (1.0 - es.level), remaining);
              q[i] += scale * take;
              remaining -= take;
              if (remaining <= 0.0) break;
            }
          },
          [&](const RiskMeasure::Spectral& s) {
            add_concave([&](double u) { return 1.0 - s.phi.integral_to(1.0 - u); });
          },
          [&](const RiskMeasure::Distortion& dist) {
            if (!dist.g.is_concave()) {
              throw Error(ErrorCode::NotCoherent, "distortion function is not concave");
            }
            add_concave([&](double u) { return dist.g(u); });
          },
          [&](const RiskMeasure::Mixture& m) {
            accumulate_dual(*m.first, probs, order, scale * m.weight, q);
            accumulate_dual(*m.second, probs, order, scale * (1.0 - m.weight), q);
          },
          [&](const RiskMeasure::ValueAtRisk&) {
            throw Error(ErrorCode::NotCoherent, "value-at-risk is not coherent");
          },
          [&](const RiskMeasure::Entropic&) {
            throw Error(ErrorCode::NotCoherent, "the entropic risk measure is not coherent");
          },
      },
      rm.kind());
}

}  // namespace

RiskMeasure RiskMeasure::expectation() { return RiskMeasure(Expectation{}); }

RiskMeasure RiskMeasure::value_at_risk(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "VaR level must lie in (0, 1)");
  }
  return RiskMeasure(ValueAtRisk{level});
}

RiskMeasure RiskMeasure::expected_shortfall(double level) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "ES level must lie in [0, 1)");
  }
  return RiskMeasure(ExpectedShortfall{level});
}

RiskMeasure RiskMeasure::distortion(DistortionFunction g) {
  return RiskMeasure(Distortion{std::move(g)});
}

RiskMeasure RiskMeasure::spectral(StepSpectrum phi) { return RiskMeasure(Spectral{std::move(phi)}); }

RiskMeasure RiskMeasure::entropic(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidSpec, "entropic gamma must be positive");
  }
  return RiskMeasure(Entropic{gamma});
}

RiskMeasure RiskMeasure::mixture(double weight, RiskMeasure first, RiskMeasure second) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "mixture weight must lie in [0, 1]");
  }
  return RiskMeasure(Mixture{weight, std::make_shared<const RiskMeasure>(std::move(first)),
                             std::make_shared<const RiskMeasure>(std::move(second))});
}

bool RiskMeasure::is_distortion_type() const noexcept {
  return std::visit(overloaded{
                        [](const Entropic&) { return false; },
                        [](const Mixture& m) {
                          return m.first->is_distortion_type() && m.second->is_distortion_type();
                        },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

bool RiskMeasure::is_coherent() const noexcept {
  return std::visit(overloaded{
                        [](const Expectation&) { return true; },
                        [](const ExpectedShortfall&) { return true; },
                        [](const Spectral&) { return true; },
                        [](const Distortion& d) { return d.g.is_concave(); },
                        [](const Mixture& m) {
                          return m.first->is_coherent() && m.second->is_coherent();
                        },
                        [](const auto&) { return false; },
                    },
                    kind_);
}

std::string RiskMeasure::describe() const {
  return std::visit(
      overloaded{
          [](const Expectation&) -> std::string { return "E"; },
          [](const ValueAtRisk& v) { return "VaR(" + fmt_level(v.level) + ")"; },
          [](const ExpectedShortfall& e) { return "ES(" + fmt_level(e.level) + ")"; },
          [](const Distortion&) -> std::string { return "Distortion"; },
          [](const Spectral&) -> std::string { return "Spectral"; },
          [](const Entropic& e) { return "Entropic(" + fmt_level(e.gamma) + ")"; },
          [](const Mixture& m) {
            return fmt_level(m.weight) + "*" + m.first->describe() + "+" +
                   fmt_level(1.0 - m.weight) + "*" + m.second->describe();
          },
      },
      kind_);
}

double evaluate(const RiskMeasure& rm, const DiscreteDistribution& d) {
  return std::visit(
      overloaded{
          [&](const RiskMeasure::Expectation&) { return d.mean(); },
          [&](const RiskMeasure::ValueAtRisk& v) { return d.quantile(v.level); },
          [&](const RiskMeasure::ExpectedShortfall& e) {
            if (e.level == 0.0) return d.mean();
            return d.quantile_integral(e.level, 1.0) / (1.0 - e.level);
          },
          [&](const RiskMeasure::Distortion& dist) { return evaluate_distortion(dist.g, d); },
          [&](const RiskMeasure::Spectral& s) { return evaluate_spectral(s.phi, d); },
          [&](const RiskMeasure::Entropic& e) { return evaluate_entropic(e.gamma, d); },
          [&](const RiskMeasure::Mixture& m) {
            return m.weight * evaluate(*m.first, d) + (1.0 - m.weight) * evaluate(*m.second, d);
          },
      },
      rm.kind());
}

std::vector<double> dual_weights(const RiskMeasure& rm, std::span<const double> values,
                                 std::span<const double> probs) {
  if (values.size() != probs.size()) {
    throw Error(ErrorCode::LengthMismatch, "values and probabilities differ in length");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] > values[r]; });
  std::vector<double> q(values.size(), 0.0);
  accumulate_dual(rm, probs, order, 1.0, q);
  return q;
}

DualSolution dual_sup(const RiskMeasure& rm, const DiscreteDistribution& d) {
  DualSolution out{0.0, dual_weights(rm, d.atoms(), d.probs())};
  for (std::size_t i = 0; i < d.size(); ++i) out.value += out.density[i] * d.atoms()[i];
  return out;
}

}  // namespace riskmdp
