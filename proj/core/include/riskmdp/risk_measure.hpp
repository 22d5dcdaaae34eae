#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "riskmdp/distortion.hpp"
#include "riskmdp/distribution.hpp"

namespace riskmdp {

/// Declarative description of a law-invariant monetary risk measure.
///
/// Instances are immutable values; mixtures share their components.
class RiskMeasure {
 public:
  struct Expectation {};
  struct ValueAtRisk {
    double level;  // (0, 1)
  };
  struct ExpectedShortfall {
    double level;  // [0, 1)
  };
  struct Distortion {
    DistortionFunction g;
  };
  struct Spectral {
    StepSpectrum phi;
  };
  struct Entropic {
    double gamma;  // > 0
  };
  struct Mixture {
    double weight;  // [0, 1], weight of `first`
    std::shared_ptr<const RiskMeasure> first;
    std::shared_ptr<const RiskMeasure> second;
  };
  using Kind = std::variant<Expectation, ValueAtRisk, ExpectedShortfall, Distortion, Spectral,
                            Entropic, Mixture>;

  static RiskMeasure expectation();
  static RiskMeasure value_at_risk(double level);
  static RiskMeasure expected_shortfall(double level);
  static RiskMeasure distortion(DistortionFunction g);
  static RiskMeasure spectral(StepSpectrum phi);
  static RiskMeasure entropic(double gamma);
  static RiskMeasure mixture(double weight, RiskMeasure first, RiskMeasure second);

  const Kind& kind() const noexcept { return kind_; }

  /// Monotone, translation invariant, normalized, positive homogeneous and
  /// comonotonic additive (every kind except entropic, and mixtures thereof).
  bool is_distortion_type() const noexcept;
  /// Additionally subadditive: expectation, ES, spectral, concave distortion,
  /// and mixtures of those.
  bool is_coherent() const noexcept;
  bool is_positive_homogeneous() const noexcept { return is_distortion_type(); }

  /// Short human-readable label, e.g. "ES(0.9)".
  std::string describe() const;

 private:
  explicit RiskMeasure(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Exact value of `rm` on the law `d`.
/// Throws Error{Overflow} when the entropic guard gamma * max|x| <= 700 trips.
double evaluate(const RiskMeasure& rm, const DiscreteDistribution& d);

/// Maximizing reweighting of the dual representation of a coherent measure.
struct DualSolution {
  double value;
  /// Probability mass per atom of the evaluated law (sums to one).
  std::vector<double> density;
};

/// rho(X) = max_Q E^Q[X] for coherent kinds. The maximizer is the greedy
/// capped fill for ES and the comonotone rank weights for spectral and
/// concave-distortion kinds. Throws Error{NotCoherent} otherwise.
DualSolution dual_sup(const RiskMeasure& rm, const DiscreteDistribution& d);

/// Rank weights of the comonotone maximizer for values that need not be
/// sorted or distinct (one entry per sample point). Entries of `probs` must
/// be nonnegative and sum to one. Throws Error{NotCoherent}.
std::vector<double> dual_weights(const RiskMeasure& rm, std::span<const double> values,
                                 std::span<const double> probs);

}  // namespace riskmdp
