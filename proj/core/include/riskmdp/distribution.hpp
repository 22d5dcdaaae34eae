#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace riskmdp {

/// Finite-support probability law on the real line.
///
/// Atoms are kept strictly increasing with strictly positive masses that sum
/// to one. Duplicate atoms are merged on exact equality only; no epsilon
/// merging is performed because quantile-type risk measures would otherwise
/// change value.
///
/// The cumulative masses F(x_i) are precomputed, with the last one pinned to
/// exactly 1, and the survival levels are stored as S_i = 1 - F_i so that
/// `survival(x) + cdf(x) == 1` holds in floating point.
class DiscreteDistribution {
 public:
  /// Canonicalizes (sorts, merges, drops zero mass, renormalizes).
  /// Throws Error{LengthMismatch | NegativeProbability | ZeroMass |
  /// BadNormalization}. Input sums may deviate from 1 by at most 1e-9.
  static DiscreteDistribution make(std::span<const double> atoms,
                                   std::span<const double> probs);

  static DiscreteDistribution point_mass(double x);

  std::size_t size() const noexcept { return atoms_.size(); }
  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> probs() const noexcept { return probs_; }
  /// F_i = P(X <= atoms()[i]); back() == 1 exactly.
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  double min() const noexcept { return atoms_.front(); }
  double max() const noexcept { return atoms_.back(); }

  /// P(X <= x).
  double cdf(double x) const noexcept;
  /// P(X > x).
  double survival(double x) const noexcept;
  /// Left-continuous generalized inverse inf{x : F(x) >= u}, u in (0, 1].
  double quantile(double u) const;
  double mean() const noexcept;
  /// Integral of the quantile function over (lo, hi], computed exactly
  /// piecewise over the atom intervals. 0 <= lo <= hi <= 1.
  double quantile_integral(double lo, double hi) const;

  /// Law of f(X). Equal images are merged.
  DiscreteDistribution pushforward(const std::function<double(double)>& f) const;

  bool operator==(const DiscreteDistribution&) const = default;

 private:
  DiscreteDistribution() = default;
  static DiscreteDistribution from_sorted_unique(std::vector<double> atoms,
                                                 std::vector<double> weights,
                                                 bool renormalize);

  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace riskmdp
