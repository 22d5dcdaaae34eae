#include "riskmdp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "riskmdp/error.hpp"

namespace riskmdp {

namespace {

constexpr double kSumTolerance = 1e-9;

// Sorts by atom, merges exact duplicates and drops zero mass. Weights are not
// normalized here.
void sort_and_merge(std::vector<std::pair<double, double>>& pairs,
                    std::vector<double>& atoms, std::vector<double>& weights) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  atoms.clear();
  weights.clear();
  for (const auto& [x, w] : pairs) {
    if (w <= 0.0) continue;
    if (!atoms.empty() && atoms.back() == x) {
      weights.back() += w;
    } else {
      atoms.push_back(x);
      weights.push_back(w);
    }
  }
}

}  // namespace

DiscreteDistribution DiscreteDistribution::make(std::span<const double> atoms,
                                                std::span<const double> probs) {
  if (atoms.size() != probs.size() || atoms.empty()) {
    throw Error(ErrorCode::LengthMismatch,
                "atoms and probabilities must have equal nonzero length (got " +
                    std::to_string(atoms.size()) + " and " + std::to_string(probs.size()) +
                    ")");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      throw Error(ErrorCode::NegativeProbability,
                  "probability " + std::to_string(i) + " is negative or not finite");
    }
    if (!std::isfinite(atoms[i])) {
      throw Error(ErrorCode::DomainError, "atom " + std::to_string(i) + " is not finite");
    }
    total += probs[i];
  }
  if (total == 0.0) throw Error(ErrorCode::ZeroMass, "all probabilities are zero");
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::BadNormalization,
                "probabilities sum to " + std::to_string(total) + ", expected 1");
  }

  std::vector<std::pair<double, double>> pairs(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) pairs[i] = {atoms[i], probs[i]};
  std::vector<double> xs, ws;
  sort_and_merge(pairs, xs, ws);
  return from_sorted_unique(std::move(xs), std::move(ws), true);
}

DiscreteDistribution DiscreteDistribution::point_mass(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::DomainError, "point mass must be finite");
  return from_sorted_unique({x}, {1.0}, false);
}

DiscreteDistribution DiscreteDistribution::from_sorted_unique(std::vector<double> atoms,
                                                              std::vector<double> weights,
                                                              bool renormalize) {
  DiscreteDistribution d;
  if (renormalize) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
  }
  d.cumulative_.resize(weights.size());
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    d.cumulative_[i] = running;
  }
  d.cumulative_.back() = 1.0;
  d.atoms_ = std::move(atoms);
  d.probs_ = std::move(weights);
  return d;
}

double DiscreteDistribution::cdf(double x) const noexcept {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteDistribution::survival(double x) const noexcept { return 1.0 - cdf(x); }

double DiscreteDistribution::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::DomainError, "quantile level must lie in (0, 1], got " +
                                            std::to_string(u));
  }
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double DiscreteDistribution::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) m += atoms_[i] * probs_[i];
  return m;
}

double DiscreteDistribution::quantile_integral(double lo, double hi) const {
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) {
    throw Error(ErrorCode::DomainError, "quantile integral bounds must satisfy 0 <= lo <= hi <= 1");
  }
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double left = std::max(prev, lo);
    const double right = std::min(cumulative_[i], hi);
    if (right > left) acc += atoms_[i] * (right - left);
    prev = cumulative_[i];
    if (prev >= hi) break;
  }
  return acc;
}

DiscreteDistribution DiscreteDistribution::pushforward(
    const std::function<double(double)>& f) const {
  std::vector<std::pair<double, double>> pairs(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const double y = f(atoms_[i]);
    if (!std::isfinite(y)) throw Error(ErrorCode::DomainError, "pushforward produced a non-finite value");
    pairs[i] = {y, probs_[i]};
  }
  std::vector<double> xs, ws;
  sort_and_merge(pairs, xs, ws);
  // Masses are already normalized; merging only regroups them.
  return from_sorted_unique(std::move(xs), std::move(ws), false);
}

}  // namespace riskmdp
