#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "riskmdp/bounds.hpp"
#include "riskmdp/model.hpp"
#include "riskmdp/risk_measure.hpp"

namespace riskmdp {

struct FiniteSolveResult {
  /// values[n] = J_n for n = 0..N; values[N] is the terminal cost.
  std::vector<ValueFunction> values;
  /// N stages of greedy minimizers, smallest index on ties.
  Policy policy;
  /// Wall time of each stage's sweep, indexed by stage.
  std::vector<double> stage_seconds;
};

/// Backward induction J_N = c_N, J_n = T_n J_{n+1} with stage-n risk measure
/// `rms[n]`. A single-element `rms` is used at every stage.
/// Throws Error{InvalidModel} for an invalid model and Error{InvalidSpec}
/// for a bad horizon or rms length.
FiniteSolveResult solve_finite(const MdpModel& m, std::span<const RiskMeasure> rms,
                               std::size_t horizon);
FiniteSolveResult solve_finite(const MdpModel& m, const RiskMeasure& rm, std::size_t horizon);

/// Values J_{n,pi} for n = 0..N obtained with the fixed-decision operators.
/// Throws Error{InfeasiblePolicy}.
std::vector<ValueFunction> evaluate_policy_finite(const MdpModel& m,
                                                  std::span<const RiskMeasure> rms,
                                                  const Policy& pi, std::size_t horizon);
std::vector<ValueFunction> evaluate_policy_finite(const MdpModel& m, const RiskMeasure& rm,
                                                  const Policy& pi, std::size_t horizon);

struct TraceRow {
  std::size_t iteration;
  double residual;
  double error_bound;
};

struct InfiniteOptions {
  double tol = 1e-8;
  /// Defaults to 10 * ceil(log(tol) / log(alpha * beta)), at most 1e6.
  std::optional<std::size_t> max_iter;
  /// Starting point; zero when absent.
  std::optional<ValueFunction> start;
};

struct InfiniteSolveResult {
  ValueFunction value;
  /// Greedy with respect to `value`.
  Policy policy;
  std::size_t iterations = 0;
  /// ||v_k - v_{k-1}||_b at the last sweep.
  double residual = 0.0;
  /// modulus * residual / (1 - modulus).
  double error_bound = 0.0;
  double modulus = 0.0;
  /// False when max_iter ran out first; the partial result is still filled.
  bool converged = false;
  std::vector<TraceRow> trace;
};

std::size_t default_max_iter(double tol, double modulus);

/// Value iteration from zero with the a-posteriori stopping rule in the
/// b-weighted norm, b = ub - lb.
/// Throws Error{NotContractive} when alpha * beta >= 1, and
/// Error{PreconditionViolated} when the bounds fail, the terminal cost is
/// nonzero or the model carries per-stage costs.
InfiniteSolveResult solve_infinite(const MdpModel& m, const RiskMeasure& rm,
                                   const BoundingSpec& spec, const InfiniteOptions& opts = {});

struct ContractionReport {
  /// max ||Tv1 - Tv2||_b / ||v1 - v2||_b over the sampled pairs.
  double max_ratio = 0.0;
  double modulus = 0.0;
  std::size_t pairs = 0;
  /// Pairs with v1 == v2, excluded from the ratio.
  std::size_t skipped = 0;
  bool within() const noexcept { return max_ratio <= modulus + 1e-9; }
};

/// Samples `trials` pairs in the interval between the global bounds and
/// reports the worst Lipschitz ratio of T. In BoundedBelow mode the samples
/// are increasing in the state index.
/// Throws Error{PreconditionViolated} unless rho is coherent (Coherent mode),
/// distortion-type (ComonotoneMonotone, BoundedBelow) or the mode is
/// BoundedCost, and unless the bounds verify with alpha * beta < 1.
ContractionReport check_contraction(const MdpModel& m, const RiskMeasure& rm,
                                    const BoundingSpec& spec, std::size_t trials,
                                    std::uint64_t seed);

/// J_{k,pi} >= J_{k-1,pi} + (alpha beta)^{k-1} lb for k = 1..N, with
/// J_{k,pi} = T_{d_0} ... T_{d_{k-1}} 0, at tolerance 1e-9.
/// Throws Error{PreconditionViolated} if the bounds do not verify.
bool weak_increase_check(const MdpModel& m, const RiskMeasure& rm, const BoundingSpec& spec,
                         const Policy& pi, std::size_t horizon);

}  // namespace riskmdp
