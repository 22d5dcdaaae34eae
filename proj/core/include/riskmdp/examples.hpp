#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskmdp/model.hpp"
#include "riskmdp/risk_measure.hpp"
#include "riskmdp/solvers.hpp"

namespace riskmdp {

// ---- House selling -------------------------------------------------------

struct HouseSellingParams {
  /// Strictly increasing offer grid and its law.
  std::vector<double> offers;
  std::vector<double> offer_probs;
  double rent = 0.0;
  double discount = 1.0;
  std::size_t horizon = 1;
};

inline constexpr ActionIndex kStop = 0;
inline constexpr ActionIndex kContinue = 1;

/// States 0..k-1 hold the offers, state k is the absorbing sold state.
/// Stopping pays the offer and moves to sold; continuing pays the rent and
/// draws the next offer. Terminal cost is the offer (0 once sold).
/// Throws Error{InvalidParams}.
MdpModel build_house_selling(const HouseSellingParams& params);

/// t_n = rent + rho_n(beta * J_{n+1}(Z)) for n = 0..N-1, from solve_finite
/// values of the house-selling model.
std::vector<double> house_selling_thresholds(const HouseSellingParams& params,
                                             std::span<const RiskMeasure> rms,
                                             const FiniteSolveResult& result);

struct ThresholdResult {
  bool is_threshold = false;
  /// Largest label at which the rule stops; -inf when it never stops.
  double threshold = 0.0;
  /// A continuing state with a larger-label stopping state above it.
  std::optional<StateIndex> witness;
};

/// Checks that `rule` (one action per labelled state) stops exactly on a
/// lower set of the labels.
ThresholdResult extract_threshold(std::span<const ActionIndex> rule,
                                  std::span<const double> labels, ActionIndex stop = kStop);

// ---- Casino --------------------------------------------------------------

struct CasinoParams {
  double p = 0.5;
  std::size_t horizon = 1;
  /// Largest initial capital; the grid is {0, ..., 2^N * max_capital}.
  std::size_t max_capital = 4;
};

/// State x is the capital x, action a the bet with D(x) = {0..min(x, G-x)},
/// disturbance labels {-1, +1} with probabilities {1-p, p}, zero running
/// cost, terminal cost -x. Throws Error{InvalidParams}.
MdpModel build_casino(const CasinoParams& params);

/// rho(-Z) for P(Z = 1) = p = 1 - P(Z = -1).
double casino_rho_minus_z(double p, const RiskMeasure& rm);

/// -x (1 - rho(-Z))^(N-n) if rho(-Z) < 0, else -x.
double casino_closed_form(double p, const RiskMeasure& rm, std::size_t steps_to_go, double x);

/// a = min(x, G - x) at every stage.
Policy casino_bold_play(const MdpModel& casino);
Policy casino_never_bet(const MdpModel& casino);

/// Bracket [lo, hi] of width <= `width` with rho(-Z) >= 0 at lo and
/// rho(-Z) < 0 at hi, found by bisection on p.
std::pair<double, double> casino_p_star_bracket(const RiskMeasure& rm, double width = 1e-9);

// ---- Cash balance --------------------------------------------------------

struct CashBalanceParams {
  /// Grid {-radius, ..., radius}.
  int radius = 10;
  /// Holding cost L on the grid, one entry per level; convex, >= 0, L(0) = 0.
  std::vector<double> holding;
  double cost_up = 1.0;
  double cost_down = 1.0;
  /// Integer cash changes and their law.
  std::vector<int> shocks;
  std::vector<double> shock_probs;
  double discount = 0.9;

  /// L(x) = scale * x^2 on the grid.
  static std::vector<double> quadratic(int radius, double scale = 1.0);
};

/// Action a is the index of the new cash level; D(x) is the band of levels
/// from which every shock stays on the grid; cost c(a - x) + L(a) with
/// c(y) = c_u y^+ + c_d y^-, transition a - z. Throws Error{InvalidParams}.
MdpModel build_cash_balance(const CashBalanceParams& params);

struct TwoThresholdResult {
  bool is_two_threshold = false;
  double s_minus = 0.0;
  double s_plus = 0.0;
  /// A threshold sits on the edge of the admissible band, so the grid
  /// truncation may be active.
  bool boundary_active = false;
  std::optional<StateIndex> witness;
};

/// Checks f(x) = S- below S-, f(x) = x on [S-, S+], f(x) = S+ above S+.
TwoThresholdResult extract_two_thresholds(const MdpModel& cash, std::span<const ActionIndex> rule);

/// First interior index whose discrete second difference is below -tol.
std::optional<StateIndex> convexity_witness(std::span<const double> values, double tol = 1e-9);

// ---- VaR myopia ----------------------------------------------------------

struct VarMyopicParams {
  /// Strictly increasing state labels.
  std::vector<double> labels;
  /// Index shift of each action.
  std::vector<int> action_shifts;
  /// Index shifts of the disturbance and their law.
  std::vector<int> shocks;
  std::vector<double> shock_probs;
  /// c(x, x') = now * label(x) + next * label(x') + next_sq * label(x')^2.
  double cost_now = 0.0;
  double cost_next = 1.0;
  double cost_next_sq = 0.0;
  double discount = 1.0;
};

/// T(x, a, z) = clamp(x + shift_a + shock_z) on the index grid, every action
/// admissible everywhere, zero terminal cost. Throws Error{InvalidParams}.
MdpModel build_var_myopic(const VarMyopicParams& params);

struct MyopiaReport {
  bool holds = false;
  /// The myopic rule, identical at every stage.
  std::vector<ActionIndex> myopic_rule;
  /// (stage, state) pairs where the myopic action is not a minimizer.
  std::vector<std::pair<std::size_t, StateIndex>> mismatches;
  /// The solver's tie-broken policy is the same at every stage.
  bool solver_stationary = false;
};

/// Compares the minimizers of a -> VaR(label(T(x, a, Z))) with the argmin
/// sets of backward induction under VaR at every stage.
/// Throws Error{MonotonicityViolation} unless the model is monotone with an
/// action-independent cost c(x, x').
MyopiaReport verify_myopia(const MdpModel& m, double level, std::size_t horizon);

/// First (stage, state) where J_n fails to increase with the state label by
/// more than tol, over the given states (all states when empty).
std::optional<std::pair<std::size_t, StateIndex>> increasing_witness(
    const std::vector<ValueFunction>& values, std::span<const double> labels,
    std::span<const StateIndex> states = {}, double tol = 1e-12);

}  // namespace riskmdp
