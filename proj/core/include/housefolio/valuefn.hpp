#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "housefolio/model.hpp"

namespace housefolio {

/// Value-function expression for a fixed weight vector, named by which
/// normal-regime liquidity constraints bind:
///   F1 all states, F2 none, F3 {H,M}, F4 {H,L}, F5 {M,L}, F6 {H}, F7 {M}, F8 {L}.
enum class CaseId : int { F1 = 1, F2, F3, F4, F5, F6, F7, F8 };

inline constexpr std::array<CaseId, 8> kCaseTrialOrder{CaseId::F2, CaseId::F1, CaseId::F3, CaseId::F4,
                                                       CaseId::F5, CaseId::F6, CaseId::F7, CaseId::F8};

const char* case_name(CaseId c);
/// States whose normal-regime consumption is pinned to liquid wealth.
PerState<bool> binding_states(CaseId c);
/// True for patterns where binding at a better state implies binding at every worse state.
bool binding_pattern_monotone(CaseId c);

class ValueFunctionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Liquid wealth is nonpositive in some state; the 1-theta power is undefined.
class LiquidityBankrupt : public ValueFunctionError {
 public:
  using ValueFunctionError::ValueFunctionError;
};

class RootBracketingError : public ValueFunctionError {
 public:
  RootBracketingError(CaseId c, const PortfolioWeights& w);
  CaseId case_id;
  PortfolioWeights weights;
};

class NoConsistentCase : public ValueFunctionError {
 public:
  using ValueFunctionError::ValueFunctionError;
};

/// Per-unit-wealth quantities for one weight vector.
struct StateReturns {
  PerState<double> net{};        ///< r_p^i
  PerState<double> gross{};      ///< R_p^i = 1 + r_p^i
  PerState<double> liquid{};     ///< lw^i: consumable resources incl. labor income
  PerState<double> resources{};  ///< R_p^i + labor ratio, wealth available before consumption
  /// Wealth carried to the next period after consuming all liquid wealth
  /// (identical across states).
  double retained = 0.0;
};

StateReturns state_returns(const PortfolioWeights& w, const PeriodParams& p);

/// Consumption per unit of wealth in the six regime/state combinations.
struct ConsumptionSchedule {
  PerState<double> shock{};   ///< C1^i = lw^i
  PerState<double> normal{};  ///< C2^i = min(C_foc^i, lw^i)
  PerState<double> foc{};     ///< first-order-condition consumption
  PerState<double> liquid{};  ///< constrained consumption lw^i
};

/// Closed-form value when the liquidity constraint binds in every state.
/// Throws LiquidityBankrupt for nonpositive liquid wealth, ValueFunctionError
/// when the retained-wealth discount term leaves no positive value.
double f1_closed(const PortfolioWeights& w, const PeriodParams& p);

/// Left side minus one of the case's defining equation; zero at the case's value.
double case_residual(CaseId c, double f, const StateReturns& sr, const PeriodParams& p);

/// Unique positive root of the case's equation (F2..F8), bracketed from
/// (1e-10, 1) with the upper end grown by 10x up to 1e6, then bisected to
/// |residual| <= 1e-12. Throws RootBracketingError without a sign change.
double f_implicit(CaseId c, const PortfolioWeights& w, const PeriodParams& p);

ConsumptionSchedule consumption_from_f(double f, const StateReturns& sr, const PeriodParams& p);
ConsumptionSchedule consumption_from_f(double f, const PortfolioWeights& w, const PeriodParams& p);

/// Whether the schedule's FOC/constraint comparisons match the case's
/// binding pattern. Ties (foc == lw) count as non-binding. `rel_tol` widens
/// both comparisons by rel_tol * lw.
bool case_consistent(CaseId c, const ConsumptionSchedule& cs, double rel_tol = 0.0);

enum class EvalStatus {
  Ok,
  LiquidityBankrupt,  ///< nonpositive liquid wealth in some state
  Unbounded,          ///< value is -infinity (f <= 1e-10): no case has a positive root
};

struct Evaluation {
  EvalStatus status = EvalStatus::Ok;
  CaseId case_id = CaseId::F2;
  double value = 0.0;  ///< f; 0 unless status is Ok
  ConsumptionSchedule consumption{};
  /// Accepted only on the second pass with widened tie tolerance.
  bool tolerant_match = false;
};

/// Tries F2, F1, F3..F8 and returns the first case whose consumption
/// conditions hold at its own value. Throws NoConsistentCase if none does.
Evaluation select_case(const PortfolioWeights& w, const PeriodParams& p);

}  // namespace housefolio
