#include "housefolio/valuefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

namespace housefolio {

namespace {

constexpr double kRootLower = 1e-10;
constexpr double kRootUpperStart = 1.0;
constexpr double kRootUpperMax = 1e6;
constexpr double kResidualTol = 1e-12;
constexpr double kTieTolerance = 1e-9;

/// G(f) = a + b*f^theta + c*(1 + k*f)^theta - 1 with k = beta^(-1/theta).
struct CaseEquation {
  double retained_term = 0.0;
  double liquid_term = 0.0;
  double free_term = 0.0;
  double k = 0.0;
  double theta = 0.0;

  double operator()(double f) const {
    double g = retained_term + liquid_term * std::pow(f, theta) - 1.0;
    if (free_term != 0.0) g += free_term * std::pow(1.0 + k * f, theta);
    return g;
  }
};

bool bankrupt(const StateReturns& sr) {
  for (State s : kStates) {
    if (!(sr.liquid[s] > 0.0)) return true;
  }
  return !(sr.retained > 0.0);
}

CaseEquation make_equation(CaseId c, const StateReturns& sr, const PeriodParams& p) {
  const double th = p.theta;
  const double one_minus = 1.0 - th;
  const PerState<bool> binds = binding_states(c);

  double bound_prob = 0.0;
  double shock_liquid = 0.0;
  double bound_liquid = 0.0;
  double free_resources = 0.0;
  for (State s : kStates) {
    const double lw_pow = std::pow(sr.liquid[s], one_minus);
    shock_liquid += p.prob[s] * lw_pow;
    if (binds[s]) {
      bound_prob += p.prob[s];
      bound_liquid += p.prob[s] * lw_pow;
    } else {
      free_resources += p.prob[s] * std::pow(sr.resources[s], one_minus);
    }
  }

  CaseEquation eq;
  eq.theta = th;
  eq.k = std::pow(p.beta, -1.0 / th);
  eq.retained_term = p.beta * std::pow(sr.retained, one_minus) * (p.mu + (1.0 - p.mu) * bound_prob);
  eq.liquid_term = std::pow(p.gamma, th) * p.mu * shock_liquid + (1.0 - p.mu) * bound_liquid;
  eq.free_term = (1.0 - p.mu) * p.beta * free_resources;
  return eq;
}

std::optional<double> closed_form_all_bound(const StateReturns& sr, const PeriodParams& p) {
  const double th = p.theta;
  const double numerator = 1.0 - p.beta * std::pow(sr.retained, 1.0 - th);
  if (!(numerator > 0.0)) return std::nullopt;
  const double shock_weight = p.mu * std::pow(p.gamma, th) + (1.0 - p.mu);
  double expected = 0.0;
  for (State s : kStates) expected += p.prob[s] * std::pow(sr.liquid[s], 1.0 - th);
  return std::pow(numerator / shock_weight, 1.0 / th) * std::pow(expected, -1.0 / th);
}

std::optional<double> bracket_and_bisect(const CaseEquation& g) {
  double lo = kRootLower;
  double g_lo = g(lo);
  if (!(g_lo < 0.0)) return std::nullopt;
  double hi = kRootUpperStart;
  double g_hi = g(hi);
  while (g_hi < 0.0) {
    lo = hi;
    hi *= 10.0;
    if (hi > kRootUpperMax) return std::nullopt;
    g_hi = g(hi);
  }
  if (!std::isfinite(g_hi)) return std::nullopt;
  if (g_hi == 0.0) return hi;

  double best = hi;
  double best_abs = std::abs(g_hi);
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) return best;  // bracket exhausted at machine precision
    const double gm = g(mid);
    if (std::abs(gm) <= kResidualTol) return mid;
    if (std::abs(gm) < best_abs) {
      best = mid;
      best_abs = std::abs(gm);
    }
    if (gm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
}

std::optional<double> case_value(CaseId c, const StateReturns& sr, const PeriodParams& p) {
  if (c == CaseId::F1) return closed_form_all_bound(sr, p);
  return bracket_and_bisect(make_equation(c, sr, p));
}

}  // namespace

const char* case_name(CaseId c) {
  switch (c) {
    case CaseId::F1: return "F1";
    case CaseId::F2: return "F2";
    case CaseId::F3: return "F3";
    case CaseId::F4: return "F4";
    case CaseId::F5: return "F5";
    case CaseId::F6: return "F6";
    case CaseId::F7: return "F7";
    case CaseId::F8: return "F8";
  }
  return "F?";
}

PerState<bool> binding_states(CaseId c) {
  // Order: H, M, L.
  switch (c) {
    case CaseId::F1: return {{true, true, true}};
    case CaseId::F2: return {{false, false, false}};
    case CaseId::F3: return {{true, true, false}};
    case CaseId::F4: return {{true, false, true}};
    case CaseId::F5: return {{false, true, true}};
    case CaseId::F6: return {{true, false, false}};
    case CaseId::F7: return {{false, true, false}};
    case CaseId::F8: return {{false, false, true}};
  }
  return {};
}

bool binding_pattern_monotone(CaseId c) {
  const auto b = binding_states(c);
  return (!b[State::High] || b[State::Mid]) && (!b[State::Mid] || b[State::Low]);
}

RootBracketingError::RootBracketingError(CaseId c, const PortfolioWeights& w)
    : ValueFunctionError(fmt::format("root bracketing failed for {} at weights ({}, {}, {}, {})", case_name(c),
                                     w.stocks, w.deposits, w.housing, w.mortgage)),
      case_id(c),
      weights(w) {}

StateReturns state_returns(const PortfolioWeights& w, const PeriodParams& p) {
  StateReturns sr;
  const double fixed = w.deposits * p.deposit_return + w.housing * p.housing_return + w.mortgage * p.mortgage_rate;
  const double forgone = p.liquidity_form == LiquidityForm::WithForgoneInterest ? w.deposits * p.deposit_return : 0.0;
  const double liquid_assets = w.stocks + w.deposits * (1.0 - p.fee);
  for (State s : kStates) {
    sr.net[s] = w.stocks * p.stock_return[s] + fixed;
    sr.gross[s] = 1.0 + sr.net[s];
    sr.liquid[s] = liquid_assets + sr.net[s] - forgone + p.labor_ratio;
    sr.resources[s] = sr.gross[s] + p.labor_ratio;
  }
  // resources - liquid, the same in every state.
  sr.retained = 1.0 - liquid_assets + forgone;
  return sr;
}

double f1_closed(const PortfolioWeights& w, const PeriodParams& p) {
  const StateReturns sr = state_returns(w, p);
  if (bankrupt(sr)) throw LiquidityBankrupt("liquidity bankrupt state");
  const auto f = closed_form_all_bound(sr, p);
  if (!f) throw ValueFunctionError("closed-form value undefined: discounted retained wealth exceeds one");
  return *f;
}

double case_residual(CaseId c, double f, const StateReturns& sr, const PeriodParams& p) {
  return make_equation(c, sr, p)(f);
}

double f_implicit(CaseId c, const PortfolioWeights& w, const PeriodParams& p) {
  if (c == CaseId::F1) throw ValueFunctionError("F1 has a closed form; use f1_closed");
  const StateReturns sr = state_returns(w, p);
  if (bankrupt(sr)) throw LiquidityBankrupt("liquidity bankrupt state");
  const auto f = bracket_and_bisect(make_equation(c, sr, p));
  if (!f) throw RootBracketingError(c, w);
  return *f;
}

ConsumptionSchedule consumption_from_f(double f, const StateReturns& sr, const PeriodParams& p) {
  ConsumptionSchedule cs;
  const double kf = std::pow(p.beta, -1.0 / p.theta) * f;
  for (State s : kStates) {
    cs.liquid[s] = sr.liquid[s];
    cs.shock[s] = sr.liquid[s];
    cs.foc[s] = kf * sr.resources[s] / (1.0 + kf);
    cs.normal[s] = std::min(cs.foc[s], sr.liquid[s]);
  }
  return cs;
}

ConsumptionSchedule consumption_from_f(double f, const PortfolioWeights& w, const PeriodParams& p) {
  return consumption_from_f(f, state_returns(w, p), p);
}

bool case_consistent(CaseId c, const ConsumptionSchedule& cs, double rel_tol) {
  const PerState<bool> binds = binding_states(c);
  for (State s : kStates) {
    const double slack = rel_tol * cs.liquid[s];
    if (binds[s]) {
      if (!(cs.foc[s] > cs.liquid[s] - slack)) return false;
    } else {
      if (!(cs.foc[s] <= cs.liquid[s] + slack)) return false;
    }
  }
  return true;
}

Evaluation select_case(const PortfolioWeights& w, const PeriodParams& p) {
  Evaluation ev;
  const StateReturns sr = state_returns(w, p);
  if (bankrupt(sr)) {
    ev.status = EvalStatus::LiquidityBankrupt;
    return ev;
  }
  if (!(make_equation(CaseId::F2, sr, p)(kRootLower) < 0.0)) {
    ev.status = EvalStatus::Unbounded;
    return ev;
  }

  std::array<std::optional<double>, kCaseTrialOrder.size()> values;
  for (double tol : {0.0, kTieTolerance}) {
    for (std::size_t i = 0; i < kCaseTrialOrder.size(); ++i) {
      const CaseId c = kCaseTrialOrder[i];
      if (tol == 0.0) values[i] = case_value(c, sr, p);
      if (!values[i]) continue;
      const ConsumptionSchedule cs = consumption_from_f(*values[i], sr, p);
      if (case_consistent(c, cs, tol)) {
        ev.case_id = c;
        ev.value = *values[i];
        ev.consumption = cs;
        ev.tolerant_match = tol != 0.0;
        return ev;
      }
    }
  }
  throw NoConsistentCase(fmt::format("no consistent value-function case at weights ({}, {}, {}, {})", w.stocks,
                                     w.deposits, w.housing, w.mortgage));
}

}  // namespace housefolio
