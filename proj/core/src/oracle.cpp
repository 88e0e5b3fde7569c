#include "housefolio/oracle.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "housefolio/parallel.hpp"

namespace housefolio {

namespace {

constexpr double kGoldenRelTol = 1e-10;
constexpr std::size_t kBurnIn = 10;
constexpr double kVanishingF = 1e-12;
constexpr double kMaxAbortedShare = 0.01;

/// Per-unit-wealth budget quantities, derived directly from the weights.
struct Budget {
  PerState<double> consumable{};  ///< liquid assets plus return plus labor income
  PerState<double> available{};   ///< gross return plus labor income
  double carried = 0.0;           ///< wealth left after consuming everything liquid
};

Budget make_budget(const PortfolioWeights& w, const PeriodParams& p) {
  Budget b;
  const double cash_out = w.stocks + w.deposits * (1.0 - p.fee);
  const double forgone = p.liquidity_form == LiquidityForm::WithForgoneInterest ? w.deposits * p.deposit_return : 0.0;
  for (State s : kStates) {
    const double r = w.stocks * p.stock_return[s] + w.deposits * p.deposit_return + w.housing * p.housing_return +
                     w.mortgage * p.mortgage_rate;
    b.available[s] = 1.0 + r + p.labor_ratio;
    b.consumable[s] = cash_out + r - forgone + p.labor_ratio;
    if (!(b.consumable[s] > 0.0)) throw InvalidArgument("oracle: nonpositive liquid wealth");
  }
  b.carried = 1.0 - cash_out + forgone;
  if (!(b.carried > 0.0)) throw InvalidArgument("oracle: nonpositive retained wealth");
  return b;
}

double utility(double c, double theta) { return std::pow(c, 1.0 - theta) / (1.0 - theta); }

/// Maximizer and maximum of u(C) + cont * (avail - C)^(1-theta) over C in (0, cap].
std::pair<double, double> best_consumption(double cap, double avail, double cont, const PeriodParams& p) {
  auto h = [&](double c) { return utility(c, p.theta) + cont * std::pow(avail - c, 1.0 - p.theta); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = cap;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double h1 = h(x1);
  double h2 = h(x2);
  const double width = kGoldenRelTol * cap;
  while (b - a > width) {
    if (h1 < h2) {
      a = x1;
      x1 = x2;
      h1 = h2;
      x2 = a + inv_phi * (b - a);
      h2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      h2 = h1;
      x1 = b - inv_phi * (b - a);
      h1 = h(x1);
    }
  }
  double c_best = h1 > h2 ? x1 : x2;
  double h_best = std::max(h1, h2);
  const double h_cap = h(cap);
  if (h_cap >= h_best) {
    c_best = cap;
    h_best = h_cap;
  }
  return {c_best, h_best};
}

double bellman_update(const Budget& b, const PeriodParams& p, double f) {
  const double th = p.theta;
  const double v = std::pow(f, -th) / (1.0 - th);
  const double cont = p.beta * v;
  const double shock_scale = std::pow(p.gamma, th);
  double rhs = 0.0;
  for (State s : kStates) {
    const double shock = shock_scale * utility(b.consumable[s], th) + cont * std::pow(b.carried, 1.0 - th);
    const double normal = best_consumption(b.consumable[s], b.available[s], cont, p).second;
    rhs += p.prob[s] * (p.mu * shock + (1.0 - p.mu) * normal);
  }
  return std::pow((1.0 - th) * rhs, -1.0 / th);
}

double pairwise_sum_range(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_range(x, half) + pairwise_sum_range(x + half, n - half);
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise_sum_range(values.data(), values.size()); }

FixedPointReport fixed_point_f(const PortfolioWeights& w, const PeriodParams& p, double tol, std::size_t max_iter) {
  const Budget b = make_budget(w, p);
  FixedPointReport rep;
  double f = 0.01;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double next = bellman_update(b, p, f);
    const double gap = std::abs(next - f);
    rep.iterations = it;
    rep.last_gap = gap;
    if (it > kBurnIn && gap > prev_gap) rep.monotone_gaps = false;
    f = next;
    if (!(f > kVanishingF)) {
      rep.f = 0.0;
      return rep;
    }
    const double rho = gap / prev_gap;
    if (gap <= tol && rho < 1.0 && gap * rho / (1.0 - rho) <= tol) {
      rep.converged = true;
      break;
    }
    prev_gap = gap;
  }
  rep.f = f;
  return rep;
}

PerState<double> normal_consumption(const PortfolioWeights& w, const PeriodParams& p, double f) {
  const Budget b = make_budget(w, p);
  const double cont = p.beta * std::pow(f, -p.theta) / (1.0 - p.theta);
  PerState<double> c;
  for (State s : kStates) c[s] = best_consumption(b.consumable[s], b.available[s], cont, p).first;
  return c;
}

SimulationReport simulate_policy(const PortfolioWeights& w, const PeriodParams& p, double policy_f,
                                 const SimulationOptions& opts) {
  if (opts.paths == 0) throw InvalidArgument("simulation needs at least one path");
  if (!(policy_f > 0.0)) throw InvalidArgument("simulation needs a positive policy value");
  const Budget b = make_budget(w, p);
  const PerState<double> normal = normal_consumption(w, p, policy_f);
  const double th = p.theta;

  // Outcome index: regime * 3 + state, regime 0 = shock, 1 = normal.
  std::array<double, 6> flow{};
  std::array<double, 6> growth{};
  std::array<bool, 6> ruin{};
  const double shock_scale = std::pow(p.gamma, th);
  for (State s : kStates) {
    const std::size_t i = static_cast<std::size_t>(s);
    flow[i] = shock_scale * utility(b.consumable[s], th);
    growth[i] = std::pow(b.carried, 1.0 - th);
    const double left = b.available[s] - normal[s];
    flow[3 + i] = utility(normal[s], th);
    ruin[3 + i] = !(left > 0.0);
    growth[3 + i] = ruin[3 + i] ? 0.0 : std::pow(left, 1.0 - th);
  }
  const double lam_h = p.prob[State::High];
  const double lam_hm = lam_h + p.prob[State::Mid];
  const double terminal_unit = std::pow(policy_f, -th) / (1.0 - th);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> total(opts.paths);
  std::vector<double> terminal(opts.paths);
  parallel_for(opts.paths, opts.threads, [&](std::size_t path) {
    const std::uint64_t seed = opts.seed;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    std::mt19937_64 rng(seq);
    // scale = beta^t * W_t^(1-theta) with W_0 = 1
    double scale = 1.0;
    double sum = 0.0;
    for (std::size_t t = 0; t < opts.horizon; ++t) {
      const bool shock = unit_uniform(rng) < p.mu;
      const double u = unit_uniform(rng);
      const std::size_t state = u < lam_h ? 0 : (u < lam_hm ? 1 : 2);
      const std::size_t k = (shock ? 0 : 3) + state;
      if (ruin[k]) {
        total[path] = nan;
        terminal[path] = nan;
        return;
      }
      sum += scale * flow[k];
      scale *= p.beta * growth[k];
    }
    const double tail = opts.terminal_value ? scale * terminal_unit : 0.0;
    total[path] = sum + tail;
    terminal[path] = tail;
  });

  SimulationReport rep;
  rep.paths = opts.paths;
  std::vector<double> kept;
  std::vector<double> kept_tail;
  kept.reserve(total.size());
  kept_tail.reserve(total.size());
  for (std::size_t i = 0; i < total.size(); ++i) {
    if (std::isnan(total[i])) {
      ++rep.aborted;
    } else {
      kept.push_back(total[i]);
      kept_tail.push_back(terminal[i]);
    }
  }
  rep.valid = static_cast<double>(rep.aborted) <= kMaxAbortedShare * static_cast<double>(rep.paths);
  if (kept.empty()) return rep;

  const double n = static_cast<double>(kept.size());
  const double mean = pairwise_sum(kept) / n;
  std::vector<double> sq(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) sq[i] = (kept[i] - mean) * (kept[i] - mean);
  const double var = kept.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;

  rep.value = mean;
  rep.value_std_error = std::sqrt(var / n);
  rep.terminal_share = pairwise_sum(kept_tail) / n / mean;
  rep.f = std::pow((1.0 - th) * mean, -1.0 / th);
  rep.f_std_error = rep.f * rep.value_std_error / (th * std::abs(mean));
  return rep;
}

}  // namespace housefolio
