// Copyright 2026 The hashmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hashmarket/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hashmarket {

namespace {

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double l1_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

// sum_j exp(lambda z t_j) / (R + r t_j)
double inverse_reward_sum(std::span<const MinerProfile> profiles, const MarketParams& params) {
  double s = 0.0;
  for (const auto& m : profiles) {
    s += std::exp(params.lambda * params.z * static_cast<double>(m.t)) / block_reward(m.t, params);
  }
  return s;
}

void project(std::vector<double>& p, double lo, double hi) {
  for (double& v : p) v = std::clamp(v, lo, hi);
}

std::vector<double> utilities_at(const DemandProfile& d, std::span<const MinerProfile> profiles,
                                 const PriceSchedule& s, const MarketParams& params) {
  std::vector<double> u(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) u[i] = miner_utility(d.x, i, profiles, s, params);
  return u;
}

double projected_gradient_norm(std::span<const double> p, std::span<const double> g, double lo,
                               double hi) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double gi = g[i];
    if (p[i] >= hi && gi > 0) gi = 0;
    if (p[i] <= lo && gi < 0) gi = 0;
    s += gi * gi;
  }
  return std::sqrt(s);
}

void require_profitable(const MarketParams& params) {
  if (!(params.p_max > params.marginal_cost())) {
    throw std::invalid_argument("no profitable price exists: p_max <= c*T");
  }
}

}  // namespace

const char* to_string(ProfitRegime r) {
  switch (r) {
    case ProfitRegime::Concave:
      return "concave";
    case ProfitRegime::Decreasing:
      return "decreasing";
    case ProfitRegime::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

GradientOptions GradientOptions::resolved(const MarketParams& params) const {
  GradientOptions o = *this;
  const double cost = params.marginal_cost();
  if (o.step_mu == 0.0) o.step_mu = 1e-2 * params.p_max;
  if (o.fd_step == 0.0) o.fd_step = 1e-6 * params.p_max;
  if (o.price_floor == 0.0) {
    // With zero marginal cost the floor still has to be a positive price.
    o.price_floor = cost > 0 ? cost * (1.0 + 1e-6) : 1e-6 * params.p_max;
  }
  if (!(o.step_mu > 0)) throw std::invalid_argument("step_mu must be positive");
  if (!(o.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (o.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(o.fd_step > 0)) throw std::invalid_argument("fd_step must be positive");
  if (!(o.price_floor > cost) || !(o.price_floor < params.p_max)) {
    throw std::invalid_argument("price_floor must lie in (c*T, p_max)");
  }
  o.stage_two.validate();
  return o;
}

double StackelbergResult::average_price() const {
  const auto p = schedule.prices(demand.size());
  if (p.empty()) return 0.0;
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

double uniform_profit(double p, std::span<const MinerProfile> profiles,
                      const MarketParams& params) {
  if (!(p > 0)) throw std::invalid_argument("uniform profit requires p > 0");
  const double m = static_cast<double>(profiles.size()) - 1.0;
  return (p - params.marginal_cost()) / p * m / inverse_reward_sum(profiles, params);
}

double uniform_profit_derivative(double p, std::span<const MinerProfile> profiles,
                                 const MarketParams& params) {
  if (!(p > 0)) throw std::invalid_argument("uniform profit requires p > 0");
  const double m = static_cast<double>(profiles.size()) - 1.0;
  return params.marginal_cost() / (p * p) * m / inverse_reward_sum(profiles, params);
}

StackelbergResult solve_uniform(std::span<const MinerProfile> profiles,
                                const MarketParams& params, const NashSolveOptions& stage_two) {
  params.validate();
  require_profitable(params);
  const GradientOptions defaults = GradientOptions{}.resolved(params);

  auto composed = [&](double p) {
    const auto s = PriceSchedule::uniform(p);
    return cfp_profit(solve_stage_two(profiles, s, params, stage_two).demand.x, s, params);
  };

  // Golden-section search over [price_floor, p_max].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = defaults.price_floor;
  double hi = params.p_max;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = composed(c);
  double fd = composed(d);
  while (hi - lo > 1e-9 * params.p_max) {
    if (fc < fd) {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = composed(d);
    } else {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = composed(c);
    }
  }
  const double searched = 0.5 * (lo + hi);
  const double at_cap = composed(params.p_max);

  StackelbergResult out;
  out.schedule = PriceSchedule::uniform(params.p_max);
  const auto eq = solve_stage_two(profiles, out.schedule, params, stage_two);
  out.demand = eq.demand;
  out.profit = cfp_profit(out.demand.x, out.schedule, params);
  out.utilities = utilities_at(out.demand, profiles, out.schedule, params);
  out.trace.push_back({0, out.schedule.prices(profiles.size()), out.profit});
  out.iterations = 0;
  out.converged = eq.converged;
  out.stage_two_interior = eq.interior;
  out.message = eq.message;

  auto& diag = out.diagnostics;
  diag.search_price = searched;
  // Flat profit (cT = 0) ties at the cap.
  diag.search_agrees = std::abs(searched - params.p_max) <= 1e-6 * params.p_max ||
                       composed(searched) <= at_cap;
  diag.stage_two = uniqueness_diagnostics(profiles, out.schedule, params);
  const auto prices = out.schedule.prices(profiles.size());
  diag.regime = concavity_regime(prices, profiles, params);
  return out;
}

double discriminatory_profit(std::span<const double> p, std::span<const MinerProfile> profiles,
                             const MarketParams& params, const NashSolveOptions& stage_two) {
  const auto s = PriceSchedule::discriminatory({p.begin(), p.end()});
  const auto eq = solve_stage_two(profiles, s, params, stage_two);
  return cfp_profit(eq.demand.x, s, params);
}

std::vector<double> profit_gradient(std::span<const double> p,
                                    std::span<const MinerProfile> profiles,
                                    const MarketParams& params, double h,
                                    const NashSolveOptions& stage_two) {
  std::vector<double> g(p.size());
  std::vector<double> q(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double hi = std::min(h, 0.5 * p[i]);
    q[i] = p[i] + hi;
    const double up = discriminatory_profit(q, profiles, params, stage_two);
    q[i] = p[i] - hi;
    const double down = discriminatory_profit(q, profiles, params, stage_two);
    q[i] = p[i];
    g[i] = (up - down) / (2.0 * hi);
  }
  return g;
}

StackelbergResult solve_discriminatory(std::span<const MinerProfile> profiles,
                                       const MarketParams& params, const GradientOptions& options) {
  params.validate();
  require_profitable(params);
  const GradientOptions opts = options.resolved(params);
  const std::size_t n = profiles.size();
  const double lo = opts.price_floor;
  const double hi = params.p_max;

  std::vector<double> p = opts.initial_prices.value_or(std::vector<double>(n, hi));
  if (p.size() != n) throw std::invalid_argument("initial price vector has the wrong length");
  project(p, lo, hi);
  if (opts.tie_prices) {
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(n);
    std::fill(p.begin(), p.end(), mean);
  }

  auto profit = [&](std::span<const double> q) {
    return discriminatory_profit(q, profiles, params, opts.stage_two);
  };

  StackelbergResult out;
  double current = profit(p);
  if (!std::isfinite(current)) throw std::runtime_error("profit is not finite at the initial prices");
  std::vector<double> best = p;
  double best_profit = current;
  out.trace.push_back({0, p, current});

  double mu = opts.step_mu;
  const double mu_max = opts.step_mu * 1048576.0;
  std::vector<double> grad;
  int iter = 0;
  bool aborted = false;
  while (iter < opts.max_iters && !out.converged && !aborted) {
    ++iter;
    grad = profit_gradient(p, profiles, params, opts.fd_step, opts.stage_two);
    if (opts.tie_prices) {
      const double mean = std::accumulate(grad.begin(), grad.end(), 0.0) / static_cast<double>(n);
      std::fill(grad.begin(), grad.end(), mean);
    }
    for (;;) {
      std::vector<double> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = p[i] + mu * grad[i];
      project(cand, lo, hi);
      if (l1_diff(cand, p) / l1(p) < opts.epsilon) {
        out.converged = true;
        break;
      }
      const double value = profit(cand);
      if (!std::isfinite(value)) {
        out.message = "profit evaluated to a non-finite value at iteration " + std::to_string(iter);
        aborted = true;
        break;
      }
      if (!opts.backtracking || value > current) {
        p = std::move(cand);
        current = value;
        out.trace.push_back({iter, p, current});
        if (current > best_profit) {
          best_profit = current;
          best = p;
        }
        if (opts.backtracking) mu = std::min(2.0 * mu, mu_max);
        break;
      }
      mu *= 0.5;
    }
  }
  out.iterations = iter;
  if (!out.converged && !aborted) out.message = "gradient ascent hit max_iters";

  out.schedule = PriceSchedule::discriminatory(best);
  const auto eq = solve_stage_two(profiles, out.schedule, params, opts.stage_two);
  out.demand = eq.demand;
  out.profit = cfp_profit(out.demand.x, out.schedule, params);
  out.utilities = utilities_at(out.demand, profiles, out.schedule, params);
  out.stage_two_interior = eq.interior;

  auto& diag = out.diagnostics;
  diag.stage_two = uniqueness_diagnostics(profiles, out.schedule, params);
  diag.regime = concavity_regime(best, profiles, params);
  diag.search_price = out.average_price();
  diag.projected_gradient_norm = projected_gradient_norm(
      best, profit_gradient(best, profiles, params, opts.fd_step, opts.stage_two), lo, hi);
  if (opts.vi_samples > 0) {
    diag.vi = vi_monotonicity_probe(profiles, params, opts.vi_samples, opts.vi_seed, opts);
  }
  return out;
}

RegimeReport concavity_regime(std::span<const double> p, std::span<const MinerProfile> profiles,
                              const MarketParams& params) {
  const auto a = effective_rewards(profiles, params).a;
  const std::size_t n = a.size();
  const double nn = static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = p[i] / a[i];
  const double y_sum = std::accumulate(y.begin(), y.end(), 0.0);
  const double a_sum = std::accumulate(a.begin(), a.end(), 0.0);

  RegimeReport rep;
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pair_sum += (a[i] + a[j]) * (1.0 - nn * y[j] / y_sum);
    }
  }
  // Symmetric instances sit exactly on the boundary; absorb rounding there.
  const double scale = 2.0 * (nn - 1.0) * a_sum;
  if (std::abs(pair_sum) <= 1e-12 * scale) pair_sum = 0.0;
  rep.pair_sum = pair_sum;

  rep.ratio_condition.resize(n);
  const double threshold = y_sum / ((nn - 1.0) * (nn - 1.0));
  bool ratio_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    rep.ratio_condition[i] = y[i] >= threshold;
    ratio_ok = ratio_ok && rep.ratio_condition[i];
  }
  if (!ratio_ok) {
    rep.regime = ProfitRegime::Indeterminate;
  } else {
    rep.regime = pair_sum <= 0 ? ProfitRegime::Concave : ProfitRegime::Decreasing;
  }

  const double s = (nn - 1.0) / y_sum;
  rep.cost_part = -params.marginal_cost() * s;
  double g = 0.0;
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != h) g += a[h] * (1.0 - y[h] * s) * (1.0 - y[j] * s);
    }
  }
  rep.revenue_part = g;
  return rep;
}

bool in_monotone_region(std::span<const double> p, std::span<const double> a) {
  const std::size_t n = a.size();
  const double nn = static_cast<double>(n);
  double y_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) y_sum += p[i] / a[i];
  double s = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      s += (a[i] + a[j]) * (y_sum - nn * p[j] / a[j]);
      scale += (a[i] + a[j]) * y_sum;
    }
  }
  return s <= 1e-12 * scale;
}

double vi_inner_product(std::span<const double> p1, std::span<const double> p2,
                        std::span<const MinerProfile> profiles, const MarketParams& params,
                        double h, const NashSolveOptions& stage_two) {
  const auto g1 = profit_gradient(p1, profiles, params, h, stage_two);
  const auto g2 = profit_gradient(p2, profiles, params, h, stage_two);
  double s = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) s += (p1[i] - p2[i]) * (-g1[i] + g2[i]);
  return s;
}

VIProbeReport vi_monotonicity_probe(std::span<const MinerProfile> profiles,
                                    const MarketParams& params, int samples, std::uint64_t seed,
                                    const GradientOptions& options) {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  const GradientOptions opts = options.resolved(params);
  const auto a = effective_rewards(profiles, params).a;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> price(opts.price_floor, params.p_max);

  VIProbeReport rep;
  rep.requested = samples;
  bool first = true;
  for (int k = 0; k < samples; ++k) {
    std::vector<double> p1(profiles.size());
    std::vector<double> p2(profiles.size());
    for (double& v : p1) v = price(rng);
    for (double& v : p2) v = price(rng);
    if (!in_monotone_region(p1, a) || !in_monotone_region(p2, a)) {
      ++rep.excluded;
      continue;
    }
    const double ip = vi_inner_product(p1, p2, profiles, params, opts.fd_step, opts.stage_two);
    ++rep.tested;
    if (ip >= 0) ++rep.monotone;
    rep.min_inner_product = first ? ip : std::min(rep.min_inner_product, ip);
    first = false;
  }
  rep.fraction = rep.tested > 0 ? static_cast<double>(rep.monotone) / rep.tested : 0.0;
  return rep;
}

}  // namespace hashmarket
