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

#include "hashmarket/demand_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hashmarket {

namespace {

// p_i exp(lambda z t_i) / (R + r t_i)
std::vector<double> price_weights(std::span<const MinerProfile> profiles,
                                  std::span<const double> prices, const MarketParams& params) {
  std::vector<double> w(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const double t = static_cast<double>(profiles[i].t);
    w[i] = prices[i] * std::exp(params.lambda * params.z * t) / block_reward(profiles[i].t, params);
  }
  return w;
}

bool all_interior(const DemandProfile& d) {
  return std::all_of(d.interior.begin(), d.interior.end(), [](bool b) { return b; });
}

void check_sizes(std::span<const MinerProfile> profiles, const MarketParams& params) {
  if (profiles.size() != static_cast<std::size_t>(params.n)) {
    throw std::invalid_argument("profile count " + std::to_string(profiles.size()) +
                                " does not match n = " + std::to_string(params.n));
  }
}

}  // namespace

void NashSolveOptions::validate() const {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

bool UniquenessDiagnostics::all_strict() const {
  return std::all_of(strict.begin(), strict.end(), [](bool b) { return b; });
}

bool UniquenessDiagnostics::all_positive() const {
  return std::all_of(positivity.begin(), positivity.end(), [](bool b) { return b; });
}

double unclipped_best_response(double others_total, double price, const MinerProfile& miner,
                               const MarketParams& params) {
  if (!(others_total > 0)) {
    throw DomainError("best response undefined: degenerate opponent profile (zero total demand)");
  }
  if (!(price > 0)) throw std::invalid_argument("best response requires a positive price");
  const double t = static_cast<double>(miner.t);
  const double scale =
      block_reward(miner.t, params) / (price * std::exp(params.lambda * params.z * t));
  return std::sqrt(scale * others_total) - others_total;
}

double best_response(std::size_t /*i*/, std::span<const double> x_others, double price,
                     const MinerProfile& miner, const MarketParams& params) {
  for (double v : x_others) {
    if (v < 0) throw std::invalid_argument("opponent demands must be nonnegative");
  }
  const double others = std::accumulate(x_others.begin(), x_others.end(), 0.0);
  const double raw = unclipped_best_response(others, price, miner, params);
  return std::clamp(raw, miner.x_min, miner.x_max);
}

UniquenessDiagnostics uniqueness_diagnostics(std::span<const MinerProfile> profiles,
                                             const PriceSchedule& schedule,
                                             const MarketParams& params) {
  UniquenessDiagnostics d;
  const auto prices = schedule.prices(profiles.size());
  d.weight = price_weights(profiles, prices, params);
  d.weight_sum = std::accumulate(d.weight.begin(), d.weight.end(), 0.0);
  const double m = static_cast<double>(profiles.size()) - 1.0;
  d.strict.resize(profiles.size());
  d.positivity.resize(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    d.strict[i] = 2.0 * m * d.weight[i] < d.weight_sum;
    d.positivity[i] = m * d.weight[i] < d.weight_sum;
  }
  return d;
}

StageTwoResult closed_form_ne(std::span<const MinerProfile> profiles,
                              const PriceSchedule& schedule, const MarketParams& params) {
  check_sizes(profiles, params);
  const auto prices = schedule.prices(profiles.size());
  for (double p : prices) {
    if (!(p > 0)) throw std::invalid_argument("closed-form equilibrium requires positive prices");
  }
  const auto diag = uniqueness_diagnostics(profiles, schedule, params);
  const double total = (static_cast<double>(profiles.size()) - 1.0) / diag.weight_sum;

  std::vector<double> x(profiles.size());
  bool positive = true;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    x[i] = total - total * total * diag.weight[i];
    positive = positive && x[i] > 0;
  }

  StageTwoResult out;
  out.demand = DemandProfile::from(x, profiles);
  out.interior = positive && all_interior(out.demand);
  if (!out.interior) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::clamp(x[i], profiles[i].x_min, profiles[i].x_max);
    }
    out.demand = DemandProfile::from(std::move(x), profiles);
    out.message = positive ? "closed form leaves the demand bounds; use best-response dynamics"
                           : "non-interior equilibrium (nonpositive closed-form demand); "
                             "use best-response dynamics";
  }
  out.iterations = 0;
  out.converged = out.interior;
  out.strict_condition_holds = diag.all_strict();
  return out;
}

StageTwoResult closed_form_ne_uniform(std::span<const MinerProfile> profiles, double p,
                                      const MarketParams& params) {
  return closed_form_ne(profiles, PriceSchedule::uniform(p), params);
}

StageTwoResult closed_form_ne_discriminatory(std::span<const MinerProfile> profiles,
                                             std::span<const double> p,
                                             const MarketParams& params) {
  return closed_form_ne(profiles, PriceSchedule::discriminatory({p.begin(), p.end()}), params);
}

StageTwoResult constrained_ne(std::span<const MinerProfile> profiles,
                              const PriceSchedule& schedule, const MarketParams& params) {
  check_sizes(profiles, params);
  const auto prices = schedule.prices(profiles.size());
  for (double p : prices) {
    if (!(p > 0)) throw std::invalid_argument("equilibrium requires positive prices");
  }
  const auto diag = uniqueness_diagnostics(profiles, schedule, params);
  const std::size_t n = profiles.size();
  auto demand_at = [&](double s, std::size_t i) {
    return std::clamp(s - diag.weight[i] * s * s, profiles[i].x_min, profiles[i].x_max);
  };
  auto excess = [&](double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += demand_at(s, i);
    return sum - s;
  };

  // excess >= 0 at sum(x_min) and <= 0 at sum(x_max).
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& m : profiles) {
    lo += m.x_min;
    hi += m.x_max;
  }
  for (int k = 0; k < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = demand_at(s, i);
  StageTwoResult out;
  out.demand = DemandProfile::from(std::move(x), profiles);
  out.interior = all_interior(out.demand);
  out.converged = true;
  out.strict_condition_holds = diag.all_strict();
  return out;
}

StageTwoResult best_response_dynamics(std::span<const MinerProfile> profiles,
                                      const PriceSchedule& schedule, const MarketParams& params,
                                      const NashSolveOptions& opts) {
  check_sizes(profiles, params);
  opts.validate();
  const auto prices = schedule.prices(profiles.size());
  const std::size_t n = profiles.size();

  std::vector<double> x(n);
  if (opts.initial.empty()) {
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 * (profiles[i].x_min + profiles[i].x_max);
  } else {
    if (opts.initial.size() != n) throw std::invalid_argument("initial demand has the wrong length");
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::clamp(opts.initial[i], profiles[i].x_min, profiles[i].x_max);
    }
  }

  StageTwoResult out;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    double change = 0.0;
    double scale = 0.0;
    // Recomputed each sweep so rounding drift never accumulates.
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double others = total - x[i];
      const double next = std::clamp(unclipped_best_response(others, prices[i], profiles[i], params),
                                     profiles[i].x_min, profiles[i].x_max);
      change += std::abs(next - x[i]);
      scale += std::abs(x[i]);
      total += next - x[i];
      x[i] = next;
    }
    out.iterations = iter;
    if (change / scale < opts.epsilon) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) out.message = "best-response dynamics hit max_iters";

  out.demand = DemandProfile::from(std::move(x), profiles);
  out.interior = all_interior(out.demand);
  out.strict_condition_holds = uniqueness_diagnostics(profiles, schedule, params).all_strict();
  out.used_dynamics = true;
  return out;
}

StageTwoResult solve_stage_two(std::span<const MinerProfile> profiles,
                               const PriceSchedule& schedule, const MarketParams& params,
                               const NashSolveOptions& opts) {
  switch (opts.mode) {
    case NashMode::ClosedForm:
      return closed_form_ne(profiles, schedule, params);
    case NashMode::BestResponseDynamics:
      return best_response_dynamics(profiles, schedule, params, opts);
    case NashMode::ClosedFormWithFallback: {
      auto cf = closed_form_ne(profiles, schedule, params);
      if (cf.interior) return cf;
      NashSolveOptions warm = opts;
      warm.initial = constrained_ne(profiles, schedule, params).demand.x;
      auto dyn = best_response_dynamics(profiles, schedule, params, warm);
      dyn.interior = false;
      if (dyn.message.empty()) dyn.message = "closed form non-interior; solved by best-response dynamics";
      return dyn;
    }
  }
  throw std::logic_error("unknown NashMode");
}

}  // namespace hashmarket
