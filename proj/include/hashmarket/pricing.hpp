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

#ifndef HASHMARKET_PRICING_HPP_
#define HASHMARKET_PRICING_HPP_

// Stage I: the provider's profit maximization over prices, with the miners'
// Stage II equilibrium substituted in. Uniform pricing has a closed-form
// profit that is increasing in the price, so the cap binds. Discriminatory
// pricing is solved by projected gradient ascent on the composite profit.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hashmarket/demand_game.hpp"
#include "hashmarket/market.hpp"

namespace hashmarket {

struct GradientOptions {
  // Zero means "derive from params": step_mu = 1e-2 * p_max,
  // price_floor = c*T*(1 + 1e-6), fd_step = 1e-6 * p_max.
  double step_mu = 0.0;
  double epsilon = 1e-6;  // relative L1 price change
  int max_iters = 50'000;
  bool backtracking = true;
  double price_floor = 0.0;
  double fd_step = 0.0;
  // Restrict the search to a single shared price (gradient averaged).
  bool tie_prices = false;
  // Starting prices; defaults to the uniform optimum p_max for every miner.
  std::optional<std::vector<double>> initial_prices;
  // Sample pairs for the monotonicity probe attached to the result; 0 skips it.
  int vi_samples = 0;
  std::uint64_t vi_seed = 7;
  NashSolveOptions stage_two{};

  // Copy with the zero-valued defaults filled in; throws on invalid values.
  GradientOptions resolved(const MarketParams& params) const;
};

enum class ProfitRegime { Concave, Decreasing, Indeterminate };

const char* to_string(ProfitRegime r);

struct RegimeReport {
  ProfitRegime regime = ProfitRegime::Indeterminate;
  // sum over ordered pairs i != j of (a_i + a_j)(1 - N y_j / Y), y = p/a.
  double pair_sum = 0.0;
  // Per miner: p_i/a_i >= sum_j (p_j/a_j) / (N-1)^2.
  std::vector<bool> ratio_condition;
  // Cost part f(p) = -cT (N-1) / Y and revenue part g(p) = sum_i p_i x_i*.
  double cost_part = 0.0;
  double revenue_part = 0.0;
};

struct VIProbeReport {
  int requested = 0;
  int tested = 0;
  // Pairs where one endpoint fell outside the feasible set.
  int excluded = 0;
  int monotone = 0;
  double fraction = 0.0;
  double min_inner_product = 0.0;
};

struct TracePoint {
  int iteration = 0;
  std::vector<double> prices;
  double profit = 0.0;
};

struct PricingDiagnostics {
  RegimeReport regime;
  UniquenessDiagnostics stage_two;
  std::optional<VIProbeReport> vi;
  // Uniform solver: scalar search cross-check.
  double search_price = 0.0;
  bool search_agrees = true;
  // Norm of the projected finite-difference gradient at the returned prices.
  double projected_gradient_norm = 0.0;
};

struct StackelbergResult {
  PriceSchedule schedule = PriceSchedule::uniform(1.0);
  DemandProfile demand;
  double profit = 0.0;
  std::vector<double> utilities;
  std::vector<TracePoint> trace;
  int iterations = 0;
  bool converged = false;
  bool stage_two_interior = false;
  PricingDiagnostics diagnostics;
  std::string message;

  double total_demand() const { return demand.total(); }
  double average_price() const;
};

// ((p - cT)/p) (N-1) / sum_j exp(lambda z t_j)/(R + r t_j)
double uniform_profit(double p, std::span<const MinerProfile> profiles,
                      const MarketParams& params);
// cT (N-1) / (p^2 sum_j w_j)
double uniform_profit_derivative(double p, std::span<const MinerProfile> profiles,
                                 const MarketParams& params);

// Cap binds: returns p_max with its Stage II equilibrium, cross-checked by a
// bounded golden-section search. Throws std::invalid_argument if p_max <= cT.
StackelbergResult solve_uniform(std::span<const MinerProfile> profiles,
                                const MarketParams& params, const NashSolveOptions& stage_two = {});

// sum_i (p_i - cT) x_i*(p) at the Stage II equilibrium for these prices.
double discriminatory_profit(std::span<const double> p, std::span<const MinerProfile> profiles,
                             const MarketParams& params, const NashSolveOptions& stage_two = {});

// Central finite-difference gradient of discriminatory_profit.
std::vector<double> profit_gradient(std::span<const double> p,
                                    std::span<const MinerProfile> profiles,
                                    const MarketParams& params, double h,
                                    const NashSolveOptions& stage_two = {});

StackelbergResult solve_discriminatory(std::span<const MinerProfile> profiles,
                                       const MarketParams& params,
                                       const GradientOptions& opts = {});

RegimeReport concavity_regime(std::span<const double> p, std::span<const MinerProfile> profiles,
                              const MarketParams& params);

// Membership in the convex set where the pair sum above is <= 0.
bool in_monotone_region(std::span<const double> p, std::span<const double> a);

// (p' - p'')^T (F(p') - F(p'')), F = -grad profit.
double vi_inner_product(std::span<const double> p1, std::span<const double> p2,
                        std::span<const MinerProfile> profiles, const MarketParams& params,
                        double h, const NashSolveOptions& stage_two = {});

// Samples pairs uniformly from [price_floor, p_max]^n, discards pairs with an
// endpoint outside the monotone region, reports the monotone fraction.
VIProbeReport vi_monotonicity_probe(std::span<const MinerProfile> profiles,
                                    const MarketParams& params, int samples,
                                    std::uint64_t seed = 7, const GradientOptions& opts = {});

}  // namespace hashmarket

#endif  // HASHMARKET_PRICING_HPP_
