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

#ifndef HASHMARKET_DEMAND_GAME_HPP_
#define HASHMARKET_DEMAND_GAME_HPP_

// Stage II: the miners' noncooperative demand game for a fixed price
// schedule. Provides the clipped best response, the closed-form interior
// equilibrium, Gauss-Seidel best-response dynamics and the uniqueness /
// positivity diagnostics.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hashmarket/market.hpp"

namespace hashmarket {

enum class NashMode { ClosedForm, BestResponseDynamics, ClosedFormWithFallback };

struct NashSolveOptions {
  double epsilon = 1e-10;  // relative L1 change between sweeps
  int max_iters = 10'000;
  NashMode mode = NashMode::ClosedFormWithFallback;
  // Starting point for best-response dynamics; empty means the midpoint of
  // each miner's bounds.
  std::vector<double> initial;

  void validate() const;
};

// Per-miner evaluation of the two sufficient conditions. With
// w_i = p_i exp(lambda z t_i) / (R + r t_i) and W = sum_j w_j:
//   strict:     2 (N-1) w_i < W   (uniqueness condition)
//   positivity: (N-1) w_i < W     (closed-form demand is positive)
// Under uniform pricing the price cancels and the unweighted form results.
struct UniquenessDiagnostics {
  std::vector<double> weight;
  double weight_sum = 0.0;
  std::vector<bool> strict;
  std::vector<bool> positivity;

  bool all_strict() const;
  bool all_positive() const;
};

struct StageTwoResult {
  DemandProfile demand;
  int iterations = 0;
  bool converged = false;
  bool strict_condition_holds = false;
  // Every x_i strictly inside (x_min, x_max) and positive.
  bool interior = false;
  // True when ClosedFormWithFallback switched to best-response dynamics.
  bool used_dynamics = false;
  std::string message;
};

// Unclipped best response sqrt(a_i S / p_i) - S to an opponent total S > 0.
double unclipped_best_response(double others_total, double price, const MinerProfile& miner,
                               const MarketParams& params);

// Best response of miner i, clipped to [x_min, x_max].
// Throws DomainError when the opponents' total demand is zero.
double best_response(std::size_t i, std::span<const double> x_others, double price,
                     const MinerProfile& miner, const MarketParams& params);

UniquenessDiagnostics uniqueness_diagnostics(std::span<const MinerProfile> profiles,
                                             const PriceSchedule& schedule,
                                             const MarketParams& params);

// Closed-form equilibrium x_i = (N-1)/K - ((N-1)/K)^2 w_i, K = sum_j w_j.
// Non-interior results are clipped, flagged interior=false and carry a
// message recommending best-response dynamics.
StageTwoResult closed_form_ne(std::span<const MinerProfile> profiles,
                              const PriceSchedule& schedule, const MarketParams& params);
StageTwoResult closed_form_ne_uniform(std::span<const MinerProfile> profiles, double p,
                                      const MarketParams& params);
StageTwoResult closed_form_ne_discriminatory(std::span<const MinerProfile> profiles,
                                             std::span<const double> p,
                                             const MarketParams& params);

// Equilibrium of the box-constrained game. Every equilibrium satisfies
// x_i = clip(S - w_i S^2, x_min_i, x_max_i) with S = sum_j x_j, and
// sum_i x_i(S) / S is strictly decreasing in S, so S is found by bisection.
// Reduces to closed_form_ne when that is interior.
StageTwoResult constrained_ne(std::span<const MinerProfile> profiles,
                              const PriceSchedule& schedule, const MarketParams& params);

// Gauss-Seidel sweeps in ascending miner order, from opts.initial or the
// midpoint of bounds.
StageTwoResult best_response_dynamics(std::span<const MinerProfile> profiles,
                                      const PriceSchedule& schedule, const MarketParams& params,
                                      const NashSolveOptions& opts = {});

// Dispatches on opts.mode. The fallback runs dynamics warm-started at
// constrained_ne, so the returned point is checked as a best-response fixed
// point.
StageTwoResult solve_stage_two(std::span<const MinerProfile> profiles,
                               const PriceSchedule& schedule, const MarketParams& params,
                               const NashSolveOptions& opts = {});

}  // namespace hashmarket

#endif  // HASHMARKET_DEMAND_GAME_HPP_
