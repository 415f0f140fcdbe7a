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

#ifndef HASHMARKET_MONTECARLO_HPP_
#define HASHMARKET_MONTECARLO_HPP_

// Mining-race simulator. Each trial picks the first miner to solve the
// puzzle (competing exponential clocks, i.e. categorical over hash shares),
// then lets the winner's block survive propagation with probability
// exp(-lambda z t). Random numbers are derived from (seed, trial index), so
// results do not depend on how trials are sharded across threads.

#include <cstdint>
#include <vector>

#include "hashmarket/market.hpp"

namespace hashmarket {

struct SimConfig {
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  std::vector<MinerProfile> profiles;
  MarketParams params;
  std::vector<double> demand;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
};

struct SimReport {
  std::vector<std::int64_t> wins;
  std::vector<double> win_rate;
  std::vector<double> reward_mean;
  // Binomial standard errors of win_rate and reward_mean.
  std::vector<double> stderr_win;
  std::vector<double> stderr_reward;
  std::int64_t trials = 0;
};

// Uniform double in [0, 1) for draw `k` of trial `trial`.
double trial_uniform(std::uint64_t seed, std::uint64_t trial, unsigned k);

SimReport simulate_races(const SimConfig& cfg);

// reward_mean_i - p_i x_i per miner.
std::vector<double> empirical_utility(const SimConfig& cfg, const PriceSchedule& schedule);
std::vector<double> empirical_utility(const SimReport& report, const SimConfig& cfg,
                                      const PriceSchedule& schedule);

}  // namespace hashmarket

#endif  // HASHMARKET_MONTECARLO_HPP_
