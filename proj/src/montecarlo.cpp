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

#include "hashmarket/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hashmarket {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Tally {
  std::vector<std::int64_t> wins;
};

void run_shard(const SimConfig& cfg, const std::vector<double>& cumulative,
               const std::vector<double>& survival, std::int64_t begin, std::int64_t end,
               Tally& tally) {
  const double total = cumulative.back();
  for (std::int64_t trial = begin; trial < end; ++trial) {
    const auto id = static_cast<std::uint64_t>(trial);
    const double pick = trial_uniform(cfg.seed, id, 0) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto winner = static_cast<std::size_t>(it - cumulative.begin());
    if (trial_uniform(cfg.seed, id, 1) < survival[winner]) ++tally.wins[winner];
  }
}

}  // namespace

void SimConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (demand.size() != profiles.size()) {
    throw std::invalid_argument("demand vector length does not match miner count");
  }
  if (profiles.empty()) throw std::invalid_argument("simulation needs at least one miner");
  double total = 0.0;
  for (double x : demand) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("demands must be finite and >= 0");
    total += x;
  }
  if (!(total > 0)) throw DomainError("simulation undefined: total demand is zero");
}

double trial_uniform(std::uint64_t seed, std::uint64_t trial, unsigned k) {
  const std::uint64_t h = splitmix64(splitmix64(seed ^ splitmix64(trial)) + k);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

SimReport simulate_races(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.profiles.size();
  std::vector<double> cumulative(n);
  std::vector<double> survival(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += cfg.demand[i];
    cumulative[i] = acc;
    survival[i] = survival_factor(cfg.profiles[i].t, cfg.params);
  }

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, cfg.trials));
  std::vector<Tally> tallies(threads, Tally{std::vector<std::int64_t>(n, 0)});
  std::vector<std::thread> pool;
  const std::int64_t chunk = cfg.trials / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = (w + 1 == threads) ? cfg.trials : begin + chunk;
    if (threads == 1) {
      run_shard(cfg, cumulative, survival, begin, end, tallies[w]);
    } else {
      pool.emplace_back(run_shard, std::cref(cfg), std::cref(cumulative), std::cref(survival), begin,
                        end, std::ref(tallies[w]));
    }
  }
  for (auto& t : pool) t.join();

  SimReport rep;
  rep.trials = cfg.trials;
  rep.wins.assign(n, 0);
  for (const auto& t : tallies) {
    for (std::size_t i = 0; i < n; ++i) rep.wins[i] += t.wins[i];
  }
  const double trials = static_cast<double>(cfg.trials);
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = static_cast<double>(rep.wins[i]) / trials;
    const double reward = block_reward(cfg.profiles[i].t, cfg.params);
    const double se = std::sqrt(rate * (1.0 - rate) / trials);
    rep.win_rate.push_back(rate);
    rep.reward_mean.push_back(rate * reward);
    rep.stderr_win.push_back(se);
    rep.stderr_reward.push_back(se * reward);
  }
  return rep;
}

std::vector<double> empirical_utility(const SimReport& report, const SimConfig& cfg,
                                      const PriceSchedule& schedule) {
  std::vector<double> u(report.reward_mean.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = report.reward_mean[i] - schedule.price(i) * cfg.demand[i];
  }
  return u;
}

std::vector<double> empirical_utility(const SimConfig& cfg, const PriceSchedule& schedule) {
  return empirical_utility(simulate_races(cfg), cfg, schedule);
}

}  // namespace hashmarket
