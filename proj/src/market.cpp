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

#include "hashmarket/market.hpp"

#include <cmath>
#include <numeric>

namespace hashmarket {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

void MinerProfile::validate() const {
  require(t >= 0, "miner " + std::to_string(id) + ": block size t must be >= 0");
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_min > 0 && x_min < x_max,
          "miner " + std::to_string(id) + ": demand bounds must satisfy 0 < x_min < x_max");
}

void MarketParams::validate() const {
  require(std::isfinite(R) && R > 0, "R must be positive and finite");
  require(std::isfinite(r) && r >= 0, "r must be nonnegative and finite");
  require(std::isfinite(lambda) && lambda > 0, "lambda must be positive and finite");
  require(std::isfinite(z) && z >= 0, "z must be nonnegative and finite");
  require(std::isfinite(c) && c >= 0, "c must be nonnegative and finite");
  require(std::isfinite(T) && T > 0, "T must be positive and finite");
  require(std::isfinite(p_max) && p_max > 0, "p_max must be positive and finite");
  require(n >= 2, "n must be at least 2");
  require(p_max > marginal_cost(), "p_max must exceed the marginal cost c*T");
}

PriceSchedule PriceSchedule::uniform(double p) { return PriceSchedule(Uniform{p}); }

PriceSchedule PriceSchedule::discriminatory(std::vector<double> p) {
  return PriceSchedule(Discriminatory{std::move(p)});
}

double PriceSchedule::price(std::size_t i) const {
  if (const auto* u = std::get_if<Uniform>(&value_)) return u->p;
  const auto& d = std::get<Discriminatory>(value_);
  if (i >= d.p.size()) throw std::out_of_range("price index out of range");
  return d.p[i];
}

std::vector<double> PriceSchedule::prices(std::size_t n) const {
  if (const auto* u = std::get_if<Uniform>(&value_)) return std::vector<double>(n, u->p);
  const auto& d = std::get<Discriminatory>(value_);
  require(d.p.size() == n, "price vector length does not match miner count");
  return d.p;
}

void PriceSchedule::validate(const MarketParams& params) const {
  for (double p : prices(static_cast<std::size_t>(params.n))) {
    require(std::isfinite(p) && p > 0 && p <= params.p_max, "every price must lie in (0, p_max]");
  }
}

DemandProfile DemandProfile::from(std::vector<double> x, std::span<const MinerProfile> profiles) {
  require(x.size() == profiles.size(), "demand vector length does not match miner count");
  DemandProfile d;
  d.interior.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.interior[i] = x[i] > profiles[i].x_min && x[i] < profiles[i].x_max;
  }
  d.x = std::move(x);
  return d;
}

double DemandProfile::total() const { return sum(x); }

double survival_factor(std::int64_t t, const MarketParams& params) {
  return std::exp(-params.lambda * params.z * static_cast<double>(t));
}

double block_reward(std::int64_t t, const MarketParams& params) {
  return params.R + params.r * static_cast<double>(t);
}

double hash_share(std::span<const double> x, std::size_t i) {
  if (i >= x.size()) throw std::out_of_range("miner index out of range");
  const double total = sum(x);
  if (!(total > 0)) throw DomainError("hash share undefined: total demand is zero");
  return x[i] / total;
}

double orphan_probability(std::int64_t t, const MarketParams& params) {
  return -std::expm1(-params.lambda * params.z * static_cast<double>(t));
}

double win_probability(std::span<const double> x, std::size_t i, std::int64_t t_i,
                       const MarketParams& params) {
  return hash_share(x, i) * survival_factor(t_i, params);
}

double miner_utility(std::span<const double> x, std::size_t i,
                     std::span<const MinerProfile> profiles, const PriceSchedule& schedule,
                     const MarketParams& params) {
  const std::int64_t t = profiles[i].t;
  return block_reward(t, params) * win_probability(x, i, t, params) - schedule.price(i) * x[i];
}

double marginal_utility(std::span<const double> x, std::size_t i,
                        std::span<const MinerProfile> profiles, const PriceSchedule& schedule,
                        const MarketParams& params) {
  const double total = sum(x);
  if (!(total > 0)) throw DomainError("marginal utility undefined: total demand is zero");
  const std::int64_t t = profiles[i].t;
  const double others = total - x[i];
  const double a = block_reward(t, params) * survival_factor(t, params);
  return a * others / (total * total) - schedule.price(i);
}

double cfp_profit(std::span<const double> x, const PriceSchedule& schedule,
                  const MarketParams& params) {
  const double cost = params.marginal_cost();
  double revenue = 0.0;
  double spend = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    revenue += schedule.price(i) * x[i];
    spend += cost * x[i];
  }
  return revenue - spend;
}

EffectiveReward effective_rewards(std::span<const MinerProfile> profiles,
                                  const MarketParams& params) {
  EffectiveReward out;
  out.a.reserve(profiles.size());
  for (const auto& m : profiles) {
    out.a.push_back(block_reward(m.t, params) * survival_factor(m.t, params));
  }
  return out;
}

std::vector<MinerProfile> make_profiles(std::span<const std::int64_t> t, double x_min,
                                        double x_max) {
  std::vector<MinerProfile> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    MinerProfile m{static_cast<int>(i), t[i], x_min, x_max};
    m.validate();
    out.push_back(m);
  }
  return out;
}

}  // namespace hashmarket
