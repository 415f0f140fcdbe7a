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

#ifndef HASHMARKET_MARKET_HPP_
#define HASHMARKET_MARKET_HPP_

// Economic model of a hash-power market: one provider sells computing
// service to N proof-of-work miners who race for a block reward. Everything
// in this header is a pure pointwise formula over immutable value types.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hashmarket {

// Raised when a formula is evaluated outside its domain (e.g. zero total
// demand). Invalid configuration raises std::invalid_argument instead.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct MinerProfile {
  int id = 0;
  // Number of transactions in the miner's block.
  std::int64_t t = 0;
  double x_min = 1e-2;
  double x_max = 100.0;

  void validate() const;
};

struct MarketParams {
  double R = 1e4;            // fixed block reward
  double r = 20.0;           // reward per transaction
  double lambda = 1.0 / 600; // block arrival rate, 1/s
  double z = 5e-3;           // propagation delay per transaction, s
  double c = 1e-3;           // electricity cost factor
  double T = 1.0;            // service-time factor; only c*T matters
  double p_max = 100.0;      // price cap
  int n = 100;               // miner count

  double marginal_cost() const { return c * T; }
  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

class PriceSchedule {
 public:
  struct Uniform {
    double p;
  };
  struct Discriminatory {
    std::vector<double> p;
  };

  static PriceSchedule uniform(double p);
  static PriceSchedule discriminatory(std::vector<double> p);

  bool is_uniform() const { return std::holds_alternative<Uniform>(value_); }
  double price(std::size_t i) const;
  // Per-miner prices, broadcasting a uniform price to n entries.
  std::vector<double> prices(std::size_t n) const;
  // Checks every price lies in (0, p_max] and the vector length matches n.
  void validate(const MarketParams& params) const;

  const std::variant<Uniform, Discriminatory>& value() const { return value_; }

 private:
  explicit PriceSchedule(std::variant<Uniform, Discriminatory> v) : value_(std::move(v)) {}
  std::variant<Uniform, Discriminatory> value_;
};

struct DemandProfile {
  std::vector<double> x;
  std::vector<bool> interior;

  // Builds the profile and its interior flags from the miners' bounds.
  static DemandProfile from(std::vector<double> x, std::span<const MinerProfile> profiles);
  double total() const;
  std::size_t size() const { return x.size(); }
};

struct EffectiveReward {
  // a_i = (R + r t_i) exp(-lambda z t_i)
  std::vector<double> a;
};

// Discount exp(-lambda z t) applied to a block of t transactions.
double survival_factor(std::int64_t t, const MarketParams& params);
// Undiscounted reward R + r t.
double block_reward(std::int64_t t, const MarketParams& params);

double hash_share(std::span<const double> x, std::size_t i);
inline double hash_share(const DemandProfile& x, std::size_t i) { return hash_share(x.x, i); }

double orphan_probability(std::int64_t t, const MarketParams& params);

double win_probability(std::span<const double> x, std::size_t i, std::int64_t t_i,
                       const MarketParams& params);
inline double win_probability(const DemandProfile& x, std::size_t i, std::int64_t t_i,
                              const MarketParams& params) {
  return win_probability(x.x, i, t_i, params);
}

double miner_utility(std::span<const double> x, std::size_t i,
                     std::span<const MinerProfile> profiles, const PriceSchedule& schedule,
                     const MarketParams& params);

// d u_i / d x_i = a_i * sum_{j != i} x_j / (sum_j x_j)^2 - p_i
double marginal_utility(std::span<const double> x, std::size_t i,
                        std::span<const MinerProfile> profiles, const PriceSchedule& schedule,
                        const MarketParams& params);

double cfp_profit(std::span<const double> x, const PriceSchedule& schedule,
                  const MarketParams& params);

EffectiveReward effective_rewards(std::span<const MinerProfile> profiles,
                                  const MarketParams& params);

// Builds n profiles with shared demand bounds from a list of block sizes.
std::vector<MinerProfile> make_profiles(std::span<const std::int64_t> t, double x_min,
                                        double x_max);

}  // namespace hashmarket

#endif  // HASHMARKET_MARKET_HPP_
