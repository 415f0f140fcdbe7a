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

#ifndef HASHMARKET_SCENARIOS_HPP_
#define HASHMARKET_SCENARIOS_HPP_

// Experiment harness: miner populations, parameter sweeps, the three-miner
// case study, and the CSV result format.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hashmarket/market.hpp"
#include "hashmarket/pricing.hpp"

namespace hashmarket {

// Miner labels per-miner rows of the case-study CSV; it is not a sweep axis.
enum class SweepAxis { None, N, R, r, z, c, Miner };
enum class Scheme { Uniform, Discriminatory };

std::string_view to_string(SweepAxis axis);
std::string_view to_string(Scheme scheme);
SweepAxis parse_axis(std::string_view s);
Scheme parse_scheme(std::string_view s);

struct ExplicitPopulation {
  std::vector<std::int64_t> t;
};

// Block sizes drawn from N(mu_t, sigma_sq); sigma_sq is the variance.
// Draws are clamped at 0 and truncated toward zero.
struct GaussianPopulation {
  double mu_t = 200.0;
  double sigma_sq = 5.0;
  int n = 100;
  std::uint64_t seed = 1;
};

using Population = std::variant<ExplicitPopulation, GaussianPopulation>;

struct MonteCarloSpec {
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 1;
};

struct ScenarioConfig {
  MarketParams params;
  double x_min = 1e-2;
  double x_max = 100.0;
  Population population = GaussianPopulation{};
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;
  std::vector<Scheme> schemes{Scheme::Uniform, Scheme::Discriminatory};
  std::optional<MonteCarloSpec> montecarlo;
  GradientOptions gradient;
  // Explicit price schedule / demand for the nash and simulate commands.
  std::optional<std::vector<double>> prices;
  std::optional<std::vector<double>> demand;
};

struct SweepRow {
  SweepAxis axis = SweepAxis::None;
  double axis_value = 0.0;
  Scheme scheme = Scheme::Uniform;
  double total_demand = 0.0;
  double profit = 0.0;
  double avg_price = 0.0;
  bool converged = false;
  bool strict_condition = false;
  std::uint64_t seed = 0;
  // Not part of the CSV; filled for in-process consumers.
  std::vector<double> prices;
  std::vector<double> demand;
  std::string error;
};

struct CaseStudyResult {
  StackelbergResult uniform;
  StackelbergResult discriminatory;
};

extern const char* const kCsvHeader;

std::vector<std::int64_t> draw_block_sizes(const GaussianPopulation& pop);

// Profiles for the configured population; sets cfg.params.n to match.
std::vector<MinerProfile> build_profiles(ScenarioConfig& cfg);

ScenarioConfig default_scenario();
ScenarioConfig case_study_config();

// Config with one axis value applied (N resizes the population).
ScenarioConfig apply_axis(const ScenarioConfig& cfg, SweepAxis axis, double value);

StackelbergResult solve_scheme(const ScenarioConfig& cfg, Scheme scheme);

// Solves every (axis value, scheme) point; rows are ordered by axis index
// then scheme regardless of completion order. Solver exceptions land in the
// row's error field with NaN metrics and converged=false.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned threads = 0);

CaseStudyResult case_study_three_miners();

// One row per (scheme, miner): axis "miner", axis_value = 1-based miner
// index, total_demand = x_i, profit = (p_i - cT) x_i, avg_price = p_i.
std::vector<SweepRow> case_study_rows(const CaseStudyResult& res, const MarketParams& params);

std::string format_csv(std::span<const SweepRow> rows);
std::vector<SweepRow> parse_csv(std::string_view text);
void write_results(std::span<const SweepRow> rows, const std::filesystem::path& path);
std::vector<SweepRow> read_results(const std::filesystem::path& path);
// JSON mirror including per-miner prices and demands.
void write_results_json(std::span<const SweepRow> rows, const std::filesystem::path& path);

}  // namespace hashmarket

#endif  // HASHMARKET_SCENARIOS_HPP_
