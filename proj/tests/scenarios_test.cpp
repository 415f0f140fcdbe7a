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

#include "hashmarket/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hashmarket/config.hpp"
#include "test_support.hpp"

namespace hashmarket {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("hashmarket_scenarios_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepRow sample_row() {
  SweepRow r;
  r.axis = SweepAxis::N;
  r.axis_value = 40.0;
  r.scheme = Scheme::Discriminatory;
  r.total_demand = 0.1 + 0.2;
  r.profit = 13265.912345678901;
  r.avg_price = 99.654481234;
  r.converged = true;
  r.strict_condition = false;
  r.seed = 18446744073709551615ULL;
  return r;
}

TEST(DefaultScenario, Constants) {
  const auto cfg = default_scenario();
  EXPECT_EQ(cfg.params.R, 1e4);
  EXPECT_EQ(cfg.params.r, 20.0);
  EXPECT_EQ(cfg.params.lambda, 1.0 / 600.0);
  EXPECT_EQ(cfg.params.z, 5e-3);
  EXPECT_EQ(cfg.params.c, 1e-3);
  EXPECT_EQ(cfg.params.T, 1.0);
  EXPECT_EQ(cfg.params.p_max, 100.0);
  EXPECT_EQ(cfg.params.n, 100);
  EXPECT_EQ(cfg.x_min, 1e-2);
  EXPECT_EQ(cfg.x_max, 100.0);
  const auto& g = std::get<GaussianPopulation>(cfg.population);
  EXPECT_EQ(g.mu_t, 200.0);
  EXPECT_EQ(g.sigma_sq, 5.0);
  EXPECT_EQ(g.n, 100);
}

TEST(Population, GaussianDrawsAreTruncatedAndReproducible) {
  GaussianPopulation g;
  const auto a = draw_block_sizes(g);
  EXPECT_EQ(a, draw_block_sizes(g));
  ASSERT_EQ(a.size(), 100u);
  double mean = 0.0;
  for (auto t : a) {
    EXPECT_GE(t, 0);
    mean += static_cast<double>(t);
  }
  mean /= 100.0;
  // Truncation toward zero biases the mean down by about 0.5.
  EXPECT_NEAR(mean, 199.5, 3.0 * std::sqrt(5.0 / 100.0) + 0.1);

  GaussianPopulation shorter = g;
  shorter.n = 20;
  const auto b = draw_block_sizes(shorter);
  EXPECT_TRUE(std::equal(b.begin(), b.end(), a.begin()));
}

TEST(Population, NegativeDrawsClampToZero) {
  GaussianPopulation g{-50.0, 1.0, 50, 4};
  for (auto t : draw_block_sizes(g)) EXPECT_EQ(t, 0);
}

TEST(Population, ZeroVarianceIsConstant) {
  GaussianPopulation g{200.7, 0.0, 10, 4};
  for (auto t : draw_block_sizes(g)) EXPECT_EQ(t, 200);
}

TEST(Sweep, RowsOrderedByAxisThenScheme) {
  auto cfg = default_scenario();
  cfg.axis = SweepAxis::N;
  cfg.values = {20, 40, 60};
  const auto rows = run_sweep(cfg, 3);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].axis_value, cfg.values[k / 2]);
    EXPECT_EQ(rows[k].scheme, k % 2 == 0 ? Scheme::Uniform : Scheme::Discriminatory);
    EXPECT_TRUE(rows[k].error.empty());
    EXPECT_GE(rows[k].profit, 0.0);
    EXPECT_GE(rows[k].total_demand, 0.0);
  }
  for (std::size_t k = 0; k < rows.size(); k += 2) {
    EXPECT_GE(rows[k + 1].profit, rows[k].profit - 1e-9);
  }
}

TEST(Sweep, FailuresAreRecordedPerRow) {
  auto cfg = case_study_config();
  cfg.axis = SweepAxis::N;
  cfg.values = {3, 10};
  cfg.schemes = {Scheme::Uniform};
  const auto rows = run_sweep(cfg, 1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_TRUE(std::isnan(rows[1].profit));
  EXPECT_FALSE(rows[1].converged);
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  auto cfg = default_scenario();
  cfg.axis = SweepAxis::r;
  cfg.values = {0, 20, 40};
  EXPECT_EQ(format_csv(run_sweep(cfg, 1)), format_csv(run_sweep(cfg, 4)));
}

TEST(CaseStudy, RowsMirrorResults) {
  const auto res = case_study_three_miners();
  const auto params = case_study_config().params;
  const auto rows = case_study_rows(res, params);
  ASSERT_EQ(rows.size(), 6u);
  const auto p = res.discriminatory.schedule.prices(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = rows[3 + i];
    EXPECT_EQ(r.axis, SweepAxis::Miner);
    EXPECT_EQ(r.axis_value, static_cast<double>(i + 1));
    EXPECT_EQ(r.avg_price, p[i]);
    EXPECT_EQ(r.total_demand, res.discriminatory.demand.x[i]);
  }
  double total = 0.0;
  for (std::size_t i = 3; i < 6; ++i) total += rows[i].profit;
  EXPECT_LT(testing::rel_err(total, res.discriminatory.profit), 1e-12);
}

TEST(Csv, EmptyRowsGiveHeaderOnly) {
  const auto path = temp_file("empty.csv");
  write_results({}, path);
  EXPECT_EQ(slurp(path), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(read_results(path).empty());
  fs::remove(path);
}

TEST(Csv, OneRowIsTwoLines) {
  const std::vector<SweepRow> rows{sample_row()};
  const auto text = format_csv(rows);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.substr(text.find('\n') + 1, 21), "N,40,discriminatory,0");
}

TEST(Csv, RoundTrip) {
  std::vector<SweepRow> rows{sample_row(), sample_row()};
  rows[1].axis = SweepAxis::Miner;
  rows[1].scheme = Scheme::Uniform;
  rows[1].profit = 1.0 / 3.0;
  rows[1].converged = false;
  rows[1].strict_condition = true;
  rows[1].seed = 0;
  const auto path = temp_file("roundtrip.csv");
  write_results(rows, path);
  const auto back = read_results(path);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(back[k].axis, rows[k].axis);
    EXPECT_EQ(back[k].scheme, rows[k].scheme);
    EXPECT_LE(testing::rel_err(back[k].axis_value, rows[k].axis_value), 1e-12);
    EXPECT_LE(testing::rel_err(back[k].total_demand, rows[k].total_demand), 1e-12);
    EXPECT_LE(testing::rel_err(back[k].profit, rows[k].profit), 1e-12);
    EXPECT_LE(testing::rel_err(back[k].avg_price, rows[k].avg_price), 1e-12);
    EXPECT_EQ(back[k].converged, rows[k].converged);
    EXPECT_EQ(back[k].strict_condition, rows[k].strict_condition);
    EXPECT_EQ(back[k].seed, rows[k].seed);
  }
  EXPECT_EQ(format_csv(back), format_csv(rows));
  fs::remove(path);
}

TEST(Csv, RejectsWrongHeaderAndBadFields) {
  EXPECT_THROW(parse_csv("a,b,c\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\nN,1,uniform,1,2\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\nN,1,uniform,x,2,3,true,true,1\n"),
               std::invalid_argument);
}

TEST(Csv, UnwritablePathNamesThePath) {
  try {
    write_results({}, "/nonexistent-dir/rows.csv");
    FAIL() << "expected an exception";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/rows.csv"), std::string::npos);
  }
}

TEST(Config, ParsesAllSections) {
  const auto cfg = parse_config(R"({
    "params": {"R": 2e4, "r": 10, "z": 0.001, "p_max": 50},
    "population": {"type": "explicit", "t": [1, 2, 3], "x_max": 1000},
    "sweep": {"axis": "z", "values": [0.001, 0.002]},
    "schemes": ["discriminatory"],
    "montecarlo": {"trials": 500, "seed": 9},
    "gradient": {"epsilon": 1e-8, "vi_samples": 4},
    "prices": 40
  })");
  EXPECT_EQ(cfg.params.R, 2e4);
  EXPECT_EQ(cfg.params.c, 1e-3);
  EXPECT_EQ(std::get<ExplicitPopulation>(cfg.population).t, (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(cfg.x_max, 1000.0);
  EXPECT_EQ(cfg.axis, SweepAxis::z);
  EXPECT_EQ(cfg.values.size(), 2u);
  EXPECT_EQ(cfg.schemes, (std::vector<Scheme>{Scheme::Discriminatory}));
  EXPECT_EQ(cfg.montecarlo->trials, 500);
  EXPECT_EQ(cfg.gradient.epsilon, 1e-8);
  EXPECT_EQ(cfg.gradient.vi_samples, 4);
  EXPECT_EQ(*cfg.prices, std::vector<double>{40.0});
}

TEST(Config, DumpRoundTrips) {
  auto cfg = default_scenario();
  cfg.axis = SweepAxis::N;
  cfg.values = {20, 40};
  const auto again = parse_config(dump_config(cfg));
  EXPECT_EQ(dump_config(again), dump_config(cfg));
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("not json"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"population": {"type": "poisson"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"sweep": {"axis": "q"}})"), ConfigError);
  try {
    load_config("/no/such/config.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/no/such/config.json"), std::string::npos);
  }
}

}  // namespace
}  // namespace hashmarket
