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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace hashmarket {

const char* const kCsvHeader =
    "axis,axis_value,scheme,total_demand,profit,avg_price,converged,strict_condition,seed";

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None:
      return "none";
    case SweepAxis::N:
      return "N";
    case SweepAxis::R:
      return "R";
    case SweepAxis::r:
      return "r";
    case SweepAxis::z:
      return "z";
    case SweepAxis::c:
      return "c";
    case SweepAxis::Miner:
      return "miner";
  }
  return "none";
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Uniform ? "uniform" : "discriminatory";
}

SweepAxis parse_axis(std::string_view s) {
  for (auto a : {SweepAxis::None, SweepAxis::N, SweepAxis::R, SweepAxis::r, SweepAxis::z,
                 SweepAxis::c, SweepAxis::Miner}) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "'");
}

Scheme parse_scheme(std::string_view s) {
  if (s == "uniform") return Scheme::Uniform;
  if (s == "discriminatory") return Scheme::Discriminatory;
  throw std::invalid_argument("unknown pricing scheme '" + std::string(s) + "'");
}

std::vector<std::int64_t> draw_block_sizes(const GaussianPopulation& pop) {
  if (pop.n < 1) throw std::invalid_argument("population size must be positive");
  if (!(pop.sigma_sq >= 0)) throw std::invalid_argument("sigma_sq must be nonnegative");
  std::vector<std::int64_t> t(static_cast<std::size_t>(pop.n));
  if (pop.sigma_sq == 0) {
    std::fill(t.begin(), t.end(), static_cast<std::int64_t>(std::max(0.0, pop.mu_t)));
    return t;
  }
  std::mt19937_64 rng(pop.seed);
  std::normal_distribution<double> draw(pop.mu_t, std::sqrt(pop.sigma_sq));
  for (auto& v : t) v = static_cast<std::int64_t>(std::trunc(std::max(0.0, draw(rng))));
  return t;
}

std::vector<MinerProfile> build_profiles(ScenarioConfig& cfg) {
  std::vector<std::int64_t> t;
  if (const auto* g = std::get_if<GaussianPopulation>(&cfg.population)) {
    t = draw_block_sizes(*g);
  } else {
    t = std::get<ExplicitPopulation>(cfg.population).t;
  }
  cfg.params.n = static_cast<int>(t.size());
  return make_profiles(t, cfg.x_min, cfg.x_max);
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.params = MarketParams{};
  cfg.params.R = 1e4;
  cfg.params.r = 20.0;
  cfg.params.lambda = 1.0 / 600.0;
  cfg.params.z = 5e-3;
  cfg.params.c = 1e-3;
  cfg.params.T = 1.0;
  cfg.params.p_max = 100.0;
  cfg.params.n = 100;
  cfg.x_min = 1e-2;
  cfg.x_max = 100.0;
  cfg.population = GaussianPopulation{200.0, 5.0, 100, 1};
  return cfg;
}

ScenarioConfig case_study_config() {
  ScenarioConfig cfg = default_scenario();
  cfg.population = ExplicitPopulation{{100, 200, 300}};
  cfg.params.n = 3;
  return cfg;
}

ScenarioConfig apply_axis(const ScenarioConfig& cfg, SweepAxis axis, double value) {
  ScenarioConfig out = cfg;
  switch (axis) {
    case SweepAxis::None:
      break;
    case SweepAxis::N: {
      const int n = static_cast<int>(std::llround(value));
      if (n < 2) throw std::invalid_argument("N sweep values must be >= 2");
      if (auto* g = std::get_if<GaussianPopulation>(&out.population)) {
        g->n = n;
      } else {
        auto& t = std::get<ExplicitPopulation>(out.population).t;
        if (static_cast<std::size_t>(n) > t.size()) {
          throw std::invalid_argument("N sweep value exceeds the explicit population size");
        }
        t.resize(static_cast<std::size_t>(n));
      }
      out.params.n = n;
      break;
    }
    case SweepAxis::R:
      out.params.R = value;
      break;
    case SweepAxis::r:
      out.params.r = value;
      break;
    case SweepAxis::z:
      out.params.z = value;
      break;
    case SweepAxis::c:
      out.params.c = value;
      break;
    case SweepAxis::Miner:
      throw std::invalid_argument("'miner' labels case-study rows and cannot be swept");
  }
  return out;
}

StackelbergResult solve_scheme(const ScenarioConfig& cfg, Scheme scheme) {
  ScenarioConfig local = cfg;
  const auto profiles = build_profiles(local);
  if (scheme == Scheme::Uniform) return solve_uniform(profiles, local.params, local.gradient.stage_two);
  return solve_discriminatory(profiles, local.params, local.gradient);
}

namespace {

std::uint64_t population_seed(const ScenarioConfig& cfg) {
  if (const auto* g = std::get_if<GaussianPopulation>(&cfg.population)) return g->seed;
  return 0;
}

SweepRow solve_point(const ScenarioConfig& cfg, SweepAxis axis, double value, Scheme scheme) {
  SweepRow row;
  row.axis = axis;
  row.axis_value = value;
  row.scheme = scheme;
  row.seed = population_seed(cfg);
  try {
    const auto point = apply_axis(cfg, axis, value);
    const auto res = solve_scheme(point, scheme);
    row.total_demand = res.total_demand();
    row.profit = res.profit;
    row.avg_price = res.average_price();
    row.converged = res.converged;
    row.strict_condition = res.diagnostics.stage_two.all_strict();
    row.prices = res.schedule.prices(res.demand.size());
    row.demand = res.demand.x;
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.total_demand = row.profit = row.avg_price = nan;
    row.converged = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned threads) {
  std::vector<double> values = cfg.values;
  if (cfg.axis == SweepAxis::None || values.empty()) values = {0.0};
  struct Job {
    double value;
    Scheme scheme;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    for (Scheme s : cfg.schemes) jobs.push_back({v, s});
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      rows[k] = solve_point(cfg, cfg.axis, jobs[k].value, jobs[k].scheme);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

CaseStudyResult case_study_three_miners() {
  const auto cfg = case_study_config();
  return {solve_scheme(cfg, Scheme::Uniform), solve_scheme(cfg, Scheme::Discriminatory)};
}

std::vector<SweepRow> case_study_rows(const CaseStudyResult& res, const MarketParams& params) {
  std::vector<SweepRow> rows;
  const double cost = params.marginal_cost();
  for (const auto* r : {&res.uniform, &res.discriminatory}) {
    const auto prices = r->schedule.prices(r->demand.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
      SweepRow row;
      row.axis = SweepAxis::Miner;
      row.axis_value = static_cast<double>(i + 1);
      row.scheme = r == &res.uniform ? Scheme::Uniform : Scheme::Discriminatory;
      row.total_demand = r->demand.x[i];
      row.profit = (prices[i] - cost) * r->demand.x[i];
      row.avg_price = prices[i];
      row.converged = r->converged;
      row.strict_condition = r->diagnostics.stage_two.strict[i];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("malformed boolean '" + std::string(s) + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_csv(std::span<const SweepRow> rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += to_string(r.axis);
    out += ',' + format_double(r.axis_value);
    out += ',';
    out += to_string(r.scheme);
    out += ',' + format_double(r.total_demand);
    out += ',' + format_double(r.profit);
    out += ',' + format_double(r.avg_price);
    out += r.converged ? ",true" : ",false";
    out += r.strict_condition ? ",true" : ",false";
    out += ',' + std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

std::vector<SweepRow> parse_csv(std::string_view text) {
  std::vector<SweepRow> rows;
  auto lines = split(text, '\n');
  if (lines.empty() || lines.front() != kCsvHeader) {
    throw std::invalid_argument("CSV header does not match the sweep result format");
  }
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto f = split(lines[k], ',');
    if (f.size() != 9) {
      throw std::invalid_argument("CSV line " + std::to_string(k + 1) + " has " +
                                  std::to_string(f.size()) + " fields, expected 9");
    }
    SweepRow r;
    r.axis = parse_axis(f[0]);
    r.axis_value = parse_double(f[1]);
    r.scheme = parse_scheme(f[2]);
    r.total_demand = parse_double(f[3]);
    r.profit = parse_double(f[4]);
    r.avg_price = parse_double(f[5]);
    r.converged = parse_bool(f[6]);
    r.strict_condition = parse_bool(f[7]);
    std::uint64_t seed = 0;
    const auto res = std::from_chars(f[8].data(), f[8].data() + f[8].size(), seed);
    if (res.ec != std::errc()) throw std::invalid_argument("malformed seed '" + std::string(f[8]) + "'");
    r.seed = seed;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_results(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << format_csv(rows);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<SweepRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

void write_results_json(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["axis"] = std::string(to_string(r.axis));
    j["axis_value"] = r.axis_value;
    j["scheme"] = std::string(to_string(r.scheme));
    j["total_demand"] = r.total_demand;
    j["profit"] = r.profit;
    j["avg_price"] = r.avg_price;
    j["converged"] = r.converged;
    j["strict_condition"] = r.strict_condition;
    j["seed"] = r.seed;
    j["prices"] = r.prices;
    j["demand"] = r.demand;
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << arr.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace hashmarket
