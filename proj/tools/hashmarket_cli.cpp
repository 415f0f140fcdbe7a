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

// Command-line frontend.
//
//   hashmarket solve-uniform        --config cfg.json [--out result.json]
//   hashmarket solve-discriminatory --config cfg.json [--out result.json]
//   hashmarket nash                 --config cfg.json [--out result.json]
//   hashmarket simulate             --config cfg.json [--trials N] [--out report.json]
//   hashmarket sweep                --config cfg.json [--scheme both] [--out rows.csv]
//   hashmarket case-study           [--out rows.csv]
//
// Exit codes: 0 success, 1 solver did not converge, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hashmarket/config.hpp"
#include "hashmarket/demand_game.hpp"
#include "hashmarket/montecarlo.hpp"
#include "hashmarket/pricing.hpp"
#include "hashmarket/scenarios.hpp"
#include "json.hpp"

namespace hm = hashmarket;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kNotConverged = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string scheme = "both";
  std::optional<std::int64_t> trials;
};

std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

hm::ScenarioConfig load(const Options& o) {
  hm::ScenarioConfig cfg = o.config.empty() ? hm::default_scenario() : hm::load_config(o.config);
  if (o.seed) {
    if (auto* g = std::get_if<hm::GaussianPopulation>(&cfg.population)) g->seed = *o.seed;
    if (!cfg.montecarlo) cfg.montecarlo = hm::MonteCarloSpec{};
    cfg.montecarlo->seed = *o.seed;
  }
  return cfg;
}

std::uint64_t echoed_seed(const hm::ScenarioConfig& cfg, const Options& o) {
  if (o.seed) return *o.seed;
  if (const auto* g = std::get_if<hm::GaussianPopulation>(&cfg.population)) return g->seed;
  return 0;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

hm::PriceSchedule schedule_from(const hm::ScenarioConfig& cfg) {
  if (!cfg.prices) return hm::PriceSchedule::uniform(cfg.params.p_max);
  if (cfg.prices->size() == 1) return hm::PriceSchedule::uniform(cfg.prices->front());
  return hm::PriceSchedule::discriminatory(*cfg.prices);
}

json to_json(const hm::StackelbergResult& r, std::uint64_t seed) {
  json j;
  j["prices"] = r.schedule.prices(r.demand.size());
  j["demand"] = r.demand.x;
  j["profit"] = r.profit;
  j["total_demand"] = r.total_demand();
  j["utilities"] = r.utilities;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["stage_two_interior"] = r.stage_two_interior;
  j["seed"] = seed;
  if (!r.message.empty()) j["message"] = r.message;
  const auto& d = r.diagnostics;
  j["diagnostics"] = {
      {"regime", hm::to_string(d.regime.regime)},
      {"pair_sum", d.regime.pair_sum},
      {"ratio_condition", d.regime.ratio_condition},
      {"cost_part", d.regime.cost_part},
      {"revenue_part", d.regime.revenue_part},
      {"strict_condition", d.stage_two.strict},
      {"positivity_condition", d.stage_two.positivity},
      {"search_price", d.search_price},
      {"search_agrees", d.search_agrees},
      {"projected_gradient_norm", d.projected_gradient_norm},
  };
  if (d.vi) {
    j["diagnostics"]["vi_probe"] = {{"requested", d.vi->requested}, {"tested", d.vi->tested},
                                    {"excluded", d.vi->excluded},   {"monotone", d.vi->monotone},
                                    {"fraction", d.vi->fraction},
                                    {"min_inner_product", d.vi->min_inner_product}};
  }
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration}, {"prices", t.prices}, {"profit", t.profit}});
  }
  j["trace"] = std::move(trace);
  return j;
}

void summary(const hm::StackelbergResult& r, std::uint64_t seed) {
  std::cout << "profit=" << sig6(r.profit) << " total_demand=" << sig6(r.total_demand())
            << " avg_price=" << sig6(r.average_price())
            << " converged=" << (r.converged ? "true" : "false") << " seed=" << seed << "\n";
}

int cmd_solve(const Options& o, hm::Scheme scheme) {
  auto cfg = load(o);
  if (scheme == hm::Scheme::Discriminatory && cfg.gradient.vi_samples == 0) {
    cfg.gradient.vi_samples = 32;
  }
  const auto res = hm::solve_scheme(cfg, scheme);
  const auto seed = echoed_seed(cfg, o);
  if (!o.out.empty()) write_text(o.out, to_json(res, seed).dump(2) + "\n");
  summary(res, seed);
  return res.converged ? kOk : kNotConverged;
}

int cmd_nash(const Options& o) {
  auto cfg = load(o);
  const auto profiles = hm::build_profiles(cfg);
  const auto schedule = schedule_from(cfg);
  schedule.validate(cfg.params);
  const auto eq = hm::solve_stage_two(profiles, schedule, cfg.params);
  const auto seed = echoed_seed(cfg, o);
  json j;
  j["prices"] = schedule.prices(profiles.size());
  j["demand"] = eq.demand.x;
  j["interior"] = eq.interior;
  j["iterations"] = eq.iterations;
  j["converged"] = eq.converged;
  j["strict_condition"] = eq.strict_condition_holds;
  j["used_dynamics"] = eq.used_dynamics;
  j["seed"] = seed;
  if (!eq.message.empty()) j["message"] = eq.message;
  if (!o.out.empty()) write_text(o.out, j.dump(2) + "\n");
  std::cout << "total_demand=" << sig6(eq.demand.total())
            << " profit=" << sig6(hm::cfp_profit(eq.demand.x, schedule, cfg.params))
            << " converged=" << (eq.converged ? "true" : "false") << " seed=" << seed << "\n";
  return eq.converged ? kOk : kNotConverged;
}

int cmd_simulate(const Options& o) {
  auto cfg = load(o);
  hm::SimConfig sim;
  sim.profiles = hm::build_profiles(cfg);
  sim.params = cfg.params;
  const auto spec = cfg.montecarlo.value_or(hm::MonteCarloSpec{});
  sim.trials = o.trials.value_or(spec.trials);
  sim.seed = spec.seed;
  const auto schedule = schedule_from(cfg);
  if (cfg.demand) {
    sim.demand = *cfg.demand;
  } else {
    sim.demand = hm::solve_stage_two(sim.profiles, schedule, cfg.params).demand.x;
  }
  const auto rep = hm::simulate_races(sim);
  const auto utility = hm::empirical_utility(rep, sim, schedule);
  std::vector<double> analytic;
  for (std::size_t i = 0; i < sim.profiles.size(); ++i) {
    analytic.push_back(hm::win_probability(sim.demand, i, sim.profiles[i].t, sim.params));
  }
  json j;
  j["trials"] = rep.trials;
  j["seed"] = sim.seed;
  j["demand"] = sim.demand;
  j["win_rate"] = rep.win_rate;
  j["analytic_win_probability"] = analytic;
  j["stderr"] = rep.stderr_win;
  j["reward_mean"] = rep.reward_mean;
  j["empirical_utility"] = utility;
  if (!o.out.empty()) write_text(o.out, j.dump(2) + "\n");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (rep.stderr_win[i] > 0) {
      worst = std::max(worst, std::abs(rep.win_rate[i] - analytic[i]) / rep.stderr_win[i]);
    }
  }
  std::cout << "trials=" << rep.trials << " miners=" << analytic.size()
            << " max_deviation_stderr=" << sig6(worst) << " seed=" << sim.seed << "\n";
  return kOk;
}

int cmd_sweep(const Options& o) {
  auto cfg = load(o);
  if (o.scheme == "uniform") {
    cfg.schemes = {hm::Scheme::Uniform};
  } else if (o.scheme == "discriminatory") {
    cfg.schemes = {hm::Scheme::Discriminatory};
  } else if (o.scheme == "both" && cfg.schemes.empty()) {
    cfg.schemes = {hm::Scheme::Uniform, hm::Scheme::Discriminatory};
  }
  const auto rows = hm::run_sweep(cfg);
  if (o.out.empty()) {
    std::cout << hm::format_csv(rows);
  } else {
    hm::write_results(rows, o.out);
  }
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.converged;
    if (!r.error.empty()) std::cerr << "point " << r.axis_value << ": " << r.error << "\n";
  }
  const auto& last = rows.back();
  std::cerr << "rows=" << rows.size() << " last_profit=" << sig6(last.profit)
            << " last_total_demand=" << sig6(last.total_demand)
            << " converged=" << (all ? "true" : "false") << " seed=" << echoed_seed(cfg, o) << "\n";
  return all ? kOk : kNotConverged;
}

int cmd_case_study(const Options& o) {
  const auto res = hm::case_study_three_miners();
  const auto params = hm::case_study_config().params;
  if (!o.out.empty()) hm::write_results(hm::case_study_rows(res, params), o.out);
  const auto p = res.discriminatory.schedule.prices(res.discriminatory.demand.size());
  std::cout << "discriminatory_prices=" << sig6(p[0]) << "," << sig6(p[1]) << "," << sig6(p[2])
            << " profit=" << sig6(res.discriminatory.profit)
            << " uniform_profit=" << sig6(res.uniform.profit)
            << " total_demand=" << sig6(res.discriminatory.total_demand())
            << " converged=" << (res.discriminatory.converged ? "true" : "false") << "\n";
  return res.discriminatory.converged && res.uniform.converged ? kOk : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg pricing of hash power for proof-of-work miners"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "scenario JSON file");
    if (config_required) opt->required();
    sub->add_option("--out", o.out, "output path");
    sub->add_option("--seed", o.seed, "override the population / simulation seed");
  };

  auto* solve_u = app.add_subcommand("solve-uniform", "solve the uniform-pricing game");
  add_common(solve_u, true);
  auto* solve_d = app.add_subcommand("solve-discriminatory", "solve the discriminatory-pricing game");
  add_common(solve_d, true);
  auto* nash = app.add_subcommand("nash", "solve the miners' demand game at fixed prices");
  add_common(nash, true);
  auto* sim = app.add_subcommand("simulate", "Monte Carlo mining races at fixed demands");
  add_common(sim, true);
  sim->add_option("--trials", o.trials, "number of races")->check(CLI::PositiveNumber);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV rows");
  add_common(sweep, true);
  sweep->add_option("--scheme", o.scheme, "uniform|discriminatory|both")
      ->check(CLI::IsMember({"uniform", "discriminatory", "both"}));
  auto* cs = app.add_subcommand("case-study", "three-miner case study");
  add_common(cs, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_u) return cmd_solve(o, hm::Scheme::Uniform);
    if (*solve_d) return cmd_solve(o, hm::Scheme::Discriminatory);
    if (*nash) return cmd_nash(o);
    if (*sim) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    if (*cs) return cmd_case_study(o);
  } catch (const hm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::cerr << app.help();
  return kUsage;
}
