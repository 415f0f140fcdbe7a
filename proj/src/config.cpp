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

#include "hashmarket/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hashmarket {

namespace {

using nlohmann::json;

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

ScenarioConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  ScenarioConfig cfg = default_scenario();

  if (j.contains("params")) {
    const auto& p = j.at("params");
    read(p, "R", cfg.params.R);
    read(p, "r", cfg.params.r);
    read(p, "lambda", cfg.params.lambda);
    read(p, "z", cfg.params.z);
    read(p, "c", cfg.params.c);
    read(p, "T", cfg.params.T);
    read(p, "p_max", cfg.params.p_max);
    read(p, "n", cfg.params.n);
  }

  if (j.contains("population")) {
    const auto& p = j.at("population");
    const std::string type = p.value("type", "gaussian");
    if (type == "gaussian") {
      GaussianPopulation g;
      read(p, "mu_t", g.mu_t);
      read(p, "sigma_sq", g.sigma_sq);
      g.n = cfg.params.n;
      read(p, "n", g.n);
      read(p, "seed", g.seed);
      cfg.population = g;
    } else if (type == "explicit") {
      if (!p.contains("t")) throw ConfigError("explicit population needs a 't' array");
      cfg.population = ExplicitPopulation{p.at("t").get<std::vector<std::int64_t>>()};
    } else {
      throw ConfigError("unknown population type '" + type + "'");
    }
    read(p, "x_min", cfg.x_min);
    read(p, "x_max", cfg.x_max);
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    cfg.axis = parse_axis(s.value("axis", "none"));
    read(s, "values", cfg.values);
  }

  if (j.contains("schemes")) {
    cfg.schemes.clear();
    for (const auto& s : j.at("schemes")) cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
  }

  if (j.contains("montecarlo")) {
    MonteCarloSpec mc;
    read(j.at("montecarlo"), "trials", mc.trials);
    read(j.at("montecarlo"), "seed", mc.seed);
    cfg.montecarlo = mc;
  }

  if (j.contains("gradient")) {
    const auto& g = j.at("gradient");
    read(g, "step_mu", cfg.gradient.step_mu);
    read(g, "epsilon", cfg.gradient.epsilon);
    read(g, "max_iters", cfg.gradient.max_iters);
    read(g, "backtracking", cfg.gradient.backtracking);
    read(g, "price_floor", cfg.gradient.price_floor);
    read(g, "vi_samples", cfg.gradient.vi_samples);
  }

  if (j.contains("prices")) {
    const auto& p = j.at("prices");
    if (p.is_number()) {
      cfg.prices = std::vector<double>{p.get<double>()};
    } else {
      cfg.prices = p.get<std::vector<double>>();
    }
  }
  if (j.contains("demand")) cfg.demand = j.at("demand").get<std::vector<double>>();
  return cfg;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

std::string dump_config(const ScenarioConfig& cfg) {
  json j;
  j["params"] = {{"R", cfg.params.R},         {"r", cfg.params.r}, {"lambda", cfg.params.lambda},
                 {"z", cfg.params.z},         {"c", cfg.params.c}, {"T", cfg.params.T},
                 {"p_max", cfg.params.p_max}, {"n", cfg.params.n}};
  if (const auto* g = std::get_if<GaussianPopulation>(&cfg.population)) {
    j["population"] = {{"type", "gaussian"}, {"mu_t", g->mu_t}, {"sigma_sq", g->sigma_sq},
                       {"n", g->n},          {"seed", g->seed}};
  } else {
    j["population"] = {{"type", "explicit"}, {"t", std::get<ExplicitPopulation>(cfg.population).t}};
  }
  j["population"]["x_min"] = cfg.x_min;
  j["population"]["x_max"] = cfg.x_max;
  j["sweep"] = {{"axis", std::string(to_string(cfg.axis))}, {"values", cfg.values}};
  j["schemes"] = json::array();
  for (auto s : cfg.schemes) j["schemes"].push_back(std::string(to_string(s)));
  if (cfg.montecarlo) {
    j["montecarlo"] = {{"trials", cfg.montecarlo->trials}, {"seed", cfg.montecarlo->seed}};
  }
  if (cfg.prices) j["prices"] = *cfg.prices;
  if (cfg.demand) j["demand"] = *cfg.demand;
  return j.dump(2);
}

}  // namespace hashmarket
