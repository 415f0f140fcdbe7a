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

#ifndef HASHMARKET_CONFIG_HPP_
#define HASHMARKET_CONFIG_HPP_

// JSON scenario files. Keys mirror ScenarioConfig; every key is optional and
// falls back to default_scenario(). Example:
//
//   {
//     "params": {"R": 1e4, "r": 20, "lambda": 0.0016667, "z": 5e-3,
//                "c": 1e-3, "T": 1, "p_max": 100},
//     "population": {"type": "gaussian", "mu_t": 200, "sigma_sq": 5,
//                    "n": 100, "seed": 1, "x_min": 0.01, "x_max": 100},
//     "sweep": {"axis": "N", "values": [20, 40, 60, 80, 100]},
//     "schemes": ["uniform", "discriminatory"],
//     "montecarlo": {"trials": 1000000, "seed": 1}
//   }
//
// "population" may instead be {"type": "explicit", "t": [100, 200, 300]}.
// Optional "prices" (number or array), "demand" (array) and "gradient"
// (epsilon, max_iters, step_mu, backtracking, vi_samples) are also read.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "hashmarket/scenarios.hpp"

namespace hashmarket {

// Malformed or missing configuration. Carries the offending path/key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace hashmarket

#endif  // HASHMARKET_CONFIG_HPP_
