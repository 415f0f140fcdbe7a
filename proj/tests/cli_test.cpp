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

// Runs the hashmarket executable and checks exit codes and outputs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HASHMARKET_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hashmarket_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, SweepWritesCsv) {
  const auto cfg = write("sweep.json", R"({"population": {"n": 20},
      "sweep": {"axis": "N", "values": [10, 20]}})");
  const auto before = slurp(cfg);
  const auto out = dir_ / "rows.csv";
  const auto r = run("sweep --config " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  const auto csv = slurp(out);
  EXPECT_EQ(csv.rfind("axis,axis_value,scheme,total_demand,profit,avg_price,converged,"
                      "strict_condition,seed\n", 0),
            0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(slurp(cfg), before);
}

TEST_F(CliTest, SweepSchemeFilterAndStdout) {
  const auto cfg = write("s.json", R"({"population": {"n": 10}})");
  const auto r = run("sweep --scheme uniform --config " + cfg.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("none,0,uniform,"), std::string::npos);
  EXPECT_EQ(r.out.find("discriminatory"), std::string::npos);
}

TEST_F(CliTest, SeedOverrideIsEchoed) {
  const auto cfg = write("s.json", R"({"population": {"n": 10, "seed": 5}})");
  const auto out = dir_ / "rows.csv";
  const auto r = run("sweep --scheme uniform --seed 77 --config " + cfg.string() + " --out " +
                     out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(slurp(out).find(",77\n"), std::string::npos);
  EXPECT_NE(r.out.find("seed=77"), std::string::npos);
}

TEST_F(CliTest, MissingConfigIsUsageError) {
  const auto r = run("solve-uniform --config /no/such/file.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/no/such/file.json"), std::string::npos);
}

TEST_F(CliTest, MalformedConfigIsUsageError) {
  const auto cfg = write("bad.json", "{ nope");
  EXPECT_EQ(run("sweep --config " + cfg.string()).code, 2);
}

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("sweep --config x.json --scheme sideways").code, 2);
}

TEST_F(CliTest, CaseStudyPrintsPricesInMinerOrder) {
  const auto out = dir_ / "case.csv";
  const auto r = run("case-study --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("discriminatory_prices=80.68"), std::string::npos) << r.out;
  EXPECT_NE(slurp(out).find("miner,3,discriminatory,"), std::string::npos);
}

TEST_F(CliTest, SolveWritesJson) {
  const auto cfg = write("c.json", R"({"population": {"type": "explicit", "t": [100, 200, 300]}})");
  const auto out = dir_ / "res.json";
  const auto r = run("solve-discriminatory --config " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j.at("prices").size(), 3u);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_TRUE(j.at("diagnostics").contains("vi_probe"));
}

TEST_F(CliTest, NonConvergenceExitsOne) {
  const auto cfg = write("c.json", R"({"population": {"type": "explicit", "t": [100, 200, 300]},
      "gradient": {"max_iters": 1}})");
  EXPECT_EQ(run("solve-discriminatory --config " + cfg.string()).code, 1);
}

TEST_F(CliTest, NashAndSimulate) {
  const auto cfg = write("n.json", R"({"population": {"type": "explicit", "t": [10, 10, 10]},
      "prices": [50, 60, 70], "demand": [40, 60, 50], "montecarlo": {"trials": 20000, "seed": 3}})");
  const auto nash = run("nash --config " + cfg.string());
  EXPECT_EQ(nash.code, 0) << nash.out;
  const auto out = dir_ / "sim.json";
  const auto sim = run("simulate --trials 5000 --config " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(sim.code, 0) << sim.out;
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j.at("trials").get<int>(), 5000);
  EXPECT_EQ(j.at("seed").get<int>(), 3);
}

}  // namespace
