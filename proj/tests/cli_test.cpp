// Copyright 2026 The optdesign Authors
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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "optdesign_app.hpp"

namespace fs = std::filesystem;

namespace optdesign::app {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("optdesign_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"optdesign"};
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string read(const std::string& name) const {
    std::ifstream is(dir_ / name);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& body) const {
    std::ofstream(dir_ / name) << body;
  }

  std::size_t files_in(const std::string& sub) const {
    if (!fs::exists(dir_ / sub)) return 0;
    return static_cast<std::size_t>(
        std::distance(fs::directory_iterator(dir_ / sub), fs::directory_iterator{}));
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::size_t lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST_F(CliTest, SimulateWritesSessionAndIsReproducible) {
  const std::vector<std::string> args{"simulate", "--model", "fictitious", "--players", "10",
                                      "--rounds", "3", "--A", "3", "--pi", "0.5",
                                      "--params", "0.1,0.5,0.1,0.5", "--seed", "4",
                                      "--out", path("a")};
  ASSERT_EQ(run_cli(args), 0) << err_.str();
  const std::string first = read("a/session.csv");
  EXPECT_EQ(lines(first), 16u);
  EXPECT_EQ(first.substr(0, first.find('\n')), std::string(kSessionHeader));
  ASSERT_EQ(run_cli(args), 0);
  EXPECT_EQ(read("a/session.csv"), first);
}

TEST_F(CliTest, SimulateSampledParams) {
  ASSERT_EQ(run_cli({"simulate", "--model", "roth_erev", "--params", "sample", "--out",
                     path("o")}),
            0)
      << err_.str();
  EXPECT_EQ(lines(read("o/session.csv")), 16u);
}

TEST_F(CliTest, InfeasibleScheduleIsAConfigError) {
  EXPECT_EQ(run_cli({"simulate", "--model", "bayes_nash", "--players", "4", "--rounds", "3",
                     "--out", path("o")}),
            1);
  EXPECT_EQ(files_in("o"), 0u);
  EXPECT_NE(err_.str().find("at most 2 rounds"), std::string::npos);
}

TEST_F(CliTest, BadConfigsAreRejected) {
  write("broken.json", "{\"grid\": ");
  EXPECT_EQ(run_cli({"surface", "--config", path("broken.json"), "--out", path("o")}), 1);
  write("unknown.json", "{\"gird\": {}}");
  EXPECT_EQ(run_cli({"surface", "--config", path("unknown.json"), "--out", path("o")}), 1);
  EXPECT_NE(err_.str().find("gird"), std::string::npos);
  write("badmode.json", "{\"mode\": \"approx\"}");
  EXPECT_EQ(run_cli({"surface", "--config", path("badmode.json"), "--out", path("o")}), 1);
  EXPECT_EQ(run_cli({"surface", "--models", "bayes_nash,nobody", "--out", path("o")}), 1);
  EXPECT_EQ(run_cli({"surface", "--config", path("missing.json"), "--out", path("o")}), 1);
  EXPECT_EQ(run_cli({"launch"}), 1);
  EXPECT_EQ(files_in("o"), 0u);
}

TEST_F(CliTest, ExactModeAboveCapIsRefused) {
  write("big.json", R"({"instance": {"n_pairs": 3, "n_rounds": 3}, "mode": "exact"})");
  EXPECT_EQ(run_cli({"surface", "--config", path("big.json"), "--out", path("o")}), 2);
  EXPECT_NE(err_.str().find("sampled"), std::string::npos);
  EXPECT_EQ(files_in("o"), 0u);
}

TEST_F(CliTest, SurfaceIsDeterministicAcrossThreadCounts) {
  write("small.json", R"({"grid": {"n_a": 3, "n_pi": 3}, "K": 200, "seed": 7})");
  ASSERT_EQ(run_cli({"surface", "--config", path("small.json"), "--threads", "1", "--out",
                     path("t1")}),
            0)
      << err_.str();
  ASSERT_EQ(run_cli({"surface", "--config", path("small.json"), "--threads", "3", "--out",
                     path("t3")}),
            0);
  const std::string s = read("t1/surface.csv");
  EXPECT_EQ(lines(s), 10u);
  EXPECT_EQ(s, read("t3/surface.csv"));
  EXPECT_NE(out_.str().find("argmax A="), std::string::npos);
}

TEST_F(CliTest, SearchWritesTraceAndResult) {
  write("search.json",
        R"({"grid": {"n_a": 5, "n_pi": 5}, "K": 100, "search": {"budget": 14, "n_init": 6}})");
  for (const std::string strategy : {"gpucbpe", "grid_scan", "random"}) {
    const std::string out = path("s_" + strategy);
    ASSERT_EQ(run_cli({"search", "--config", path("search.json"), "--strategy", strategy,
                       "--regret", "--out", out}),
              0)
        << strategy << ": " << err_.str();
    const std::string trace = read("s_" + strategy + "/trace.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')), std::string(kTraceHeader));
    const auto result = nlohmann::json::parse(read("s_" + strategy + "/result.json"));
    EXPECT_LE(result["evaluations"].get<std::size_t>(), 14u);
    EXPECT_EQ(lines(trace), result["evaluations"].get<std::size_t>() + 1);
    EXPECT_TRUE(result.contains("argmax"));
    EXPECT_TRUE(result.contains("stopped_by"));
    ASSERT_EQ(run_cli({"search", "--config", path("search.json"), "--strategy", strategy,
                       "--regret", "--out", out}),
              0);
    EXPECT_EQ(read("s_" + strategy + "/trace.csv"), trace);
  }
  EXPECT_EQ(run_cli({"search", "--config", path("search.json"), "--strategy", "annealing",
                     "--out", path("bad")}),
            1);
}

TEST_F(CliTest, SelectScoresSimulatedSession) {
  ASSERT_EQ(run_cli({"simulate", "--model", "bayes_nash", "--players", "10", "--rounds", "3",
                     "--params", "0.1,0.5,0.1,0.5", "--out", dir_.string()}),
            0);
  const std::vector<std::string> args{
      "select", "--input", path("session.csv"), "--A", "2", "--pi", "0.5", "--models",
      "bayes_nash,no_update,fictitious,roth_erev", "--bootstrap", "sizes=5,15;reps=3",
      "--posterior", "model=bayes_nash", "--out", path("sel")};
  ASSERT_EQ(run_cli(args), 0) << err_.str();
  const auto odds = nlohmann::json::parse(read("sel/odds.json"));
  EXPECT_EQ(odds["matches_used"], 15);
  EXPECT_EQ(odds["models"].size(), 4u);
  EXPECT_EQ(lines(read("sel/bootstrap.csv")), 1u + 2u * 3u * 4u);
  EXPECT_GT(lines(read("sel/posterior.csv")), 1000u);
  const std::string first = read("sel/odds.json") + read("sel/bootstrap.csv");
  ASSERT_EQ(run_cli(args), 0);
  EXPECT_EQ(read("sel/odds.json") + read("sel/bootstrap.csv"), first);
}

TEST_F(CliTest, SelectRejectsBadTokens) {
  write("bad.csv", std::string(kSessionHeader) + "\n1,0,0,1,a,jump,left,0\n");
  EXPECT_EQ(run_cli({"select", "--input", path("bad.csv"), "--out", path("o")}), 1);
  EXPECT_NE(err_.str().find("row 2"), std::string::npos);
  EXPECT_NE(err_.str().find("p1_action"), std::string::npos);
  EXPECT_EQ(files_in("o"), 0u);
}

TEST_F(CliTest, SelectWithEverythingExcludedExitsThree) {
  write("bots.csv", std::string(kSessionHeader) +
                        "\n1,0,0,2,a,go,left,1\n1,1,1,3,b,stop,right,1\n");
  EXPECT_EQ(run_cli({"select", "--input", path("bots.csv"), "--out", path("o")}), 3);
  EXPECT_EQ(files_in("o"), 0u);
}

TEST_F(CliTest, HelpExitsCleanly) { EXPECT_EQ(run_cli({"--help"}), 0); }

}  // namespace
}  // namespace optdesign::app
