// Copyright 2026 The fairrank Authors.
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

#include "fairrank/cli.h"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fairrank/errors.h"
#include "fairrank/io.h"
#include "fairrank/solvers.h"
#include "gtest/gtest.h"
#include "test_markets.h"

namespace fairrank {
namespace {

using testing::ToyMarket;
using testing::TopOne;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::path(::testing::TempDir()) /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    std::filesystem::create_directories(dir_);
    SaveRelevance(ToyMarket(), Path("toy.csv"));
  }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  int Run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  std::filesystem::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string Body(const std::string& csv) { return csv.substr(csv.find('\n')); }

std::size_t CountLines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST_F(CliTest, Generate) {
  ASSERT_EQ(Run({"generate", "--users", "2", "--items", "2", "--seed", "1",
                 "--out-true", Path("t.csv"), "--out-pred", Path("p.csv")}),
            0);
  EXPECT_EQ(ReadFile(Path("t.csv")).rfind("# m=2 n=2\n", 0), 0u);
  EXPECT_EQ(ReadFile(Path("p.csv")).rfind("# m=2 n=2\n", 0), 0u);

  ASSERT_EQ(Run({"generate", "--users", "4", "--items", "5", "--noise", "0",
                 "--out-true", Path("a.csv"), "--out-pred", Path("b.csv")}),
            0);
  EXPECT_EQ(Body(ReadFile(Path("a.csv"))), Body(ReadFile(Path("b.csv"))));

  for (const char* name : {"x1.csv", "x2.csv"}) {
    ASSERT_EQ(Run({"generate", "--lambda", "0.5", "--seed", "7", "--out-true",
                   Path(name), "--out-pred", Path(std::string("p") + name)}),
              0);
  }
  EXPECT_EQ(ReadFile(Path("x1.csv")), ReadFile(Path("x2.csv")));
  EXPECT_EQ(ReadFile(Path("px1.csv")), ReadFile(Path("px2.csv")));
}

TEST_F(CliTest, BadFlagsAndIo) {
  EXPECT_EQ(Run({"generate", "--lambda", "2", "--out-true", Path("a"),
                 "--out-pred", Path("b")}),
            kExitUsage);
  EXPECT_EQ(Run({"solve", "--policy", "best", "--relevance", Path("toy.csv"),
                 "--out", Path("x.json")}),
            kExitUsage);
  EXPECT_EQ(Run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(Run({}), kExitUsage);
  EXPECT_EQ(Run({"solve", "--policy", "nsw", "--relevance", Path("none.csv"),
                 "--out", Path("x.json")}),
            kExitIo);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(Run({"generate", "--out-true", Path("no/dir/a.csv"), "--out-pred",
                 Path("b.csv")}),
            kExitIo);
  EXPECT_EQ(Run({"--help"}), kExitOk);
}

TEST_F(CliTest, SolveToyMarket) {
  ASSERT_EQ(Run({"solve", "--policy", "nsw", "--relevance", Path("toy.csv"),
                 "--cutoff", "1", "--out", Path("nsw.json")}),
            0);
  const auto nsw = LoadPolicy(Path("nsw.json"));
  EXPECT_NEAR(UserUtility(nsw.policy, ToyMarket(), TopOne(2)), 1.20, 0.005);

  ASSERT_EQ(Run({"solve", "--policy", "uniform", "--relevance",
                 Path("toy.csv"), "--out", Path("uni.json")}),
            0);
  const auto uni = LoadPolicy(Path("uni.json"));
  for (double v : uni.policy.values()) EXPECT_EQ(v, 0.5);

  ASSERT_EQ(Run({"solve", "--policy", "expo-fair", "--relevance",
                 Path("toy.csv"), "--cutoff", "1", "--out", Path("ef.json")}),
            0);
  const auto ef = LoadPolicy(Path("ef.json"));
  EXPECT_LE(*ef.diagnostics.constraint_residual, 1e-6);
  EXPECT_NEAR(UserUtility(ef.policy, ToyMarket(), TopOne(2)), 1.23, 0.005);
  EXPECT_FALSE(ef.alpha.has_value());
}

TEST_F(CliTest, SolveExitCodes) {
  SaveRelevance(RelevanceMatrix(2, 3, {1.0, 0.01, 0.01, 1.0, 0.01, 0.01}),
                Path("skew.csv"));
  EXPECT_EQ(Run({"solve", "--policy", "expo-fair", "--relevance",
                 Path("skew.csv"), "--cutoff", "3", "--out", Path("x.json")}),
            kExitInfeasible);
  EXPECT_FALSE(std::filesystem::exists(Path("x.json")));

  Run({"generate", "--users", "30", "--items", "12", "--out-true",
       Path("t.csv"), "--out-pred", Path("p.csv")});
  EXPECT_EQ(Run({"solve", "--policy", "nsw", "--relevance", Path("p.csv"),
                 "--max-iters", "1", "--tol", "1e-12", "--out",
                 Path("slow.json")}),
            kExitNotConverged);
  EXPECT_TRUE(LoadPolicy(Path("slow.json")).policy.IsDoublyStochastic());
}

TEST_F(CliTest, Evaluate) {
  Run({"solve", "--policy", "nsw", "--relevance", Path("toy.csv"), "--cutoff",
       "1", "--out", Path("nsw.json")});
  Run({"solve", "--policy", "expo-fair", "--relevance", Path("toy.csv"),
       "--cutoff", "1", "--out", Path("ef.json")});
  Run({"solve", "--policy", "uniform", "--relevance", Path("toy.csv"),
       "--cutoff", "1", "--out", Path("uni.json")});
  ASSERT_EQ(Run({"evaluate", "--policy", Path("nsw.json"), "--relevance",
                 Path("toy.csv"), "--out-json", Path("m1.json")}),
            0);
  EXPECT_NEAR(LoadMetrics(Path("m1.json")).mean_max_envy, 0.0, 1e-4);
  ASSERT_EQ(Run({"evaluate", "--policy", Path("ef.json"), "--relevance",
                 Path("toy.csv"), "--exposure", "inverse", "--cutoff", "1",
                 "--out-json", Path("m2.json")}),
            0);
  EXPECT_NEAR(LoadMetrics(Path("m2.json")).mean_max_envy, 0.07, 0.005);
  ASSERT_EQ(Run({"evaluate", "--policy", Path("uni.json"), "--relevance",
                 Path("toy.csv"), "--impact", "exposure", "--out-json",
                 Path("m3.json")}),
            0);
  const auto uni = LoadMetrics(Path("m3.json"));
  EXPECT_EQ(uni.pct_improved_10, 0.0);
  EXPECT_EQ(uni.pct_decreased_10, 0.0);

  SaveRelevance(RelevanceMatrix(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}),
                Path("big.csv"));
  EXPECT_EQ(Run({"evaluate", "--policy", Path("nsw.json"), "--relevance",
                 Path("big.csv"), "--out-json", Path("m4.json")}),
            kExitDimension);
}

TEST_F(CliTest, DecomposeAndSample) {
  Run({"solve", "--policy", "uniform", "--relevance", Path("toy.csv"),
       "--out", Path("uni.json")});
  ASSERT_EQ(Run({"decompose", "--policy", Path("uni.json"), "--out",
                 Path("uni_dec.json")}),
            0);
  EXPECT_EQ(out_.str().rfind("reconstruction error ", 0), 0u);
  const double error = std::stod(out_.str().substr(21));
  EXPECT_LE(error, 1e-9);
  const auto dec = LoadDecomposition(Path("uni_dec.json"));
  ASSERT_EQ(dec.users[0].size(), 2u);
  EXPECT_EQ(dec.users[0][0].weight, 0.5);

  Run({"solve", "--policy", "max", "--relevance", Path("toy.csv"), "--out",
       Path("max.json")});
  ASSERT_EQ(Run({"decompose", "--policy", Path("max.json"), "--epsilon",
                 "1e-10", "--out", Path("max_dec.json")}),
            0);
  for (const auto& terms : LoadDecomposition(Path("max_dec.json")).users) {
    EXPECT_EQ(terms.size(), 1u);
  }

  ASSERT_EQ(Run({"sample", "--decomposition", Path("max_dec.json"), "--user",
                 "1", "--seed", "4"}),
            0);
  EXPECT_EQ(out_.str(), "1,0 2,1\n");
  ASSERT_EQ(Run({"sample", "--decomposition", Path("uni_dec.json"), "--user",
                 "0", "--seed", "9"}),
            0);
  const std::string first = out_.str();
  Run({"sample", "--decomposition", Path("uni_dec.json"), "--user", "0",
       "--seed", "9"});
  EXPECT_EQ(out_.str(), first);
  EXPECT_EQ(Run({"decompose", "--policy", Path("uni.json"), "--epsilon",
                 "0.01", "--out", Path("x.json")}),
            kExitUsage);
}

TEST_F(CliTest, SweepCountsAndOrder) {
  WriteFile(Path("sweep.json"), R"({
    "policies": ["max", "uniform", "expo-fair", "nsw"],
    "grid": {"lambda": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0], "k": [3],
             "n_items": [6]},
    "users": 8, "seeds": 10
  })");
  ASSERT_EQ(Run({"sweep", "--config", Path("sweep.json"), "--out",
                 Path("sweep.csv")}),
            0);
  const std::string csv = ReadFile(Path("sweep.csv"));
  EXPECT_EQ(CountLines(csv), 241u);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("max,0,0.05,3,6,0,", 0), 0u);
  for (int s = 1; s < 10; ++s) std::getline(lines, line);
  EXPECT_EQ(line.rfind("max,0,0.05,3,6,9,", 0), 0u);
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("uniform,0,0.05,3,6,0,", 0), 0u);
}

TEST_F(CliTest, SweepParallelIsByteIdentical) {
  WriteFile(Path("sweep.json"), R"({
    "policies": ["max", "expo-fair", "nsw", "alpha-nsw"],
    "alphas": [1.0, 2.0],
    "grid": {"lambda": [0.0, 1.0], "noise_c": [0.0, 0.1], "k": [2, 10],
             "n_items": [5, 8]},
    "users": 6, "seeds": 3, "seed_base": 100
  })");
  ASSERT_EQ(Run({"sweep", "--config", Path("sweep.json"), "--out",
                 Path("one.csv")}),
            0);
  ASSERT_EQ(Run({"sweep", "--config", Path("sweep.json"), "--out",
                 Path("four.csv"), "--parallel", "4"}),
            0);
  const std::string one = ReadFile(Path("one.csv"));
  EXPECT_EQ(one, ReadFile(Path("four.csv")));
  EXPECT_EQ(CountLines(one), 1u + 5 * 16 * 3);
  EXPECT_NE(one.find("nsw-alpha=2,"), std::string::npos);
  EXPECT_NE(one.find(",100,"), std::string::npos);
  // K = n with all positions examined leaves expo-fair infeasible here.
  EXPECT_NE(one.find("error,error,error,error"), std::string::npos);
}

TEST_F(CliTest, SweepConfigErrors) {
  WriteFile(Path("bad.json"), R"({"policies": ["best"]})");
  EXPECT_EQ(Run({"sweep", "--config", Path("bad.json"), "--out",
                 Path("x.csv")}),
            kExitIo);
  WriteFile(Path("empty.json"), R"({"grid": {"lambda": []}})");
  EXPECT_THROW(ParseSweepConfig(ReadFile(Path("empty.json"))), SchemaError);
  EXPECT_THROW(ParseSweepConfig("{\n  \"seeds\": }"), ParseError);
  const auto defaults = ParseSweepConfig("{}");
  EXPECT_EQ(defaults.num_users, 100);
  EXPECT_EQ(defaults.item_counts, std::vector<int>{50});
  EXPECT_EQ(defaults.cutoffs, std::vector<int>{5});
  EXPECT_EQ(defaults.num_seeds, 10);
}

}  // namespace
}  // namespace fairrank
