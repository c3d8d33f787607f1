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

#include "fairrank/io.h"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include "fairrank/errors.h"
#include "fairrank/solvers.h"
#include "gtest/gtest.h"
#include "test_markets.h"

namespace fairrank {
namespace {

using testing::RandomMarket;
using testing::ToyMarket;
using testing::TopOne;

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

TEST(FormatNumberTest, ShortestWithinDigits) {
  EXPECT_EQ(FormatNumber(0.8, 12), "0.8");
  EXPECT_EQ(FormatNumber(1.0, 12), "1");
  EXPECT_EQ(FormatNumber(0.0, 12), "0");
  EXPECT_EQ(FormatNumber(-0.0, 12), "0");
  EXPECT_EQ(FormatNumber(1.0 / 3, 10), "0.3333333333");
  EXPECT_EQ(FormatNumber(1e-7, 12), "1e-07");
}

TEST(RelevanceCsvTest, ToyMarketBytes) {
  EXPECT_EQ(SerializeRelevanceCsv(ToyMarket()), "# m=2 n=2\n0.8,0.3\n0.5,0.4\n");
  EXPECT_EQ(ParseRelevanceCsv("# m=2 n=2\n0.8,0.3\n0.5,0.4\n"), ToyMarket());
  EXPECT_EQ(ParseRelevanceCsv("# m=2 n=2\n0.8,0.3\n0.5,0.4"), ToyMarket());
}

TEST(RelevanceCsvTest, RoundTripToTwelveDigits) {
  std::mt19937_64 rng(1);
  const auto rel = RandomMarket(7, 5, rng);
  const auto back = ParseRelevanceCsv(SerializeRelevanceCsv(rel));
  for (std::size_t i = 0; i < rel.values().size(); ++i) {
    EXPECT_NEAR(back.values()[i], rel.values()[i], 1e-12);
  }
  EXPECT_EQ(SerializeRelevanceCsv(back), SerializeRelevanceCsv(rel));
}

TEST(RelevanceCsvTest, ParseErrorsCarryPosition) {
  try {
    ParseRelevanceCsv("m=2 n=2\n0.8,0.3\n0.5,0.4\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
  }
  try {
    ParseRelevanceCsv("# m=2 n=2\n0.8,0.3\n0.5,abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 5);
  }
  EXPECT_THROW(ParseRelevanceCsv("# m=2 n=2\n0.8;0.3\n0.5,0.4\n"), ParseError);
  EXPECT_THROW(ParseRelevanceCsv("# m=2 n=2\n0.8,0.3\r\n0.5,0.4\n"),
               ParseError);
  EXPECT_THROW(ParseRelevanceCsv("# m=2 n=2\n0.8,-0.3\n0.5,0.4\n"),
               ParseError);
  EXPECT_THROW(ParseRelevanceCsv(""), ParseError);
}

TEST(RelevanceCsvTest, HeaderBodyMismatch) {
  EXPECT_THROW(ParseRelevanceCsv("# m=3 n=2\n0.8,0.3\n0.5,0.4\n"),
               DimensionError);
  EXPECT_THROW(ParseRelevanceCsv("# m=2 n=3\n0.8,0.3\n0.5,0.4\n"),
               DimensionError);
}

TEST(RelevanceCsvTest, Files) {
  const std::string path = TempPath("toy.csv");
  SaveRelevance(ToyMarket(), path);
  EXPECT_EQ(LoadRelevance(path), ToyMarket());
  EXPECT_THROW(LoadRelevance(TempPath("missing/none.csv")), IoError);
  EXPECT_THROW(SaveRelevance(ToyMarket(), TempPath("missing/none.csv")),
               IoError);
}

TEST(PolicyJsonTest, NswRoundTrip) {
  const auto rel = ToyMarket();
  const auto e = TopOne(2);
  auto result = SolveNsw(rel, e);
  const PolicyDocument doc{result.policy, "nsw", 0.0, "inverse", 1,
                           result.diagnostics};
  const std::string path = TempPath("nsw.json");
  SavePolicy(doc, path);
  const auto back = LoadPolicy(path);
  const auto imp = ItemImpact(back.policy, rel, e);
  EXPECT_NEAR(imp[0], 0.8, 1e-9);
  EXPECT_NEAR(imp[1], 0.4, 1e-9);
  EXPECT_EQ(back.policy_type, "nsw");
  EXPECT_EQ(back.alpha, 0.0);
  EXPECT_EQ(back.exposure_kind, "inverse");
  EXPECT_EQ(back.cutoff, 1);
  EXPECT_EQ(back.diagnostics.iterations, result.diagnostics.iterations);
  EXPECT_TRUE(back.diagnostics.duality_gap.has_value());
  EXPECT_FALSE(back.diagnostics.constraint_residual.has_value());
  EXPECT_EQ(SerializePolicyJson(back), SerializePolicyJson(doc));
}

TEST(PolicyJsonTest, NullAlphaAndSchema) {
  const PolicyDocument doc{SolveUniform(1, 2), "uniform", std::nullopt,
                           "inverse", 2, {}};
  const std::string text = SerializePolicyJson(doc);
  EXPECT_NE(text.find("\"alpha\": null"), std::string::npos);
  EXPECT_NE(text.find("\"schema\": \"policy/v1\""), std::string::npos);
  EXPECT_FALSE(ParsePolicyJson(text).alpha.has_value());
  std::string wrong = text;
  wrong.replace(wrong.find("policy/v1"), 9, "policy/v9");
  EXPECT_THROW(ParsePolicyJson(wrong), SchemaError);
  EXPECT_THROW(ParsePolicyJson("{\"schema\": \"policy/v1\"}"), SchemaError);
  EXPECT_THROW(ParsePolicyJson("{\"schema\": "), ParseError);
}

TEST(PolicyJsonTest, RejectsNonDoublyStochastic) {
  const PolicyDocument bad{PolicyTensor(1, 2, {0.7, 0.5, 0.3, 0.5}), "x",
                           std::nullopt, "inverse", 1, {}};
  EXPECT_THROW(SerializePolicyJson(bad), NotDoublyStochasticError);
  const PolicyDocument good{SolveUniform(1, 2), "uniform", std::nullopt,
                            "inverse", 1, {}};
  std::string text = SerializePolicyJson(good);
  text.replace(text.find("0.5"), 3, "0.9");
  EXPECT_THROW(ParsePolicyJson(text), NotDoublyStochasticError);
}

TEST(MetricsJsonTest, RoundTrip) {
  FairnessReport report;
  report.user_utility = 1.23;
  report.mean_max_envy = 0.07;
  report.pct_improved_10 = 50;
  report.pct_decreased_10 = 50;
  report.per_item_impact = {0.95, 0.28, 0.0};
  report.per_item_impact_ratio_vs_uniform = {1.4615, 0.8, std::nullopt};
  report.excluded_items = {2};
  const std::string path = TempPath("metrics.json");
  SaveMetrics(report, path);
  const auto back = LoadMetrics(path);
  EXPECT_EQ(back.user_utility, 1.23);
  EXPECT_EQ(back.per_item_impact, report.per_item_impact);
  EXPECT_EQ(back.per_item_impact_ratio_vs_uniform,
            report.per_item_impact_ratio_vs_uniform);
  EXPECT_EQ(back.excluded_items, report.excluded_items);
  EXPECT_THROW(ParseMetricsJson("{\"schema\": \"policy/v1\"}"), SchemaError);
}

TEST(DecompositionJsonTest, RoundTrip) {
  BvnDecomposition dec;
  dec.num_items = 3;
  dec.users = {{{0.25, {0, 1, 2}}, {0.75, {2, 0, 1}}}, {{1.0, {1, 2, 0}}}};
  const auto back = ParseDecompositionJson(SerializeDecompositionJson(dec));
  ASSERT_EQ(back.num_users(), 2);
  EXPECT_EQ(back.users[0][1].weight, 0.75);
  EXPECT_EQ(back.users[0][1].items_by_rank, (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(back.epsilon, dec.epsilon);
  std::string text = SerializeDecompositionJson(dec);
  const auto pos = text.find("1,\n");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 1, "0");
  EXPECT_THROW(ParseDecompositionJson(text), SchemaError);
}

TEST(SweepCsvTest, HeaderRowsAndErrors) {
  EXPECT_EQ(SweepCsvHeader(),
            "policy,lambda,noise_c,k,n_items,seed,user_utility,mean_max_envy,"
            "pct_improved_10,pct_decreased_10\n");
  FairnessReport r;
  r.user_utility = 1.0 / 3;
  r.mean_max_envy = 0.07;
  r.pct_improved_10 = 100;
  SweepRow row{"nsw", 0.5, 0.05, 5, 50, 3, r};
  EXPECT_EQ(FormatSweepRow(row), "nsw,0.5,0.05,5,50,3,0.3333333333,0.07,100,0\n");
  row.report.reset();
  EXPECT_EQ(FormatSweepRow(row), "nsw,0.5,0.05,5,50,3,error,error,error,error\n");

  const std::string path = TempPath("sweep.csv");
  std::filesystem::remove(path);
  row.report = r;
  for (int i = 0; i < 300; ++i) AppendSweepRow(row, path);
  const std::string text = ReadFile(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 301);
  EXPECT_EQ(text.rfind(SweepCsvHeader(), 0), 0u);
}

}  // namespace
}  // namespace fairrank
