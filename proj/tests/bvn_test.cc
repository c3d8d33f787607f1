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

#include "fairrank/bvn.h"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fairrank/errors.h"
#include "fairrank/solvers.h"
#include "gtest/gtest.h"
#include "test_markets.h"

namespace fairrank {
namespace {

using testing::MaxAbsDiff;
using testing::RandomMarket;
using testing::RandomPolicy;

void ExpectValid(const BvnDecomposition& dec, const PolicyTensor& source) {
  const int n = source.num_items();
  ASSERT_EQ(dec.num_users(), source.num_users());
  for (const auto& terms : dec.users) {
    double total = 0.0;
    for (const auto& t : terms) {
      EXPECT_GT(t.weight, 0.0);
      EXPECT_LE(t.weight, 1.0 + 1e-12);
      total += t.weight;
      std::vector<int> sorted = t.items_by_rank;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < n; ++i) ASSERT_EQ(sorted[i], i);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_LE(static_cast<int>(terms.size()), MaxBvnTerms(n));
  }
  EXPECT_LE(MaxAbsDiff(Reconstruct(dec), source), n * dec.epsilon + 1e-9);
}

TEST(BvnTest, IdentityIsOneTerm) {
  PolicyTensor p(1, 3);
  AddRanking(p, 0, std::vector<int>{0, 1, 2}, 1.0);
  const auto dec = BvnDecompose(p);
  ASSERT_EQ(dec.users[0].size(), 1u);
  EXPECT_EQ(dec.users[0][0].weight, 1.0);
  EXPECT_EQ(dec.users[0][0].items_by_rank, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(Reconstruct(dec).values(), p.values());
}

TEST(BvnTest, UniformTwoByTwo) {
  const auto dec = BvnDecompose(SolveUniform(1, 2));
  ASSERT_EQ(dec.users[0].size(), 2u);
  EXPECT_NEAR(dec.users[0][0].weight, 0.5, 1e-15);
  EXPECT_NEAR(dec.users[0][1].weight, 0.5, 1e-15);
  EXPECT_NE(dec.users[0][0].items_by_rank, dec.users[0][1].items_by_rank);
}

TEST(BvnTest, CirculantThreeByThree) {
  const PolicyTensor p(1, 3, {0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5});
  const auto dec = BvnDecompose(p);
  ExpectValid(dec, p);
  EXPECT_LE(dec.users[0].size(), 5u);
  EXPECT_LE(MaxAbsDiff(Reconstruct(dec), p), 1e-9);
}

TEST(BvnTest, UniformReconstructsToOneOverN) {
  const auto uni = SolveUniform(2, 6);
  const auto back = Reconstruct(BvnDecompose(uni));
  for (double v : back.values()) EXPECT_NEAR(v, 1.0 / 6, 1e-12);
}

TEST(BvnTest, MaxTermsBound) {
  EXPECT_EQ(MaxBvnTerms(1), 1);
  EXPECT_EQ(MaxBvnTerms(2), 2);
  EXPECT_EQ(MaxBvnTerms(5), 17);
}

TEST(BvnTest, Errors) {
  const PolicyTensor bad(1, 2, {0.7, 0.5, 0.3, 0.5});
  EXPECT_THROW(BvnDecompose(bad), NotDoublyStochasticError);
  EXPECT_THROW(BvnDecompose(SolveUniform(1, 2), 1e-3), InvalidArgumentError);
  EXPECT_THROW(BvnDecompose(SolveUniform(1, 2), 1e-15), InvalidArgumentError);
  const auto dec = BvnDecompose(SolveUniform(2, 2));
  EXPECT_THROW(SampleRanking(dec, 2, 0), IndexError);
  EXPECT_THROW(SampleRanking(dec, -1, 0), IndexError);
}

TEST(SampleRankingTest, SingleTermAlwaysReturned) {
  PolicyTensor p(1, 4);
  AddRanking(p, 0, std::vector<int>{2, 0, 3, 1}, 1.0);
  const auto dec = BvnDecompose(p);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(SampleRanking(dec, 0, seed), (std::vector<int>{2, 0, 3, 1}));
  }
}

TEST(SampleRankingTest, FrequenciesFollowWeights) {
  const auto dec = BvnDecompose(SolveUniform(1, 2));
  const auto first = dec.users[0][0].items_by_rank;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    hits += SampleRanking(dec, 0, seed) == first;
  }
  EXPECT_NEAR(hits / 10000.0, 0.5, 0.02);
  EXPECT_EQ(SampleRanking(dec, 0, 77), SampleRanking(dec, 0, 77));
}

TEST(BvnPropertyTest, RandomMixturesRoundTrip) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 12);
    const auto p = RandomPolicy(2, n, rng, 1 + static_cast<int>(rng() % 40));
    ExpectValid(BvnDecompose(p), p);
  }
}

TEST(BvnPropertyTest, SolverOutputsRoundTrip) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 6; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 20);
    const int n = 2 + static_cast<int>(rng() % 19);
    const auto rel = RandomMarket(m, n, rng, 0.05, 1.0);
    const auto e = ExposureModel::Inverse(n, 1 + static_cast<int>(rng() % n));
    std::vector<PolicyTensor> policies = {SolveUniform(m, n),
                                          SolveUtilityMax(rel, e),
                                          SolveNsw(rel, e).policy};
    try {
      policies.push_back(SolveExpoFair(rel, e).policy);
    } catch (const InfeasibleError&) {
    }
    for (const auto& p : policies) {
      const auto dec = BvnDecompose(p);
      ExpectValid(dec, p);
      EXPECT_NEAR(UserUtility(Reconstruct(dec), rel, e),
                  UserUtility(p, rel, e), 1e-6);
    }
  }
}

}  // namespace
}  // namespace fairrank
