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

// Birkhoff-von Neumann decomposition of per-user marginal matrices into
// convex combinations of rankings, and sampling from the result.

#ifndef FAIRRANK_BVN_H_
#define FAIRRANK_BVN_H_

#include <cstdint>
#include <vector>

#include "fairrank/core.h"

namespace fairrank {

inline constexpr double kDefaultBvnEpsilon = 1e-9;

struct RankingTerm {
  double weight;
  // items_by_rank[k] is the item shown at rank k.
  std::vector<int> items_by_rank;
};

struct BvnDecomposition {
  int num_items = 0;
  double epsilon = kDefaultBvnEpsilon;
  std::vector<std::vector<RankingTerm>> users;

  int num_users() const { return static_cast<int>(users.size()); }
};

// Carathéodory bound on the number of terms per user, (n - 1)^2 + 1.
int MaxBvnTerms(int num_items);

// Greedy decomposition: repeatedly extract the perfect matching on entries
// above epsilon whose smallest entry is largest. Entries at or below epsilon
// are dropped up front and the matrix is re-balanced. Throws
// NotDoublyStochasticError for invalid input, InvalidArgumentError for
// epsilon outside [1e-12, 1e-6] and MatchingFailureError if the support
// stops admitting a perfect matching while mass remains.
BvnDecomposition BvnDecompose(const PolicyTensor& policy,
                              double epsilon = kDefaultBvnEpsilon);

// Draws one of the user's rankings with probability equal to its weight.
// Deterministic in (dec, user, seed).
std::vector<int> SampleRanking(const BvnDecomposition& dec, int user,
                               std::uint64_t seed);

PolicyTensor Reconstruct(const BvnDecomposition& dec);

}  // namespace fairrank

#endif  // FAIRRANK_BVN_H_
