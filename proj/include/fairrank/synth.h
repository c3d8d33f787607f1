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

// Synthetic markets with tunable popularity bias and prediction noise.
//
// Randomness comes from std::mt19937_64 seeded with the config seed. Every
// uniform draw takes the top 53 bits of one engine output, so streams are
// identical on every platform. Draw order: m*n relevance draws (row-major),
// then a Fisher-Yates shuffle of item indices (for i = n-1 down to 1, one
// bounded draw each), then m*n noise draws (row-major).

#ifndef FAIRRANK_SYNTH_H_
#define FAIRRANK_SYNTH_H_

#include <cstdint>

#include "fairrank/core.h"

namespace fairrank {

struct SyntheticConfig {
  int num_users = 100;
  int num_items = 50;
  // Weight of the popularity component, in [0, 1].
  double lambda = 0.5;
  // Prediction noise half-width c >= 0.
  double noise_c = 0.05;
  // Share of items whose popularity falls with the user index.
  double popular_fraction = 0.7;
  std::uint64_t seed = 0;
};

struct SyntheticMarket {
  RelevanceMatrix rel_true;
  RelevanceMatrix rel_pred;
};

// r_true = (1 - lambda) U[0,1] + lambda r_pop, r_pred = clip(r_true + eta,
// 0, 1) with eta ~ U[-c, c]. Throws InvalidArgumentError on a bad config.
SyntheticMarket GenerateMarket(const SyntheticConfig& config);

// n users and n items with r(u, i) = (n - u + 1)(n - i + 1) / n^2 (1-based),
// where merit-proportional exposure starves the last item.
RelevanceMatrix AdversarialMarket(int n);

}  // namespace fairrank

#endif  // FAIRRANK_SYNTH_H_
