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

#include "fairrank/synth.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "fairrank/errors.h"

namespace fairrank {
namespace {

double UnitDraw(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t BoundedDraw(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

SyntheticMarket GenerateMarket(const SyntheticConfig& config) {
  const int m = config.num_users;
  const int n = config.num_items;
  if (m < 1 || n < 2) throw InvalidArgumentError("need m >= 1 and n >= 2");
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) {
    throw InvalidArgumentError("lambda must lie in [0, 1]");
  }
  if (!(config.noise_c >= 0.0) || !std::isfinite(config.noise_c)) {
    throw InvalidArgumentError("noise_c must be finite and >= 0");
  }
  if (!(config.popular_fraction >= 0.0 && config.popular_fraction <= 1.0)) {
    throw InvalidArgumentError("popular_fraction must lie in [0, 1]");
  }
  std::mt19937_64 engine(config.seed);
  const std::size_t size = static_cast<std::size_t>(m) * n;

  std::vector<double> uniform(size);
  for (double& v : uniform) v = UnitDraw(engine);

  std::vector<int> items(n);
  std::iota(items.begin(), items.end(), 0);
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<int>(BoundedDraw(engine, i + 1));
    std::swap(items[i], items[j]);
  }
  const auto num_popular =
      static_cast<int>(std::lround(config.popular_fraction * n));
  std::vector<bool> popular(n, false);
  for (int k = 0; k < num_popular; ++k) popular[items[k]] = true;

  std::vector<double> truth(size);
  for (int u = 0; u < m; ++u) {
    for (int i = 0; i < n; ++i) {
      // 1-based indices in the popularity profile.
      const double item_factor = static_cast<double>(n - i) / n;
      const double user_factor = popular[i]
                                     ? static_cast<double>(m - u) / m
                                     : static_cast<double>(u + 1) / m;
      const std::size_t idx = static_cast<std::size_t>(u) * n + i;
      truth[idx] = (1.0 - config.lambda) * uniform[idx] +
                   config.lambda * item_factor * user_factor;
    }
  }

  std::vector<double> predicted(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    const double noise = -config.noise_c + 2.0 * config.noise_c * UnitDraw(engine);
    predicted[idx] = std::clamp(truth[idx] + noise, 0.0, 1.0);
  }
  return {RelevanceMatrix(m, n, std::move(truth)),
          RelevanceMatrix(m, n, std::move(predicted))};
}

RelevanceMatrix AdversarialMarket(int n) {
  if (n < 2) throw InvalidArgumentError("adversarial market needs n >= 2");
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  const double denom = static_cast<double>(n) * n;
  for (int u = 0; u < n; ++u) {
    for (int i = 0; i < n; ++i) {
      values[static_cast<std::size_t>(u) * n + i] =
          static_cast<double>(n - u) * (n - i) / denom;
    }
  }
  return RelevanceMatrix(n, n, std::move(values));
}

}  // namespace fairrank
