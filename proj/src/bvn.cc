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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fairrank/errors.h"

namespace fairrank {
namespace {

using Matrix = std::vector<double>;  // n x n row-major, (item, rank)

// Kuhn's augmenting-path matching of items to ranks over entries >= floor.
// Returns rank_of_item, or an empty vector when no perfect matching exists.
std::vector<int> PerfectMatching(const Matrix& x, int n, double floor) {
  std::vector<int> item_at_rank(n, -1);
  std::vector<char> visited(n);
  std::function<bool(int)> augment = [&](int item) {
    for (int k = 0; k < n; ++k) {
      if (x[item * n + k] < floor || visited[k]) continue;
      visited[k] = 1;
      if (item_at_rank[k] < 0 || augment(item_at_rank[k])) {
        item_at_rank[k] = item;
        return true;
      }
    }
    return false;
  };
  for (int item = 0; item < n; ++item) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!augment(item)) return {};
  }
  std::vector<int> rank_of_item(n);
  for (int k = 0; k < n; ++k) rank_of_item[item_at_rank[k]] = k;
  return rank_of_item;
}

// Perfect matching on entries > epsilon maximizing its smallest entry.
std::vector<int> BottleneckMatching(const Matrix& x, int n, double epsilon) {
  std::vector<double> levels;
  for (double v : x) {
    if (v > epsilon) levels.push_back(v);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.empty()) return {};
  // Smallest index whose threshold admits a perfect matching.
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  auto best = PerfectMatching(x, n, levels[hi]);
  if (best.empty()) return {};
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto matching = PerfectMatching(x, n, levels[mid]);
    if (matching.empty()) {
      lo = mid + 1;
    } else {
      hi = mid;
      best = std::move(matching);
    }
  }
  return best;
}

void Rebalance(Matrix& x, int n) {
  std::vector<double> col(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int k = 0; k < n; ++k) row += x[i * n + k];
      worst = std::max(worst, std::abs(row - 1.0));
      if (row > 0.0) {
        for (int k = 0; k < n; ++k) x[i * n + k] /= row;
      }
    }
    std::fill(col.begin(), col.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) col[k] += x[i * n + k];
    }
    for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(col[k] - 1.0));
    if (worst <= 1e-15) break;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (col[k] > 0.0) x[i * n + k] /= col[k];
      }
    }
  }
}

// Removes affinely dependent terms until at most (n-1)^2 + 1 remain, keeping
// the weighted sum of permutation matrices unchanged.
void CaratheodoryReduce(std::vector<RankingTerm>& terms, int n) {
  const int limit = MaxBvnTerms(n);
  const int dims = n * n + 1;
  while (static_cast<int>(terms.size()) > limit) {
    const int count = limit + 1;
    // dims x count system [vec(P_t); 1].
    std::vector<double> a(static_cast<std::size_t>(dims) * count, 0.0);
    for (int t = 0; t < count; ++t) {
      for (int k = 0; k < n; ++k) {
        a[static_cast<std::size_t>(terms[t].items_by_rank[k] * n + k) * count +
          t] = 1.0;
      }
      a[static_cast<std::size_t>(n * n) * count + t] = 1.0;
    }
    auto at = [&a, count](int r, int c) -> double& {
      return a[static_cast<std::size_t>(r) * count + c];
    };
    std::vector<int> pivot_col_of_row;
    std::vector<char> is_pivot(count, 0);
    int row = 0;
    for (int c = 0; c < count && row < dims; ++c) {
      int best = row;
      for (int r = row + 1; r < dims; ++r) {
        if (std::abs(at(r, c)) > std::abs(at(best, c))) best = r;
      }
      if (std::abs(at(best, c)) < 1e-10) continue;
      for (int j = 0; j < count; ++j) std::swap(at(row, j), at(best, j));
      const double p = at(row, c);
      for (int j = 0; j < count; ++j) at(row, j) /= p;
      for (int r = 0; r < dims; ++r) {
        if (r == row || at(r, c) == 0.0) continue;
        const double f = at(r, c);
        for (int j = 0; j < count; ++j) at(r, j) -= f * at(row, j);
      }
      pivot_col_of_row.push_back(c);
      is_pivot[c] = 1;
      ++row;
    }
    const int free = static_cast<int>(
        std::find(is_pivot.begin(), is_pivot.end(), 0) - is_pivot.begin());
    std::vector<double> null(count, 0.0);
    null[free] = 1.0;
    for (int r = 0; r < static_cast<int>(pivot_col_of_row.size()); ++r) {
      null[pivot_col_of_row[r]] = -at(r, free);
    }
    // The entries of a null vector sum to zero, so one sign has a large
    // entry.
    if (*std::max_element(null.begin(), null.end()) <
        -*std::min_element(null.begin(), null.end())) {
      for (double& c : null) c = -c;
    }
    double theta = HUGE_VAL;
    int argmin = -1;
    for (int t = 0; t < count; ++t) {
      if (null[t] > 1e-12 && terms[t].weight / null[t] < theta) {
        theta = terms[t].weight / null[t];
        argmin = t;
      }
    }
    for (int t = 0; t < count; ++t) terms[t].weight -= theta * null[t];
    terms[argmin].weight = 0.0;
    std::erase_if(terms, [](const RankingTerm& term) {
      return term.weight <= 1e-15;
    });
  }
}

std::vector<RankingTerm> DecomposeUser(std::span<const double> source, int n,
                                       double epsilon) {
  Matrix x(source.begin(), source.end());
  for (double& v : x) {
    if (v <= epsilon) v = 0.0;
  }
  Rebalance(x, n);

  std::vector<RankingTerm> terms;
  double extracted = 0.0;
  while (true) {
    const double largest = *std::max_element(x.begin(), x.end());
    if (largest <= epsilon) break;
    const auto rank_of_item = BottleneckMatching(x, n, epsilon);
    if (rank_of_item.empty()) {
      if (1.0 - extracted <= n * epsilon) break;
      throw MatchingFailureError(
          "no perfect matching on entries above epsilon with " +
          std::to_string(1.0 - extracted) +
          " mass left; retry with a smaller epsilon");
    }
    double theta = HUGE_VAL;
    for (int i = 0; i < n; ++i) {
      theta = std::min(theta, x[i * n + rank_of_item[i]]);
    }
    RankingTerm term{theta, std::vector<int>(n)};
    for (int i = 0; i < n; ++i) {
      term.items_by_rank[rank_of_item[i]] = i;
      double& v = x[i * n + rank_of_item[i]];
      v -= theta;
      if (v <= epsilon) v = 0.0;
    }
    extracted += theta;
    terms.push_back(std::move(term));
  }
  if (terms.empty()) {
    throw MatchingFailureError("matrix has no entries above epsilon");
  }
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  for (auto& t : terms) t.weight /= total;
  if (static_cast<int>(terms.size()) > MaxBvnTerms(n)) {
    CaratheodoryReduce(terms, n);
    total = 0.0;
    for (const auto& t : terms) total += t.weight;
    for (auto& t : terms) t.weight /= total;
  }
  return terms;
}

}  // namespace

int MaxBvnTerms(int num_items) {
  return (num_items - 1) * (num_items - 1) + 1;
}

BvnDecomposition BvnDecompose(const PolicyTensor& policy, double epsilon) {
  if (!(epsilon >= 1e-12 && epsilon <= 1e-6)) {
    throw InvalidArgumentError("epsilon must lie in [1e-12, 1e-6]");
  }
  policy.CheckDoublyStochastic();
  BvnDecomposition dec;
  dec.num_items = policy.num_items();
  dec.epsilon = epsilon;
  dec.users.reserve(policy.num_users());
  for (int u = 0; u < policy.num_users(); ++u) {
    dec.users.push_back(
        DecomposeUser(policy.UserMatrix(u), policy.num_items(), epsilon));
  }
  return dec;
}

std::vector<int> SampleRanking(const BvnDecomposition& dec, int user,
                               std::uint64_t seed) {
  if (user < 0 || user >= dec.num_users()) {
    throw IndexError("user index " + std::to_string(user) + " out of range");
  }
  const auto& terms = dec.users[user];
  if (terms.empty()) throw InvalidArgumentError("user has no terms");
  std::mt19937_64 engine(seed);
  const double draw = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  double cumulative = 0.0;
  for (const auto& t : terms) {
    cumulative += t.weight / total;
    if (draw < cumulative) return t.items_by_rank;
  }
  return terms.back().items_by_rank;
}

PolicyTensor Reconstruct(const BvnDecomposition& dec) {
  PolicyTensor policy(dec.num_users(), dec.num_items);
  for (int u = 0; u < dec.num_users(); ++u) {
    for (const auto& t : dec.users[u]) {
      AddRanking(policy, u, t.items_by_rank, t.weight);
    }
  }
  return policy;
}

}  // namespace fairrank
