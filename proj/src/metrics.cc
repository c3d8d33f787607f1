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

#include "fairrank/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fairrank/errors.h"
#include "fairrank/solvers.h"

namespace fairrank {

EnvyMatrix::EnvyMatrix(int num_items, std::vector<double> values)
    : num_items_(num_items), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(num_items) * num_items) {
    throw DimensionError("envy matrix must be n x n");
  }
}

double EnvyMatrix::MaxEnvy(int item) const {
  double best = (*this)(item, item);
  for (int j = 0; j < num_items_; ++j) best = std::max(best, (*this)(item, j));
  return std::max(0.0, best - (*this)(item, item));
}

EnvyMatrix ComputeEnvyMatrix(const PolicyTensor& policy,
                             const RelevanceMatrix& rel,
                             const ExposureModel& exposure,
                             ImpactFunction impact) {
  if (policy.num_users() != rel.num_users() ||
      policy.num_items() != rel.num_items()) {
    throw DimensionError("policy and relevance shapes differ");
  }
  const int m = rel.num_users();
  const int n = rel.num_items();
  const auto y = UserItemExposure(policy, exposure);
  std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int u = 0; u < m; ++u) {
        const double value =
            impact == ImpactFunction::kRelevanceWeighted ? rel(u, i) : 1.0;
        sum += value * y[static_cast<std::size_t>(u) * n + j];
      }
      values[static_cast<std::size_t>(i) * n + j] = sum;
    }
  }
  return EnvyMatrix(n, std::move(values));
}

EnvyMatrix ComputeWeightedEnvyMatrix(const PolicyTensor& policy,
                                     const RelevanceMatrix& rel,
                                     const ExposureModel& exposure,
                                     ImpactFunction impact, double alpha) {
  EnvyMatrix envy = ComputeEnvyMatrix(policy, rel, exposure, impact);
  if (alpha == 0.0) return envy;
  const int n = rel.num_items();
  const auto merit = Merit(rel);
  std::vector<double> values = envy.values();
  for (int j = 0; j < n; ++j) {
    if (merit[j] == 0.0) {
      throw ZeroMeritError("item " + std::to_string(j) +
                           " has zero merit; weighted envy is undefined");
    }
    const double scale = std::pow(merit[j], alpha);
    for (int i = 0; i < n; ++i) {
      values[static_cast<std::size_t>(i) * n + j] /= scale;
    }
  }
  return EnvyMatrix(n, std::move(values));
}

double MeanMaxEnvy(const EnvyMatrix& envy) {
  double total = 0.0;
  for (int i = 0; i < envy.num_items(); ++i) total += envy.MaxEnvy(i);
  return total / envy.num_items();
}

DominanceStats ComputeDominanceStats(const PolicyTensor& policy,
                                     const RelevanceMatrix& rel,
                                     const ExposureModel& exposure,
                                     ImpactFunction impact) {
  const int n = rel.num_items();
  const auto imp = ItemImpact(policy, rel, exposure, impact);
  const auto baseline = ItemImpact(SolveUniform(rel.num_users(), n), rel,
                                   exposure, impact);
  DominanceStats stats;
  stats.ratio_vs_uniform.resize(n);
  int improved = 0;
  int decreased = 0;
  for (int i = 0; i < n; ++i) {
    if (baseline[i] == 0.0) {
      stats.excluded_items.push_back(i);
      continue;
    }
    const double ratio = imp[i] / baseline[i];
    stats.ratio_vs_uniform[i] = ratio;
    if (ratio >= 1.1) ++improved;
    if (ratio <= 0.9) ++decreased;
  }
  stats.pct_improved_10 = 100.0 * improved / n;
  stats.pct_decreased_10 = 100.0 * decreased / n;
  return stats;
}

FairnessReport ComputeFairnessReport(const PolicyTensor& policy,
                                     const RelevanceMatrix& rel_true,
                                     const ExposureModel& exposure,
                                     ImpactFunction impact) {
  const EnvyMatrix envy = ComputeEnvyMatrix(policy, rel_true, exposure, impact);
  DominanceStats stats =
      ComputeDominanceStats(policy, rel_true, exposure, impact);
  FairnessReport report;
  report.mean_max_envy = MeanMaxEnvy(envy);
  report.pct_improved_10 = stats.pct_improved_10;
  report.pct_decreased_10 = stats.pct_decreased_10;
  report.user_utility = UserUtility(policy, rel_true, exposure);
  report.per_item_impact = ItemImpact(policy, rel_true, exposure, impact);
  report.per_item_impact_ratio_vs_uniform = std::move(stats.ratio_vs_uniform);
  report.excluded_items = std::move(stats.excluded_items);
  report.max_envy_per_item.resize(envy.num_items());
  for (int i = 0; i < envy.num_items(); ++i) {
    report.max_envy_per_item[i] = envy.MaxEnvy(i);
  }
  return report;
}

}  // namespace fairrank
