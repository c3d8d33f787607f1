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

// Item-fairness measures: envy between items, dominance over the uniform
// policy, and the combined report used by experiments.

#ifndef FAIRRANK_METRICS_H_
#define FAIRRANK_METRICS_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "fairrank/core.h"

namespace fairrank {

// n x n grid; entry (i, j) is the impact item i would get from item j's
// allocation. The diagonal is each item's own impact.
class EnvyMatrix {
 public:
  EnvyMatrix(int num_items, std::vector<double> values);

  int num_items() const { return num_items_; }
  double operator()(int item, int other) const {
    return values_[static_cast<std::size_t>(item) * num_items_ + other];
  }
  // max_j entry(i, j) - entry(i, i), never negative.
  double MaxEnvy(int item) const;
  const std::vector<double>& values() const { return values_; }

 private:
  int num_items_;
  std::vector<double> values_;
};

EnvyMatrix ComputeEnvyMatrix(
    const PolicyTensor& policy, const RelevanceMatrix& rel,
    const ExposureModel& exposure,
    ImpactFunction impact = ImpactFunction::kRelevanceWeighted);

// Entry (i, j) = Imp_i(X_{*, j, *}) / Merit_j^alpha. Throws ZeroMeritError
// when alpha > 0 and some item has zero merit.
EnvyMatrix ComputeWeightedEnvyMatrix(const PolicyTensor& policy,
                                     const RelevanceMatrix& rel,
                                     const ExposureModel& exposure,
                                     ImpactFunction impact, double alpha);

// (1/n) sum_i max(0, max_j entry(i, j) - entry(i, i)).
double MeanMaxEnvy(const EnvyMatrix& envy);

struct DominanceStats {
  double pct_improved_10 = 0.0;
  double pct_decreased_10 = 0.0;
  // Impact ratio against the uniform policy; nullopt for excluded items.
  std::vector<std::optional<double>> ratio_vs_uniform;
  // Items with zero impact under the uniform policy. They count toward the
  // denominator n but never toward either percentage.
  std::vector<int> excluded_items;
};

DominanceStats ComputeDominanceStats(
    const PolicyTensor& policy, const RelevanceMatrix& rel,
    const ExposureModel& exposure,
    ImpactFunction impact = ImpactFunction::kRelevanceWeighted);

struct FairnessReport {
  double mean_max_envy = 0.0;
  double pct_improved_10 = 0.0;
  double pct_decreased_10 = 0.0;
  double user_utility = 0.0;
  std::vector<double> per_item_impact;
  std::vector<std::optional<double>> per_item_impact_ratio_vs_uniform;
  std::vector<double> max_envy_per_item;
  std::vector<int> excluded_items;
};

// All measures, evaluated against the caller's ground-truth relevance.
FairnessReport ComputeFairnessReport(
    const PolicyTensor& policy, const RelevanceMatrix& rel_true,
    const ExposureModel& exposure,
    ImpactFunction impact = ImpactFunction::kRelevanceWeighted);

}  // namespace fairrank

#endif  // FAIRRANK_METRICS_H_
