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

#include "fairrank/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "fairrank/errors.h"

namespace fairrank {
namespace {

void CheckSameShape(const PolicyTensor& policy, const RelevanceMatrix& rel) {
  if (policy.num_users() != rel.num_users() ||
      policy.num_items() != rel.num_items()) {
    throw DimensionError(
        "policy is " + std::to_string(policy.num_users()) + "x" +
        std::to_string(policy.num_items()) + " but relevance is " +
        std::to_string(rel.num_users()) + "x" +
        std::to_string(rel.num_items()));
  }
}

void CheckExposureLength(int num_items, const ExposureModel& exposure) {
  if (exposure.num_items() != num_items) {
    throw DimensionError("exposure model has " +
                         std::to_string(exposure.num_items()) +
                         " positions, expected " + std::to_string(num_items));
  }
}

void CheckItem(int item, int num_items) {
  if (item < 0 || item >= num_items) {
    throw IndexError("item index " + std::to_string(item) +
                     " out of range [0, " + std::to_string(num_items) + ")");
  }
}

std::vector<double> MakeWeights(int num_items, int cutoff,
                                double (*weight)(int rank1)) {
  if (num_items < 1) throw InvalidArgumentError("exposure needs n >= 1");
  if (cutoff < 1) throw InvalidArgumentError("exposure cutoff must be >= 1");
  std::vector<double> weights(num_items, 0.0);
  const int limit = std::min(cutoff, num_items);
  for (int k = 0; k < limit; ++k) weights[k] = weight(k + 1);
  return weights;
}

}  // namespace

RelevanceMatrix::RelevanceMatrix(int num_users, int num_items,
                                 std::vector<double> values)
    : num_users_(num_users), num_items_(num_items), values_(std::move(values)) {
  if (num_users < 1) throw InvalidArgumentError("relevance needs m >= 1");
  if (num_items < 2) throw InvalidArgumentError("relevance needs n >= 2");
  if (values_.size() != static_cast<std::size_t>(num_users) * num_items) {
    throw DimensionError("relevance has " + std::to_string(values_.size()) +
                         " values, expected " +
                         std::to_string(num_users * num_items));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgumentError("relevance values must be finite and >= 0");
    }
  }
}

ExposureModel::ExposureModel(Kind kind, int cutoff,
                             std::vector<double> weights)
    : kind_(kind), cutoff_(cutoff), weights_(std::move(weights)) {}

ExposureModel ExposureModel::Inverse(int num_items, int cutoff) {
  auto w = MakeWeights(num_items, cutoff, [](int k) { return 1.0 / k; });
  return ExposureModel(Kind::kInverse, std::min(cutoff, num_items),
                       std::move(w));
}

ExposureModel ExposureModel::Exponential(int num_items, int cutoff) {
  auto w = MakeWeights(num_items, cutoff,
                       [](int k) { return 1.0 / std::exp(k - 1.0); });
  return ExposureModel(Kind::kExponential, std::min(cutoff, num_items),
                       std::move(w));
}

ExposureModel ExposureModel::Dcg(int num_items, int cutoff) {
  auto w = MakeWeights(num_items, cutoff,
                       [](int k) { return 1.0 / std::log2(k + 1.0); });
  return ExposureModel(Kind::kDcg, std::min(cutoff, num_items), std::move(w));
}

ExposureModel ExposureModel::Custom(std::vector<double> weights) {
  if (weights.empty()) throw InvalidArgumentError("empty exposure weights");
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!std::isfinite(weights[k]) || weights[k] < 0.0 || weights[k] > 1.0) {
      throw InvalidArgumentError("exposure weights must lie in [0, 1]");
    }
    if (k > 0 && weights[k] > weights[k - 1]) {
      throw InvalidArgumentError("exposure weights must be nonincreasing");
    }
  }
  int cutoff = 0;
  while (cutoff < static_cast<int>(weights.size()) && weights[cutoff] > 0.0) {
    ++cutoff;
  }
  if (cutoff == 0) throw InvalidArgumentError("exposure weights are all zero");
  return ExposureModel(Kind::kCustom, cutoff, std::move(weights));
}

ExposureModel ExposureModel::FromName(std::string_view kind, int num_items,
                                      int cutoff) {
  if (kind == "inverse") return Inverse(num_items, cutoff);
  if (kind == "exponential") return Exponential(num_items, cutoff);
  if (kind == "dcg") return Dcg(num_items, cutoff);
  throw InvalidArgumentError("unknown exposure kind '" + std::string(kind) +
                             "'");
}

double ExposureModel::Total() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

std::string_view KindName(ExposureModel::Kind kind) {
  switch (kind) {
    case ExposureModel::Kind::kInverse:
      return "inverse";
    case ExposureModel::Kind::kExponential:
      return "exponential";
    case ExposureModel::Kind::kDcg:
      return "dcg";
    case ExposureModel::Kind::kCustom:
      return "custom";
  }
  return "custom";
}

PolicyTensor::PolicyTensor(int num_users, int num_items)
    : PolicyTensor(num_users, num_items,
                   std::vector<double>(static_cast<std::size_t>(num_users) *
                                       num_items * num_items)) {}

PolicyTensor::PolicyTensor(int num_users, int num_items,
                           std::vector<double> values)
    : num_users_(num_users), num_items_(num_items), values_(std::move(values)) {
  if (num_users < 1 || num_items < 1) {
    throw InvalidArgumentError("policy needs m >= 1 and n >= 1");
  }
  if (values_.size() !=
      static_cast<std::size_t>(num_users) * num_items * num_items) {
    throw DimensionError("policy has " + std::to_string(values_.size()) +
                         " values, expected m*n*n");
  }
}

double PolicyTensor::DoublyStochasticResidual() const {
  const int n = num_items_;
  double residual = 0.0;
  std::vector<double> col(n);
  for (int u = 0; u < num_users_; ++u) {
    auto x = UserMatrix(u);
    std::fill(col.begin(), col.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int k = 0; k < n; ++k) {
        const double v = x[i * n + k];
        if (!std::isfinite(v)) return HUGE_VAL;
        residual = std::max({residual, -v, v - 1.0});
        row += v;
        col[k] += v;
      }
      residual = std::max(residual, std::abs(row - 1.0));
    }
    for (double c : col) residual = std::max(residual, std::abs(c - 1.0));
  }
  return residual;
}

bool PolicyTensor::IsDoublyStochastic(double tol) const {
  return DoublyStochasticResidual() <= tol;
}

void PolicyTensor::CheckDoublyStochastic(double tol) const {
  const double residual = DoublyStochasticResidual();
  if (!(residual <= tol)) {
    throw NotDoublyStochasticError("policy violates double stochasticity by " +
                                   std::to_string(residual));
  }
}

void PolicyTensor::Renormalize(int max_sweeps) {
  const int n = num_items_;
  for (double& v : values_) v = std::clamp(v, 0.0, 1.0);
  std::vector<double> col(n);
  for (int u = 0; u < num_users_; ++u) {
    auto x = UserMatrix(u);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
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
      for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(col[k] - 1));
      if (worst <= 1e-12) break;
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
          if (col[k] > 0.0) x[i * n + k] /= col[k];
        }
      }
    }
  }
  for (double& v : values_) v = std::clamp(v, 0.0, 1.0);
}

void AddRanking(PolicyTensor& policy, int user,
                std::span<const int> items_by_rank, double weight) {
  const int n = policy.num_items();
  if (static_cast<int>(items_by_rank.size()) != n) {
    throw DimensionError("ranking length does not match item count");
  }
  auto x = policy.UserMatrix(user);
  for (int k = 0; k < n; ++k) x[items_by_rank[k] * n + k] += weight;
}

std::vector<double> Merit(const RelevanceMatrix& rel) {
  std::vector<double> merit(rel.num_items(), 0.0);
  for (int u = 0; u < rel.num_users(); ++u) {
    auto row = rel.Row(u);
    for (int i = 0; i < rel.num_items(); ++i) merit[i] += row[i];
  }
  return merit;
}

std::vector<double> UserItemExposure(const PolicyTensor& policy,
                                     const ExposureModel& exposure) {
  const int m = policy.num_users();
  const int n = policy.num_items();
  CheckExposureLength(n, exposure);
  const int cutoff = exposure.cutoff();
  std::vector<double> y(static_cast<std::size_t>(m) * n, 0.0);
  for (int u = 0; u < m; ++u) {
    auto x = policy.UserMatrix(u);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int k = 0; k < cutoff; ++k) sum += exposure(k) * x[i * n + k];
      y[static_cast<std::size_t>(u) * n + i] = sum;
    }
  }
  return y;
}

double UserUtility(const PolicyTensor& policy, const RelevanceMatrix& rel,
                   const ExposureModel& exposure) {
  CheckSameShape(policy, rel);
  const auto impact = ItemImpact(policy, rel, exposure);
  return std::accumulate(impact.begin(), impact.end(), 0.0);
}

double CrossImpact(const PolicyTensor& policy, const RelevanceMatrix& rel,
                   const ExposureModel& exposure, ImpactFunction impact,
                   int item, int other) {
  CheckSameShape(policy, rel);
  CheckItem(item, rel.num_items());
  CheckItem(other, rel.num_items());
  const int n = rel.num_items();
  const auto y = UserItemExposure(policy, exposure);
  double sum = 0.0;
  for (int u = 0; u < rel.num_users(); ++u) {
    const double value =
        impact == ImpactFunction::kRelevanceWeighted ? rel(u, item) : 1.0;
    sum += value * y[static_cast<std::size_t>(u) * n + other];
  }
  return sum;
}

std::vector<double> ItemImpact(const PolicyTensor& policy,
                               const RelevanceMatrix& rel,
                               const ExposureModel& exposure,
                               ImpactFunction impact) {
  CheckSameShape(policy, rel);
  const int n = rel.num_items();
  const auto y = UserItemExposure(policy, exposure);
  std::vector<double> result(n, 0.0);
  // Same summation order as CrossImpact(item, item).
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int u = 0; u < rel.num_users(); ++u) {
      const double value =
          impact == ImpactFunction::kRelevanceWeighted ? rel(u, i) : 1.0;
      sum += value * y[static_cast<std::size_t>(u) * n + i];
    }
    result[i] = sum;
  }
  return result;
}

std::vector<double> AmortizedExposure(const PolicyTensor& policy,
                                      const ExposureModel& exposure) {
  const int n = policy.num_items();
  const auto y = UserItemExposure(policy, exposure);
  std::vector<double> result(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int u = 0; u < policy.num_users(); ++u) {
      sum += 1.0 * y[static_cast<std::size_t>(u) * n + i];
    }
    result[i] = sum;
  }
  return result;
}

}  // namespace fairrank
