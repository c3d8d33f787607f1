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

// Domain types of a two-sided ranking market and the measurements every
// solver and metric is built from: user utility, item impact, amortized
// exposure and merit.
//
// Notation used throughout: m users, n items, n ranks. A stochastic ranking
// policy is stored through its marginals X(u, i, k), the probability that
// user u sees item i at rank k (0-based). Each per-user n x n slice is doubly
// stochastic.

#ifndef FAIRRANK_CORE_H_
#define FAIRRANK_CORE_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairrank {

// Tolerance on row and column sums of a doubly stochastic matrix.
inline constexpr double kDoublyStochasticTol = 1e-6;

// m x n grid of nonnegative relevance scores r(u, i), stored row-major.
class RelevanceMatrix {
 public:
  // Throws InvalidArgumentError unless m >= 1, n >= 2 and every value is
  // finite and nonnegative; DimensionError if values.size() != m * n.
  RelevanceMatrix(int num_users, int num_items, std::vector<double> values);

  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }

  double operator()(int user, int item) const {
    return values_[static_cast<std::size_t>(user) * num_items_ + item];
  }
  std::span<const double> Row(int user) const {
    return {values_.data() + static_cast<std::size_t>(user) * num_items_,
            static_cast<std::size_t>(num_items_)};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const RelevanceMatrix&,
                         const RelevanceMatrix&) = default;

 private:
  int num_users_;
  int num_items_;
  std::vector<double> values_;
};

// Position -> examination probability e(k), nonincreasing, zero past the
// cutoff K.
class ExposureModel {
 public:
  enum class Kind { kInverse, kExponential, kDcg, kCustom };

  // e(k) = 1/k for k <= K (1-based ranks).
  static ExposureModel Inverse(int num_items, int cutoff);
  // e(k) = exp(-(k - 1)) for k <= K.
  static ExposureModel Exponential(int num_items, int cutoff);
  // e(k) = 1/log2(k + 1) for k <= K.
  static ExposureModel Dcg(int num_items, int cutoff);
  // Arbitrary weights in [0, 1], nonincreasing. The cutoff is the number of
  // leading nonzero weights.
  static ExposureModel Custom(std::vector<double> weights);
  // Builds one of the named kinds; throws InvalidArgumentError on an unknown
  // name.
  static ExposureModel FromName(std::string_view kind, int num_items,
                                int cutoff);

  Kind kind() const { return kind_; }
  int cutoff() const { return cutoff_; }
  int num_items() const { return static_cast<int>(weights_.size()); }
  // 0-based rank.
  double operator()(int rank) const { return weights_[rank]; }
  const std::vector<double>& weights() const { return weights_; }
  // Total exposure a single user hands out, sum_k e(k).
  double Total() const;

 private:
  ExposureModel(Kind kind, int cutoff, std::vector<double> weights);

  Kind kind_;
  int cutoff_;
  std::vector<double> weights_;
};

std::string_view KindName(ExposureModel::Kind kind);

// Per-user marginal rank probabilities, stored as m row-major n x n
// matrices with entry (i, k) = X(u, i, k).
class PolicyTensor {
 public:
  PolicyTensor(int num_users, int num_items);
  // Throws DimensionError if values.size() != m * n * n.
  PolicyTensor(int num_users, int num_items, std::vector<double> values);

  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }

  double operator()(int user, int item, int rank) const {
    return values_[Offset(user) + static_cast<std::size_t>(item) * num_items_ +
                   rank];
  }
  double& operator()(int user, int item, int rank) {
    return values_[Offset(user) + static_cast<std::size_t>(item) * num_items_ +
                   rank];
  }
  std::span<const double> UserMatrix(int user) const {
    return {values_.data() + Offset(user),
            static_cast<std::size_t>(num_items_) * num_items_};
  }
  std::span<double> UserMatrix(int user) {
    return {values_.data() + Offset(user),
            static_cast<std::size_t>(num_items_) * num_items_};
  }
  const std::vector<double>& values() const { return values_; }

  // Largest |row sum - 1| or |column sum - 1| over all users, also counting
  // how far any entry lies outside [0, 1].
  double DoublyStochasticResidual() const;
  bool IsDoublyStochastic(double tol = kDoublyStochasticTol) const;
  // Throws NotDoublyStochasticError when the residual exceeds tol.
  void CheckDoublyStochastic(double tol = kDoublyStochasticTol) const;
  // Clamps to [0, 1] then alternates row and column normalization until the
  // residual drops below 1e-12 or max_sweeps is reached.
  void Renormalize(int max_sweeps = 100);

 private:
  std::size_t Offset(int user) const {
    return static_cast<std::size_t>(user) * num_items_ * num_items_;
  }

  int num_users_;
  int num_items_;
  std::vector<double> values_;
};

// How an item values a user's examination of one of its ranks.
enum class ImpactFunction {
  kRelevanceWeighted,  // v_i(u, k) = e(k) r(u, i)
  kExposureOnly,       // v_i(u, k) = e(k)
};

// Adds weight * P to the matrix of `user`, where P is the permutation matrix
// placing items_by_rank[k] at rank k.
void AddRanking(PolicyTensor& policy, int user,
                std::span<const int> items_by_rank, double weight);

// Merit_i = sum_u r(u, i).
std::vector<double> Merit(const RelevanceMatrix& rel);

// Expected examination of each item for each user, y(u, i) =
// sum_k e(k) X(u, i, k). Returned row-major as an m x n grid.
std::vector<double> UserItemExposure(const PolicyTensor& policy,
                                     const ExposureModel& exposure);

// sum_u sum_i sum_k e(k) r(u, i) X(u, i, k).
double UserUtility(const PolicyTensor& policy, const RelevanceMatrix& rel,
                   const ExposureModel& exposure);

// Imp_i(X_{*, i, *}) for every item.
std::vector<double> ItemImpact(
    const PolicyTensor& policy, const RelevanceMatrix& rel,
    const ExposureModel& exposure,
    ImpactFunction impact = ImpactFunction::kRelevanceWeighted);

// Impact item `item` would receive under the allocation of item `other`.
double CrossImpact(const PolicyTensor& policy, const RelevanceMatrix& rel,
                   const ExposureModel& exposure, ImpactFunction impact,
                   int item, int other);

// Exp_i = sum_u sum_k e(k) X(u, i, k).
std::vector<double> AmortizedExposure(const PolicyTensor& policy,
                                      const ExposureModel& exposure);

}  // namespace fairrank

#endif  // FAIRRANK_CORE_H_
