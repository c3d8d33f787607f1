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

// Merit-proportional exposure LP, solved by column generation.
//
// Equal Exp_i / f(Merit_i) with a fixed exposure budget m * TE pins every
// item's amortized exposure to t_i = f(Merit_i) m TE / sum_j f(Merit_j). The
// program becomes
//
//   max  sum_u sum_p c(u, p) lambda(u, p)
//   s.t. sum_p lambda(u, p) = 1                                 for each u
//        sum_u sum_p e(rank of i in p) lambda(u, p) = t_i       for i < n-1
//        lambda >= 0
//
// over columns p = rankings of user u (only the top-K prefix matters). The
// row for the last item is implied by the others. Pricing a column is a sort
// of items by r(u, i) - dual_i, so columns are never enumerated: every
// simplex iteration asks each user for its best ranking. The restricted
// basis is maintained as an explicit dense inverse, refactored periodically.
// A lexicographic ratio test rules out cycling on this highly degenerate LP.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fairrank/errors.h"
#include "fairrank/solvers.h"

namespace fairrank {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptimalityTol = 1e-11;
constexpr int kRefactorInterval = 50;
constexpr int kMaxPivots = 500000;

struct Column {
  int user = -1;  // -1 for an artificial variable
  int artificial_row = -1;
  std::vector<int> prefix;  // top-K items, structural columns only
};

class ColumnGenerationLp {
 public:
  ColumnGenerationLp(const RelevanceMatrix& rel, const ExposureModel& exposure,
                     std::vector<double> targets)
      : rel_(rel),
        exposure_(exposure),
        m_(rel.num_users()),
        n_(rel.num_items()),
        cutoff_(exposure.cutoff()),
        rows_(m_ + n_ - 1),
        rhs_(rows_),
        binv_(static_cast<std::size_t>(rows_) * rows_, 0.0),
        basis_(rows_),
        xb_(rows_) {
    for (int u = 0; u < m_; ++u) rhs_[u] = 1.0;
    for (int i = 0; i + 1 < n_; ++i) rhs_[m_ + i] = targets[i];
    for (int r = 0; r < rows_; ++r) {
      basis_[r].artificial_row = r;
      Binv(r, r) = 1.0;
      xb_[r] = rhs_[r];
    }
  }

  // Returns false if phase one leaves artificial mass.
  bool Solve() {
    phase_two_ = false;
    Optimize();
    double infeasibility = 0.0;
    double scale = 1.0;
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r].user < 0) infeasibility += std::max(xb_[r], 0.0);
      scale = std::max(scale, std::abs(rhs_[r]));
    }
    if (infeasibility > 1e-8 * scale) return false;
    phase_two_ = true;
    Optimize();
    return true;
  }

  int pivots() const { return pivots_; }

  PolicyTensor Policy() const {
    PolicyTensor policy(m_, n_);
    std::vector<double> total(m_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r].user >= 0) total[basis_[r].user] += std::max(xb_[r], 0.0);
    }
    for (int u = 0; u < m_; ++u) {
      if (!(total[u] > 0.0)) {
        throw NumericalError("LP basis lost the convexity row of a user");
      }
    }
    std::vector<int> ranking;
    for (int r = 0; r < rows_; ++r) {
      const Column& col = basis_[r];
      if (col.user < 0 || xb_[r] <= 0.0) continue;
      ranking = col.prefix;
      std::vector<bool> used(n_, false);
      for (int i : ranking) used[i] = true;
      for (int i = 0; i < n_; ++i) {
        if (!used[i]) ranking.push_back(i);
      }
      AddRanking(policy, col.user, ranking, xb_[r] / total[col.user]);
    }
    policy.Renormalize();
    return policy;
  }

 private:
  double& Binv(int r, int c) {
    return binv_[static_cast<std::size_t>(r) * rows_ + c];
  }
  double Binv(int r, int c) const {
    return binv_[static_cast<std::size_t>(r) * rows_ + c];
  }

  // Nonzeros of a column as (row, value) pairs.
  std::vector<std::pair<int, double>> Entries(const Column& col) const {
    if (col.user < 0) return {{col.artificial_row, 1.0}};
    std::vector<std::pair<int, double>> entries;
    entries.emplace_back(col.user, 1.0);
    for (int k = 0; k < cutoff_; ++k) {
      const int item = col.prefix[k];
      if (item + 1 < n_ && exposure_(k) != 0.0) {
        entries.emplace_back(m_ + item, exposure_(k));
      }
    }
    return entries;
  }

  double Cost(const Column& col) const {
    if (col.user < 0) return phase_two_ ? 0.0 : -1.0;
    if (!phase_two_) return 0.0;
    double cost = 0.0;
    for (int k = 0; k < cutoff_; ++k) {
      cost += exposure_(k) * rel_(col.user, col.prefix[k]);
    }
    return cost;
  }

  std::vector<double> Duals() const {
    std::vector<double> dual(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
      const double c = Cost(basis_[r]);
      if (c == 0.0) continue;
      for (int j = 0; j < rows_; ++j) dual[j] += c * Binv(r, j);
    }
    return dual;
  }

  // Best column for user u and its reduced cost.
  std::pair<Column, double> Price(int u, const std::vector<double>& dual,
                                  std::vector<int>& order,
                                  std::vector<double>& score) const {
    for (int i = 0; i < n_; ++i) {
      const double item_dual = i + 1 < n_ ? dual[m_ + i] : 0.0;
      score[i] = (phase_two_ ? rel_(u, i) : 0.0) - item_dual;
    }
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + cutoff_, order.end(),
                      [&score](int a, int b) {
                        return score[a] > score[b] ||
                               (score[a] == score[b] && a < b);
                      });
    double reduced = -dual[u];
    for (int k = 0; k < cutoff_; ++k) reduced += exposure_(k) * score[order[k]];
    Column col;
    col.user = u;
    col.prefix.assign(order.begin(), order.begin() + cutoff_);
    return {std::move(col), reduced};
  }

  void Optimize() {
    std::vector<int> order(n_);
    std::vector<double> score(n_);
    std::vector<double> direction(rows_);
    while (true) {
      const auto dual = Duals();
      Column entering;
      double best = kOptimalityTol;
      for (int u = 0; u < m_; ++u) {
        auto [col, reduced] = Price(u, dual, order, score);
        if (reduced > best) {
          best = reduced;
          entering = std::move(col);
        }
      }
      if (entering.user < 0) return;

      const auto entries = Entries(entering);
      for (int r = 0; r < rows_; ++r) {
        double d = 0.0;
        for (const auto& [row, value] : entries) d += Binv(r, row) * value;
        direction[r] = d;
      }
      const int leave = RatioTest(direction);
      if (leave < 0) throw NumericalError("exposure LP is unbounded");
      Pivot(leave, direction, std::move(entering));
      if (++pivots_ > kMaxPivots) {
        throw NumericalError("exposure LP exceeded the pivot limit");
      }
      if (pivots_ % kRefactorInterval == 0) Refactor();
    }
  }

  int RatioTest(const std::vector<double>& direction) const {
    if (phase_two_) {
      // Artificials are fixed at zero once phase one is done; any basic one
      // the direction touches leaves first.
      int leave = -1;
      double largest = kPivotTol;
      for (int r = 0; r < rows_; ++r) {
        if (basis_[r].user < 0 && std::abs(direction[r]) > largest) {
          largest = std::abs(direction[r]);
          leave = r;
        }
      }
      if (leave >= 0) return leave;
    }
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows_; ++r) {
      if (direction[r] <= kPivotTol) continue;
      const double ratio = std::max(xb_[r], 0.0) / direction[r];
      if (leave < 0 || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
        leave = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio) &&
                 LexicographicallySmaller(r, leave, direction)) {
        leave = r;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    return leave;
  }

  bool LexicographicallySmaller(int a, int b,
                                const std::vector<double>& direction) const {
    for (int j = 0; j < rows_; ++j) {
      const double va = Binv(a, j) / direction[a];
      const double vb = Binv(b, j) / direction[b];
      if (std::abs(va - vb) > 1e-12 * (1.0 + std::abs(va) + std::abs(vb))) {
        return va < vb;
      }
    }
    return false;
  }

  void Pivot(int leave, const std::vector<double>& direction, Column entering) {
    const double pivot = direction[leave];
    double* pivot_row = &binv_[static_cast<std::size_t>(leave) * rows_];
    for (int j = 0; j < rows_; ++j) pivot_row[j] /= pivot;
    xb_[leave] /= pivot;
    for (int r = 0; r < rows_; ++r) {
      if (r == leave || direction[r] == 0.0) continue;
      const double factor = direction[r];
      double* row = &binv_[static_cast<std::size_t>(r) * rows_];
      for (int j = 0; j < rows_; ++j) row[j] -= factor * pivot_row[j];
      xb_[r] -= factor * xb_[leave];
      if (xb_[r] < 0.0 && xb_[r] > -1e-12) xb_[r] = 0.0;
    }
    basis_[leave] = std::move(entering);
  }

  // Rebuilds the inverse from the basic columns by Gauss-Jordan elimination
  // with partial pivoting.
  void Refactor() {
    const int size = rows_;
    std::vector<double> a(static_cast<std::size_t>(size) * size, 0.0);
    for (int c = 0; c < size; ++c) {
      for (const auto& [row, value] : Entries(basis_[c])) {
        a[static_cast<std::size_t>(row) * size + c] = value;
      }
    }
    std::vector<double> inv(static_cast<std::size_t>(size) * size, 0.0);
    for (int r = 0; r < size; ++r) inv[static_cast<std::size_t>(r) * size + r] = 1;
    auto at = [size](std::vector<double>& v, int r, int c) -> double& {
      return v[static_cast<std::size_t>(r) * size + c];
    };
    for (int c = 0; c < size; ++c) {
      int pivot = c;
      for (int r = c + 1; r < size; ++r) {
        if (std::abs(at(a, r, c)) > std::abs(at(a, pivot, c))) pivot = r;
      }
      if (std::abs(at(a, pivot, c)) < 1e-14) {
        throw NumericalError("exposure LP basis became singular");
      }
      if (pivot != c) {
        for (int j = 0; j < size; ++j) {
          std::swap(at(a, c, j), at(a, pivot, j));
          std::swap(at(inv, c, j), at(inv, pivot, j));
        }
      }
      const double p = at(a, c, c);
      for (int j = 0; j < size; ++j) {
        at(a, c, j) /= p;
        at(inv, c, j) /= p;
      }
      for (int r = 0; r < size; ++r) {
        if (r == c) continue;
        const double factor = at(a, r, c);
        if (factor == 0.0) continue;
        for (int j = 0; j < size; ++j) {
          at(a, r, j) -= factor * at(a, c, j);
          at(inv, r, j) -= factor * at(inv, c, j);
        }
      }
    }
    binv_ = std::move(inv);
    for (int r = 0; r < size; ++r) {
      double x = 0.0;
      for (int j = 0; j < size; ++j) x += Binv(r, j) * rhs_[j];
      xb_[r] = (x < 0.0 && x > -1e-12) ? 0.0 : x;
    }
  }

  const RelevanceMatrix& rel_;
  const ExposureModel& exposure_;
  const int m_;
  const int n_;
  const int cutoff_;
  const int rows_;
  std::vector<double> rhs_;
  std::vector<double> binv_;
  std::vector<Column> basis_;
  std::vector<double> xb_;
  bool phase_two_ = false;
  int pivots_ = 0;
};

// Per-item totals of m doubly stochastic matrices can reach t exactly when
// t is majorized by m times the exposure weights.
bool TargetsRealizable(std::vector<double> targets,
                       const ExposureModel& exposure, int num_users) {
  std::sort(targets.begin(), targets.end(), std::greater<>());
  double prefix_target = 0.0;
  double prefix_budget = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    prefix_target += targets[k];
    prefix_budget += num_users * exposure(static_cast<int>(k));
    if (prefix_target > prefix_budget * (1.0 + 1e-12) + 1e-12) return false;
  }
  return true;
}

}  // namespace

SolveResult SolveExpoFair(const RelevanceMatrix& rel,
                          const ExposureModel& exposure,
                          const LinkFunction& link) {
  const int m = rel.num_users();
  const int n = rel.num_items();
  if (exposure.num_items() != n) {
    throw DimensionError("exposure length does not match item count");
  }
  const auto merit = Merit(rel);
  std::vector<double> entitlement(n);
  double total_entitlement = 0.0;
  for (int i = 0; i < n; ++i) {
    if (merit[i] == 0.0) {
      throw ZeroMeritError("item " + std::to_string(i) +
                           " has zero merit; exposure targets are undefined");
    }
    entitlement[i] = link(merit[i]);
    if (!(entitlement[i] > 0.0) || !std::isfinite(entitlement[i])) {
      throw ZeroMeritError("link function is not positive at item " +
                           std::to_string(i));
    }
    total_entitlement += entitlement[i];
  }
  const double budget = m * exposure.Total();
  std::vector<double> targets(n);
  for (int i = 0; i < n; ++i) {
    targets[i] = entitlement[i] * budget / total_entitlement;
  }
  if (!TargetsRealizable(targets, exposure, m)) {
    throw InfeasibleError(
        "merit-proportional exposure targets exceed what rankings can give");
  }

  ColumnGenerationLp lp(rel, exposure, targets);
  if (!lp.Solve()) {
    throw InfeasibleError("exposure LP has no feasible point");
  }
  PolicyTensor policy = lp.Policy();

  SolveDiagnostics diag;
  diag.objective_value = UserUtility(policy, rel, exposure);
  diag.iterations = lp.pivots();
  const auto exp = AmortizedExposure(policy, exposure);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    lo = std::min(lo, exp[i] / entitlement[i]);
    hi = std::max(hi, exp[i] / entitlement[i]);
  }
  diag.constraint_residual = hi - lo;
  return {std::move(policy), std::move(diag)};
}

}  // namespace fairrank
