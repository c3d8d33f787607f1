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

// Frank-Wolfe for max sum_i w_i log Imp_i over products of Birkhoff
// polytopes.
//
// The objective only sees a user's policy through the per-item exposure
// vector y_u(i) = sum_k e(k) X(u, i, k), and the gradient with respect to
// X(u, i, k) is e(k) * c(u, i) with c(u, i) = w_i r(u, i) / Imp_i. The linear
// oracle over the Birkhoff polytope is therefore a sort of items by c against
// the (nonincreasing) exposure weights. Each user's iterate is kept as an
// explicit convex combination of rankings; two rankings with the same top-K
// prefix have identical exposure vectors and are merged.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "fairrank/errors.h"
#include "fairrank/solvers.h"

namespace fairrank {
namespace {

constexpr int kBisectionSteps = 60;

struct ActiveRanking {
  std::vector<int> items_by_rank;
  double weight;
};

class NswProblem {
 public:
  NswProblem(const RelevanceMatrix& rel, const ExposureModel& exposure,
             const NswConfig& config)
      : exposure_(exposure),
        m_(rel.num_users()),
        n_(rel.num_items()),
        cutoff_(exposure.cutoff()),
        value_(static_cast<std::size_t>(m_) * n_),
        weight_(n_, 0.0),
        active_(m_),
        y_(static_cast<std::size_t>(m_) * n_, 0.0),
        imp_(n_, 0.0) {
    const auto merit = Merit(rel);
    const bool exposure_only = config.impact == ImpactFunction::kExposureOnly;
    for (int u = 0; u < m_; ++u) {
      for (int i = 0; i < n_; ++i) {
        value_[Index(u, i)] = exposure_only ? 1.0 : rel(u, i);
      }
    }
    for (int i = 0; i < n_; ++i) {
      const double w =
          config.alpha == 0.0 ? 1.0 : std::pow(merit[i], config.alpha);
      const bool identically_zero = !exposure_only && merit[i] == 0.0;
      if (w > 0.0 && !identically_zero) {
        weight_[i] = w;
      } else {
        excluded_.push_back(i);
      }
    }
    if (static_cast<int>(excluded_.size()) == n_) {
      throw DegenerateMarketError("no item can receive positive impact");
    }
    InitUniform();
  }

  const std::vector<int>& excluded() const { return excluded_; }

  // Current objective; recomputes impacts from scratch first.
  double Objective() {
    RecomputeImpact();
    double f = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (weight_[i] > 0.0) f += weight_[i] * std::log(imp_[i]);
    }
    return f;
  }

  // Frank-Wolfe duality gap at the current iterate, an upper bound on the
  // distance to the optimal objective.
  double Gap() const {
    std::vector<double> score(n_);
    std::vector<int> order(n_);
    double gap = 0.0;
    for (int u = 0; u < m_; ++u) {
      Scores(u, score);
      Oracle(score, order);
      double best = 0.0;
      for (int k = 0; k < cutoff_; ++k) best += exposure_(k) * score[order[k]];
      double current = 0.0;
      for (int i = 0; i < n_; ++i) current += score[i] * y_[Index(u, i)];
      gap += best - current;
    }
    return gap;
  }

  void PairwiseSweep() {
    std::vector<double> score(n_);
    std::vector<int> order(n_);
    std::vector<double> direction(n_, 0.0);
    std::vector<int> touched;
    for (int u = 0; u < m_; ++u) {
      Scores(u, score);
      Oracle(score, order);
      auto& active = active_[u];
      std::size_t away = 0;
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < active.size(); ++a) {
        double value = 0.0;
        for (int k = 0; k < cutoff_; ++k) {
          value += exposure_(k) * score[active[a].items_by_rank[k]];
        }
        if (value < worst) {
          worst = value;
          away = a;
        }
      }
      if (SamePrefix(order, active[away].items_by_rank)) continue;

      touched.clear();
      for (int k = 0; k < cutoff_; ++k) {
        direction[order[k]] += exposure_(k);
        direction[active[away].items_by_rank[k]] -= exposure_(k);
        touched.push_back(order[k]);
        touched.push_back(active[away].items_by_rank[k]);
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

      double slope = 0.0;
      for (int i : touched) slope += score[i] * direction[i];
      if (slope > 0.0) {
        const double step = LineSearch(u, touched, direction,
                                       active[away].weight);
        if (step > 0.0) {
          for (int i : touched) {
            y_[Index(u, i)] += step * direction[i];
            imp_[i] += step * value_[Index(u, i)] * direction[i];
          }
          if (step >= active[away].weight) {
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(away));
          } else {
            active[away].weight -= step;
          }
          AddVertex(u, order, step);
        }
      }
      for (int i : touched) direction[i] = 0.0;
    }
  }

  void ClassicStep(int iteration, LineSearch rule) {
    std::vector<double> score(n_);
    std::vector<std::vector<int>> targets(m_, std::vector<int>(n_));
    std::vector<double> imp_target(n_, 0.0);
    for (int u = 0; u < m_; ++u) {
      Scores(u, score);
      Oracle(score, targets[u]);
      for (int k = 0; k < cutoff_; ++k) {
        const int i = targets[u][k];
        imp_target[i] += value_[Index(u, i)] * exposure_(k);
      }
    }
    std::vector<double> direction(n_);
    for (int i = 0; i < n_; ++i) direction[i] = imp_target[i] - imp_[i];

    double step = 2.0 / (iteration + 2.0);
    if (rule == LineSearch::kExactBisection) {
      auto derivative = [&](double t) {
        double d = 0.0;
        for (int i = 0; i < n_; ++i) {
          if (weight_[i] == 0.0 || direction[i] == 0.0) continue;
          const double level = imp_[i] + t * direction[i];
          if (level <= 0.0) return -std::numeric_limits<double>::infinity();
          d += weight_[i] * direction[i] / level;
        }
        return d;
      };
      step = Bisect(derivative, 1.0);
    }
    if (step <= 0.0) return;
    for (int u = 0; u < m_; ++u) {
      for (auto& a : active_[u]) a.weight *= 1.0 - step;
      for (int i = 0; i < n_; ++i) y_[Index(u, i)] *= 1.0 - step;
      for (int k = 0; k < cutoff_; ++k) {
        y_[Index(u, targets[u][k])] += step * exposure_(k);
      }
      AddVertex(u, targets[u], step);
      std::erase_if(active_[u], [](const auto& a) { return a.weight <= 0.0; });
    }
    RecomputeImpact();
  }

  PolicyTensor Policy() const {
    PolicyTensor policy(m_, n_);
    for (int u = 0; u < m_; ++u) {
      double total = 0.0;
      for (const auto& a : active_[u]) total += a.weight;
      for (const auto& a : active_[u]) {
        AddRanking(policy, u, a.items_by_rank, a.weight / total);
      }
    }
    policy.Renormalize();
    return policy;
  }

 private:
  std::size_t Index(int u, int i) const {
    return static_cast<std::size_t>(u) * n_ + i;
  }

  // Cyclic shifts form an exact decomposition of the uniform matrix.
  void InitUniform() {
    for (int u = 0; u < m_; ++u) {
      for (int shift = 0; shift < n_; ++shift) {
        std::vector<int> ranking(n_);
        for (int k = 0; k < n_; ++k) ranking[k] = (k + shift) % n_;
        active_[u].push_back({std::move(ranking), 1.0 / n_});
      }
      const double share = exposure_.Total() / n_;
      for (int i = 0; i < n_; ++i) y_[Index(u, i)] = share;
    }
    RecomputeImpact();
  }

  void RecomputeImpact() {
    std::fill(imp_.begin(), imp_.end(), 0.0);
    for (int u = 0; u < m_; ++u) {
      for (int i = 0; i < n_; ++i) {
        imp_[i] += value_[Index(u, i)] * y_[Index(u, i)];
      }
    }
  }

  void Scores(int u, std::vector<double>& score) const {
    for (int i = 0; i < n_; ++i) {
      score[i] =
          weight_[i] > 0.0 ? weight_[i] * value_[Index(u, i)] / imp_[i] : 0.0;
    }
  }

  // Items by decreasing score, ties by index.
  void Oracle(const std::vector<double>& score, std::vector<int>& order) const {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&score](int a, int b) { return score[a] > score[b]; });
  }

  bool SamePrefix(const std::vector<int>& a, const std::vector<int>& b) const {
    return std::equal(a.begin(), a.begin() + cutoff_, b.begin());
  }

  void AddVertex(int u, const std::vector<int>& ranking, double weight) {
    for (auto& a : active_[u]) {
      if (SamePrefix(a.items_by_rank, ranking)) {
        a.weight += weight;
        return;
      }
    }
    active_[u].push_back({ranking, weight});
  }

  // Exact maximizer over [0, max_step] of the concave restriction along
  // the pairwise direction, by bisection on the sign of the derivative.
  double LineSearch(int u, const std::vector<int>& touched,
                    const std::vector<double>& direction,
                    double max_step) const {
    auto derivative = [&](double t) {
      double d = 0.0;
      for (int i : touched) {
        const double delta = value_[Index(u, i)] * direction[i];
        if (weight_[i] == 0.0 || delta == 0.0) continue;
        const double level = imp_[i] + t * delta;
        if (level <= 0.0) return -std::numeric_limits<double>::infinity();
        d += weight_[i] * delta / level;
      }
      return d;
    };
    return Bisect(derivative, max_step);
  }

  template <typename Derivative>
  static double Bisect(const Derivative& derivative, double max_step) {
    if (derivative(max_step) >= 0.0) return max_step;
    double lo = 0.0;
    double hi = max_step;
    for (int it = 0; it < kBisectionSteps; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (derivative(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  const ExposureModel& exposure_;
  const int m_;
  const int n_;
  const int cutoff_;
  // Relevance as seen by the impact function.
  std::vector<double> value_;
  std::vector<double> weight_;
  std::vector<int> excluded_;
  std::vector<std::vector<ActiveRanking>> active_;
  std::vector<double> y_;
  std::vector<double> imp_;
};

}  // namespace

SolveResult SolveNsw(const RelevanceMatrix& rel, const ExposureModel& exposure,
                     const NswConfig& config) {
  if (exposure.num_items() != rel.num_items()) {
    throw DimensionError("exposure length does not match item count");
  }
  if (!(config.alpha >= 0.0) || !std::isfinite(config.alpha)) {
    throw InvalidArgumentError("alpha must be finite and >= 0");
  }
  if (!(config.rel_gap_tol > 0.0)) {
    throw InvalidArgumentError("rel_gap_tol must be > 0");
  }
  if (config.max_iters < 1) {
    throw InvalidArgumentError("max_iters must be >= 1");
  }
  if (config.variant == FrankWolfeVariant::kBlockPairwise &&
      config.line_search == LineSearch::kDiminishing) {
    throw InvalidArgumentError(
        "pairwise Frank-Wolfe requires exact line search");
  }

  NswProblem problem(rel, exposure, config);
  SolveDiagnostics diag;
  diag.excluded_items = problem.excluded();
  double objective = problem.Objective();
  double gap = problem.Gap();
  int iterations = 0;
  while (gap > config.rel_gap_tol * std::max(1.0, std::abs(objective)) &&
         iterations < config.max_iters) {
    if (config.variant == FrankWolfeVariant::kBlockPairwise) {
      problem.PairwiseSweep();
    } else {
      problem.ClassicStep(iterations, config.line_search);
    }
    ++iterations;
    objective = problem.Objective();
    gap = problem.Gap();
  }

  diag.objective_value = objective;
  diag.duality_gap = gap;
  diag.iterations = iterations;
  diag.converged =
      gap <= config.rel_gap_tol * std::max(1.0, std::abs(objective));
  return {problem.Policy(), std::move(diag)};
}

}  // namespace fairrank
