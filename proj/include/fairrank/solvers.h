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

// Ranking policies: uniform, utility-maximizing, merit-proportional exposure
// (an LP) and Nash social welfare (a concave program), plus an exhaustive
// grid oracle for tiny single-slot instances.

#ifndef FAIRRANK_SOLVERS_H_
#define FAIRRANK_SOLVERS_H_

#include <optional>
#include <string>
#include <vector>

#include "fairrank/core.h"

namespace fairrank {

// Monotone map from merit to the exposure an item is entitled to.
struct LinkFunction {
  enum class Kind { kIdentity, kPower };

  static LinkFunction Identity() { return {Kind::kIdentity, 1.0}; }
  // f(x) = x^exponent, exponent > 0.
  static LinkFunction Power(double exponent);

  double operator()(double merit) const;

  Kind kind = Kind::kIdentity;
  double exponent = 1.0;
};

enum class FrankWolfeVariant {
  // Per-user pairwise steps (mass moves from the worst active ranking to the
  // oracle ranking) with exact line search. Converges linearly in practice.
  kBlockPairwise,
  // Textbook Frank-Wolfe over all users at once.
  kClassic,
};

enum class LineSearch { kExactBisection, kDiminishing };

struct NswConfig {
  // Merit weight exponent; 0 is plain NSW.
  double alpha = 0.0;
  int max_iters = 10000;
  // Stop once gap <= rel_gap_tol * max(1, |objective|).
  double rel_gap_tol = 1e-6;
  LineSearch line_search = LineSearch::kExactBisection;
  FrankWolfeVariant variant = FrankWolfeVariant::kBlockPairwise;
  ImpactFunction impact = ImpactFunction::kRelevanceWeighted;
};

struct SolveDiagnostics {
  double objective_value = 0.0;
  // Frank-Wolfe duality gap; NSW only.
  std::optional<double> duality_gap;
  int iterations = 0;
  // Largest pairwise violation of Exp_i/f(Merit_i) = Exp_j/f(Merit_j);
  // merit-proportional exposure only.
  std::optional<double> constraint_residual;
  bool converged = true;
  // Items left out of the NSW objective because their impact is
  // identically zero.
  std::vector<int> excluded_items;
};

struct SolveResult {
  PolicyTensor policy;
  SolveDiagnostics diagnostics;
};

// Every entry 1/n.
PolicyTensor SolveUniform(int num_users, int num_items);

// Per user, items sorted by decreasing relevance (ties by index).
PolicyTensor SolveUtilityMax(const RelevanceMatrix& rel,
                             const ExposureModel& exposure);

// Maximizes user utility subject to exposure proportional to f(Merit).
// Throws ZeroMeritError if any item has zero merit and InfeasibleError when
// the exposure targets cannot be realized.
SolveResult SolveExpoFair(const RelevanceMatrix& rel,
                          const ExposureModel& exposure,
                          const LinkFunction& link = LinkFunction::Identity());

// Maximizes sum_i Merit_i^alpha log Imp_i by Frank-Wolfe from the uniform
// policy. Non-convergence is reported through diagnostics, not thrown.
// Throws DegenerateMarketError when no item can have positive impact.
SolveResult SolveNsw(const RelevanceMatrix& rel, const ExposureModel& exposure,
                     const NswConfig& config = {});

// sum_i w_i log Imp_i with w_i = Merit_i^alpha, over items with w_i > 0 and
// not identically zero impact. Returns -inf if an included item has zero
// impact.
double NswObjective(const PolicyTensor& policy, const RelevanceMatrix& rel,
                    const ExposureModel& exposure, double alpha,
                    ImpactFunction impact = ImpactFunction::kRelevanceWeighted);

struct OracleObjective {
  enum class Kind { kNsw, kUtility, kExpoFair };

  static OracleObjective Nsw(double alpha) {
    return {Kind::kNsw, alpha, LinkFunction::Identity()};
  }
  static OracleObjective Utility() {
    return {Kind::kUtility, 0.0, LinkFunction::Identity()};
  }
  static OracleObjective ExpoFair(
      LinkFunction link = LinkFunction::Identity()) {
    return {Kind::kExpoFair, 0.0, link};
  }

  Kind kind;
  double alpha;
  LinkFunction link;
};

// Exhaustive search over single-slot policies (K = 1): each user's top-slot
// distribution ranges over a simplex grid of resolution grid_step. Returns
// the best objective found (NSW log-objective or utility; for the exposure
// program, the best utility among points whose exposures are within
// grid_step * e(1) of their targets, -inf if none). Throws SizeError past
// 3 users, 3 items, or 5e7 grid points, and InvalidArgumentError if K != 1.
double BruteForceOracle(const RelevanceMatrix& rel,
                        const ExposureModel& exposure,
                        const OracleObjective& objective, double grid_step);

}  // namespace fairrank

#endif  // FAIRRANK_SOLVERS_H_
