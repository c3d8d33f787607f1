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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "fairrank/errors.h"
#include "fairrank/solvers.h"

namespace fairrank {

LinkFunction LinkFunction::Power(double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw InvalidArgumentError("power link exponent must be positive");
  }
  return {Kind::kPower, exponent};
}

double LinkFunction::operator()(double merit) const {
  return kind == Kind::kIdentity ? merit : std::pow(merit, exponent);
}

PolicyTensor SolveUniform(int num_users, int num_items) {
  if (num_users < 1 || num_items < 2) {
    throw InvalidArgumentError("uniform policy needs m >= 1 and n >= 2");
  }
  std::vector<double> values(
      static_cast<std::size_t>(num_users) * num_items * num_items,
      1.0 / num_items);
  return PolicyTensor(num_users, num_items, std::move(values));
}

PolicyTensor SolveUtilityMax(const RelevanceMatrix& rel,
                             const ExposureModel& exposure) {
  const int m = rel.num_users();
  const int n = rel.num_items();
  if (exposure.num_items() != n) {
    throw DimensionError("exposure length does not match item count");
  }
  PolicyTensor policy(m, n);
  std::vector<int> order(n);
  for (int u = 0; u < m; ++u) {
    std::iota(order.begin(), order.end(), 0);
    auto row = rel.Row(u);
    std::stable_sort(order.begin(), order.end(),
                     [&row](int a, int b) { return row[a] > row[b]; });
    AddRanking(policy, u, order, 1.0);
  }
  return policy;
}

double NswObjective(const PolicyTensor& policy, const RelevanceMatrix& rel,
                    const ExposureModel& exposure, double alpha,
                    ImpactFunction impact) {
  const auto merit = Merit(rel);
  const auto imp = ItemImpact(policy, rel, exposure, impact);
  double objective = 0.0;
  for (int i = 0; i < rel.num_items(); ++i) {
    const double weight = alpha == 0.0 ? 1.0 : std::pow(merit[i], alpha);
    const bool identically_zero =
        impact == ImpactFunction::kRelevanceWeighted && merit[i] == 0.0;
    if (weight <= 0.0 || identically_zero) continue;
    if (imp[i] <= 0.0) return -std::numeric_limits<double>::infinity();
    objective += weight * std::log(imp[i]);
  }
  return objective;
}

namespace {

// All points of the simplex {p >= 0, sum p = 1} in dimension n whose
// coordinates are multiples of 1/divisions.
std::vector<std::vector<double>> SimplexGrid(int n, int divisions) {
  std::vector<std::vector<double>> points;
  std::vector<int> counts(n, 0);
  std::function<void(int, int)> fill = [&](int dim, int remaining) {
    if (dim == n - 1) {
      counts[dim] = remaining;
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) {
        p[i] = static_cast<double>(counts[i]) / divisions;
      }
      points.push_back(std::move(p));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[dim] = c;
      fill(dim + 1, remaining - c);
    }
  };
  fill(0, divisions);
  return points;
}

double Binomial(int n, int k) {
  double result = 1.0;
  for (int j = 1; j <= k; ++j) result = result * (n - k + j) / j;
  return result;
}

}  // namespace

double BruteForceOracle(const RelevanceMatrix& rel,
                        const ExposureModel& exposure,
                        const OracleObjective& objective, double grid_step) {
  const int m = rel.num_users();
  const int n = rel.num_items();
  if (m > 3 || n > 3) {
    throw SizeError("brute-force oracle is limited to 3 users and 3 items");
  }
  if (exposure.num_items() != n) {
    throw DimensionError("exposure length does not match item count");
  }
  if (exposure.cutoff() != 1) {
    throw InvalidArgumentError("brute-force oracle requires cutoff K = 1");
  }
  if (!(grid_step > 0.0) || grid_step > 1.0) {
    throw InvalidArgumentError("grid_step must lie in (0, 1]");
  }
  const int divisions = static_cast<int>(std::lround(1.0 / grid_step));
  const double per_user = Binomial(divisions + n - 1, n - 1);
  if (std::pow(per_user, m) > 5e7) {
    throw SizeError("brute-force grid exceeds 5e7 points");
  }

  const double top = exposure(0);
  const auto merit = Merit(rel);
  std::vector<double> weight(n, 0.0);
  std::vector<double> target(n, 0.0);
  if (objective.kind == OracleObjective::Kind::kNsw) {
    for (int i = 0; i < n; ++i) {
      if (merit[i] > 0.0) {
        weight[i] =
            objective.alpha == 0.0 ? 1.0 : std::pow(merit[i], objective.alpha);
      }
    }
  } else if (objective.kind == OracleObjective::Kind::kExpoFair) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += objective.link(merit[i]);
    for (int i = 0; i < n; ++i) {
      target[i] = objective.link(merit[i]) * m * exposure.Total() / total;
    }
  }

  const auto grid = SimplexGrid(n, divisions);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> imp(n), exp(n);
  std::vector<std::size_t> index(m, 0);
  while (true) {
    std::fill(imp.begin(), imp.end(), 0.0);
    std::fill(exp.begin(), exp.end(), 0.0);
    for (int u = 0; u < m; ++u) {
      const auto& p = grid[index[u]];
      for (int i = 0; i < n; ++i) {
        imp[i] += top * rel(u, i) * p[i];
        exp[i] += top * p[i];
      }
    }
    double value = 0.0;
    switch (objective.kind) {
      case OracleObjective::Kind::kNsw:
        for (int i = 0; i < n; ++i) {
          if (weight[i] == 0.0) continue;
          value += imp[i] > 0.0 ? weight[i] * std::log(imp[i])
                                : -std::numeric_limits<double>::infinity();
        }
        break;
      case OracleObjective::Kind::kUtility:
        value = std::accumulate(imp.begin(), imp.end(), 0.0);
        break;
      case OracleObjective::Kind::kExpoFair: {
        bool feasible = true;
        for (int i = 0; i < n; ++i) {
          if (std::abs(exp[i] - target[i]) > grid_step * top + 1e-12) {
            feasible = false;
          }
        }
        value = feasible ? std::accumulate(imp.begin(), imp.end(), 0.0)
                         : -std::numeric_limits<double>::infinity();
        break;
      }
    }
    best = std::max(best, value);

    int u = 0;
    while (u < m && ++index[u] == grid.size()) index[u++] = 0;
    if (u == m) break;
  }
  return best;
}

}  // namespace fairrank
