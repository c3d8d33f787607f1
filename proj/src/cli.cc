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

#include "fairrank/cli.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "fairrank/bvn.h"
#include "fairrank/core.h"
#include "fairrank/errors.h"
#include "fairrank/metrics.h"
#include "fairrank/solvers.h"
#include "fairrank/synth.h"
#include <nlohmann/json.hpp>

namespace fairrank {
namespace {

using nlohmann::json;

const std::vector<std::string> kExposureKinds = {"inverse", "exponential",
                                                 "dcg"};

// The cutoff is clamped to the item count so sweeps over n and K combine.
ExposureModel MakeExposure(const std::string& kind, int num_items, int cutoff) {
  return ExposureModel::FromName(kind, num_items, std::min(cutoff, num_items));
}

// One policy entry of a sweep after alpha expansion.
struct PolicySpec {
  std::string kind;
  double alpha = 0.0;
  std::string label;
};

std::vector<PolicySpec> ExpandPolicies(const SweepConfig& config) {
  std::vector<PolicySpec> out;
  for (const std::string& p : config.policies) {
    if (p == "alpha-nsw") {
      for (double a : config.alphas) {
        out.push_back({"nsw", a, "nsw-alpha=" + FormatNumber(a, kSweepDigits)});
      }
    } else {
      out.push_back({p, 0.0, p});
    }
  }
  return out;
}

struct GridPoint {
  double lambda;
  double noise_c;
  int k;
  int n_items;
};

// Solves one policy on predicted relevance.
PolicyTensor SolvePolicy(const PolicySpec& spec, const RelevanceMatrix& rel,
                         const ExposureModel& exposure, double tol,
                         int max_iters) {
  if (spec.kind == "max") return SolveUtilityMax(rel, exposure);
  if (spec.kind == "uniform") {
    return SolveUniform(rel.num_users(), rel.num_items());
  }
  if (spec.kind == "expo-fair") return SolveExpoFair(rel, exposure).policy;
  NswConfig cfg;
  cfg.alpha = spec.alpha;
  cfg.rel_gap_tol = tol;
  cfg.max_iters = max_iters;
  return SolveNsw(rel, exposure, cfg).policy;
}

template <typename T>
std::vector<T> ListOr(const json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  auto values = doc.at(key).get<std::vector<T>>();
  if (values.empty()) {
    throw SchemaError(std::string("'") + key + "' must not be empty");
  }
  return values;
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const InfeasibleError*>(&e)) return kExitInfeasible;
  if (dynamic_cast<const ZeroMeritError*>(&e)) return kExitInfeasible;
  if (dynamic_cast<const DimensionError*>(&e)) return kExitDimension;
  if (dynamic_cast<const MatchingFailureError*>(&e)) return kExitMatching;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ParseError*>(&e)) return kExitIo;
  if (dynamic_cast<const SchemaError*>(&e)) return kExitIo;
  if (dynamic_cast<const NotDoublyStochasticError*>(&e)) return kExitIo;
  if (dynamic_cast<const InvalidArgumentError*>(&e)) return kExitUsage;
  if (dynamic_cast<const SizeError*>(&e)) return kExitUsage;
  return kExitInternal;
}

}  // namespace

SweepConfig ParseSweepConfig(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int line = 1;
    int column = 1;
    for (std::size_t p = 0; p + 1 < e.byte && p < text.size(); ++p) {
      column = text[p] == '\n' ? 1 : column + 1;
      if (text[p] == '\n') ++line;
    }
    throw ParseError(line, column, e.what());
  }
  try {
    if (!doc.is_object()) throw SchemaError("sweep config must be an object");
    SweepConfig c;
    c.policies = ListOr(doc, "policies", c.policies);
    for (const std::string& p : c.policies) {
      if (p != "max" && p != "uniform" && p != "expo-fair" && p != "nsw" &&
          p != "alpha-nsw") {
        throw SchemaError("unknown policy '" + p + "'");
      }
    }
    c.alphas = ListOr(doc, "alphas", c.alphas);
    if (doc.contains("grid")) {
      const json& grid = doc.at("grid");
      c.lambdas = ListOr(grid, "lambda", c.lambdas);
      c.noise_cs = ListOr(grid, "noise_c", c.noise_cs);
      c.cutoffs = ListOr(grid, "k", c.cutoffs);
      c.item_counts = ListOr(grid, "n_items", c.item_counts);
    }
    c.num_users = doc.value("users", c.num_users);
    c.num_seeds = doc.value("seeds", c.num_seeds);
    c.seed_base = doc.value("seed_base", c.seed_base);
    c.exposure = doc.value("exposure", c.exposure);
    if (doc.contains("nsw")) {
      const json& nsw = doc.at("nsw");
      c.nsw_tol = nsw.value("tol", c.nsw_tol);
      c.nsw_max_iters = nsw.value("max_iters", c.nsw_max_iters);
    }
    if (c.num_users < 1) throw SchemaError("users must be >= 1");
    if (c.num_seeds < 1) throw SchemaError("seeds must be >= 1");
    if (std::find(kExposureKinds.begin(), kExposureKinds.end(), c.exposure) ==
        kExposureKinds.end()) {
      throw SchemaError("unknown exposure '" + c.exposure + "'");
    }
    for (int k : c.cutoffs) {
      if (k < 1) throw SchemaError("k must be >= 1");
    }
    for (int n : c.item_counts) {
      if (n < 2) throw SchemaError("n_items must be >= 2");
    }
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed sweep config: ") + e.what());
  }
}

std::string RunSweep(const SweepConfig& config, int num_threads) {
  const std::vector<PolicySpec> policies = ExpandPolicies(config);
  std::vector<GridPoint> grid;
  for (double lambda : config.lambdas) {
    for (double noise : config.noise_cs) {
      for (int k : config.cutoffs) {
        for (int n : config.item_counts) grid.push_back({lambda, noise, k, n});
      }
    }
  }
  const std::size_t num_seeds = config.num_seeds;
  const std::size_t num_policies = policies.size();
  // One work unit per (grid point, seed): the market is generated once and
  // every policy is solved on it. Rows land in their canonical slot.
  const std::size_t units = grid.size() * num_seeds;
  std::vector<std::string> rows(grid.size() * num_policies * num_seeds);

  auto run_unit = [&](std::size_t unit) {
    const std::size_t g = unit / num_seeds;
    const std::size_t s = unit % num_seeds;
    const GridPoint& point = grid[g];
    const std::uint64_t seed = config.seed_base + s;
    std::optional<SyntheticMarket> market;
    try {
      SyntheticConfig sc;
      sc.num_users = config.num_users;
      sc.num_items = point.n_items;
      sc.lambda = point.lambda;
      sc.noise_c = point.noise_c;
      sc.seed = seed;
      market = GenerateMarket(sc);
    } catch (const Error&) {
    }
    for (std::size_t p = 0; p < num_policies; ++p) {
      SweepRow row{policies[p].label, point.lambda, point.noise_c, point.k,
                   point.n_items, seed, std::nullopt};
      if (market) {
        try {
          const ExposureModel exposure =
              MakeExposure(config.exposure, point.n_items, point.k);
          const PolicyTensor policy =
              SolvePolicy(policies[p], market->rel_pred, exposure,
                          config.nsw_tol, config.nsw_max_iters);
          row.report =
              ComputeFairnessReport(policy, market->rel_true, exposure);
        } catch (const Error&) {
          row.report.reset();
        }
      }
      rows[(g * num_policies + p) * num_seeds + s] = FormatSweepRow(row);
    }
  };

  const int threads =
      std::max(1, std::min<int>(num_threads, static_cast<int>(units)));
  if (threads == 1) {
    for (std::size_t u = 0; u < units; ++u) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t u = next++; u < units; u = next++) run_unit(u);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  std::string out = SweepCsvHeader();
  for (const std::string& row : rows) out += row;
  return out;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Fair ranking in two-sided markets"};
  app.require_subcommand(1);

  // generate
  SyntheticConfig gen;
  std::string out_true;
  std::string out_pred;
  CLI::App* generate =
      app.add_subcommand("generate", "Write a synthetic relevance market");
  generate->add_option("--users", gen.num_users)->check(CLI::PositiveNumber);
  generate->add_option("--items", gen.num_items)->check(CLI::Range(2, 1 << 20));
  generate->add_option("--lambda", gen.lambda)->check(CLI::Range(0.0, 1.0));
  generate->add_option("--noise", gen.noise_c)->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--out-true", out_true)->required();
  generate->add_option("--out-pred", out_pred)->required();

  // solve
  std::string policy_kind;
  double alpha = 0.0;
  std::string relevance_path;
  std::string exposure_kind = "inverse";
  int cutoff = 5;
  std::string link = "identity";
  double tol = 1e-6;
  int max_iters = 10000;
  std::string out_path;
  CLI::App* solve = app.add_subcommand("solve", "Compute a ranking policy");
  solve->add_option("--policy", policy_kind)
      ->required()
      ->check(CLI::IsMember({"max", "uniform", "expo-fair", "nsw"}));
  solve->add_option("--alpha", alpha)->check(CLI::NonNegativeNumber);
  solve->add_option("--relevance", relevance_path)->required();
  solve->add_option("--exposure", exposure_kind)
      ->check(CLI::IsMember(kExposureKinds));
  solve->add_option("--cutoff", cutoff)->check(CLI::PositiveNumber);
  solve->add_option("--link", link)->check(CLI::IsMember({"identity"}));
  solve->add_option("--tol", tol)->check(CLI::PositiveNumber);
  solve->add_option("--max-iters", max_iters)->check(CLI::PositiveNumber);
  solve->add_option("--out", out_path)->required();

  // evaluate
  std::string policy_path;
  std::optional<std::string> eval_exposure;
  std::optional<int> eval_cutoff;
  std::string impact_name = "relevance";
  std::string out_json;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Fairness and utility of a policy");
  evaluate->add_option("--policy", policy_path)->required();
  evaluate->add_option("--relevance", relevance_path)->required();
  evaluate->add_option("--exposure", eval_exposure)
      ->check(CLI::IsMember(kExposureKinds));
  evaluate->add_option("--cutoff", eval_cutoff)->check(CLI::PositiveNumber);
  evaluate->add_option("--impact", impact_name)
      ->check(CLI::IsMember({"relevance", "exposure"}));
  evaluate->add_option("--out-json", out_json)->required();

  // decompose
  double epsilon = kDefaultBvnEpsilon;
  CLI::App* decompose =
      app.add_subcommand("decompose", "Birkhoff-von Neumann decomposition");
  decompose->add_option("--policy", policy_path)->required();
  decompose->add_option("--epsilon", epsilon)->check(CLI::Range(1e-12, 1e-6));
  decompose->add_option("--out", out_path)->required();

  // sample
  std::string decomposition_path;
  int user = 0;
  std::uint64_t sample_seed = 0;
  CLI::App* sample =
      app.add_subcommand("sample", "Draw one ranking from a decomposition");
  sample->add_option("--decomposition", decomposition_path)->required();
  sample->add_option("--user", user)->check(CLI::NonNegativeNumber);
  sample->add_option("--seed", sample_seed);

  // sweep
  std::string config_path;
  int parallel = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a synthetic experiment grid");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", out_path)->required();
  sweep->add_option("--parallel", parallel)->check(CLI::PositiveNumber);

  std::vector<const char*> argv = {"fairrank"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      const SyntheticMarket market = GenerateMarket(gen);
      SaveRelevance(market.rel_true, out_true);
      SaveRelevance(market.rel_pred, out_pred);
      return kExitOk;
    }

    if (*solve) {
      const RelevanceMatrix rel = LoadRelevance(relevance_path);
      const int n = rel.num_items();
      const ExposureModel exposure = MakeExposure(exposure_kind, n, cutoff);
      std::optional<SolveResult> result;
      std::optional<double> doc_alpha;
      if (policy_kind == "max") {
        result = SolveResult{SolveUtilityMax(rel, exposure), {}};
      } else if (policy_kind == "uniform") {
        result = SolveResult{SolveUniform(rel.num_users(), n), {}};
      } else if (policy_kind == "expo-fair") {
        result = SolveExpoFair(rel, exposure);
      } else {
        NswConfig cfg;
        cfg.alpha = alpha;
        cfg.rel_gap_tol = tol;
        cfg.max_iters = max_iters;
        result = SolveNsw(rel, exposure, cfg);
        doc_alpha = alpha;
      }
      SolveDiagnostics& d = result->diagnostics;
      if (policy_kind == "max" || policy_kind == "uniform") {
        d.objective_value = UserUtility(result->policy, rel, exposure);
      }
      for (int item : d.excluded_items) {
        err << "warning: item " << item
            << " has zero impact everywhere and was left out\n";
      }
      const int written_cutoff = exposure.cutoff();
      SavePolicy({std::move(result->policy), policy_kind, doc_alpha,
                  std::string(KindName(exposure.kind())), written_cutoff, d},
                 out_path);
      out << "objective " << FormatNumber(d.objective_value, kMatrixDigits)
          << " iterations " << d.iterations << "\n";
      if (!d.converged) {
        err << "error: gap target not met after " << d.iterations
            << " iterations (gap "
            << FormatNumber(d.duality_gap.value_or(0.0), 6)
            << "); policy written anyway\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (*evaluate) {
      const PolicyDocument doc = LoadPolicy(policy_path);
      const RelevanceMatrix rel = LoadRelevance(relevance_path);
      if (doc.policy.num_users() != rel.num_users() ||
          doc.policy.num_items() != rel.num_items()) {
        throw DimensionError("policy is " +
                             std::to_string(doc.policy.num_users()) + "x" +
                             std::to_string(doc.policy.num_items()) +
                             " but relevance is " +
                             std::to_string(rel.num_users()) + "x" +
                             std::to_string(rel.num_items()));
      }
      const ExposureModel exposure =
          MakeExposure(eval_exposure.value_or(doc.exposure_kind),
                       rel.num_items(), eval_cutoff.value_or(doc.cutoff));
      const ImpactFunction impact = impact_name == "exposure"
                                        ? ImpactFunction::kExposureOnly
                                        : ImpactFunction::kRelevanceWeighted;
      SaveMetrics(ComputeFairnessReport(doc.policy, rel, exposure, impact),
                  out_json);
      return kExitOk;
    }

    if (*decompose) {
      const PolicyDocument doc = LoadPolicy(policy_path);
      const BvnDecomposition dec = BvnDecompose(doc.policy, epsilon);
      const PolicyTensor back = Reconstruct(dec);
      double worst = 0.0;
      const int n = doc.policy.num_items();
      for (int u = 0; u < doc.policy.num_users(); ++u) {
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(back(u, i, k) - doc.policy(u, i, k)));
          }
        }
      }
      SaveDecomposition(dec, out_path);
      out << "reconstruction error " << FormatNumber(worst, 6) << "\n";
      return kExitOk;
    }

    if (*sample) {
      const BvnDecomposition dec = LoadDecomposition(decomposition_path);
      const std::vector<int> ranking = SampleRanking(dec, user, sample_seed);
      for (std::size_t k = 0; k < ranking.size(); ++k) {
        if (k > 0) out << ' ';
        out << (k + 1) << ',' << ranking[k];
      }
      out << "\n";
      return kExitOk;
    }

    if (*sweep) {
      const SweepConfig config = ParseSweepConfig(ReadFile(config_path));
      WriteFile(out_path, RunSweep(config, parallel));
      return kExitOk;
    }
  } catch (const MatchingFailureError& e) {
    err << "error: " << e.what() << "\nhint: retry with a smaller --epsilon\n";
    return kExitMatching;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitUsage;
}

}  // namespace fairrank
