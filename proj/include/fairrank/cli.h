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

// Command-line driver: generate, solve, evaluate, decompose, sample, sweep.

#ifndef FAIRRANK_CLI_H_
#define FAIRRANK_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fairrank/io.h"

namespace fairrank {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitNotConverged = 4,
  kExitInfeasible = 5,
  kExitDimension = 6,
  kExitMatching = 7,
  kExitInternal = 1,
};

struct SweepConfig {
  // Any of "max", "uniform", "expo-fair", "nsw", "alpha-nsw". The last one
  // expands to one run per entry of `alphas`.
  std::vector<std::string> policies = {"max", "uniform", "expo-fair", "nsw"};
  std::vector<double> alphas = {0.5, 1.0, 2.0};
  std::vector<double> lambdas = {0.5};
  std::vector<double> noise_cs = {0.05};
  std::vector<int> cutoffs = {5};
  std::vector<int> item_counts = {50};
  int num_users = 100;
  int num_seeds = 10;
  std::uint64_t seed_base = 0;
  std::string exposure = "inverse";
  double nsw_tol = 1e-6;
  int nsw_max_iters = 10000;
};

// Missing keys take the defaults above. Throws ParseError or SchemaError.
SweepConfig ParseSweepConfig(std::string_view text);

// Full CSV text, header included. Rows are ordered by grid point (lambda,
// noise_c, k, n_items, outermost first), then policy, then seed, whatever
// the thread count.
std::string RunSweep(const SweepConfig& config, int num_threads);

// Entry point behind the `fairrank` binary; args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace fairrank

#endif  // FAIRRANK_CLI_H_
