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

// File formats. Relevance matrices and sweep results are CSV; policies,
// metrics and decompositions are JSON. Numbers are written with a fixed
// number of significant digits through std::to_chars, so output does not
// depend on the locale. Line endings are always LF.

#ifndef FAIRRANK_IO_H_
#define FAIRRANK_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fairrank/bvn.h"
#include "fairrank/core.h"
#include "fairrank/metrics.h"
#include "fairrank/solvers.h"

namespace fairrank {

inline constexpr int kMatrixDigits = 12;
inline constexpr int kSweepDigits = 10;

// Shortest "%g"-style rendering with at most `digits` significant digits.
std::string FormatNumber(double value, int digits);

// "# m=<M> n=<N>" then M lines of N comma-separated numbers.
std::string SerializeRelevanceCsv(const RelevanceMatrix& rel);
// Throws ParseError (with line and column) or DimensionError when the body
// disagrees with the header.
RelevanceMatrix ParseRelevanceCsv(std::string_view text);
void SaveRelevance(const RelevanceMatrix& rel, const std::string& path);
RelevanceMatrix LoadRelevance(const std::string& path);

struct PolicyDocument {
  PolicyTensor policy;
  std::string policy_type;
  std::optional<double> alpha;
  std::string exposure_kind;
  int cutoff = 0;
  SolveDiagnostics diagnostics;
};

// Schema "policy/v1". Serialization checks double stochasticity first and
// throws NotDoublyStochasticError; parsing throws SchemaError on a wrong
// schema tag or shape and NotDoublyStochasticError on invalid matrices.
std::string SerializePolicyJson(const PolicyDocument& doc);
PolicyDocument ParsePolicyJson(std::string_view text);
void SavePolicy(const PolicyDocument& doc, const std::string& path);
PolicyDocument LoadPolicy(const std::string& path);

// Schema "metrics/v1".
std::string SerializeMetricsJson(const FairnessReport& report);
FairnessReport ParseMetricsJson(std::string_view text);
void SaveMetrics(const FairnessReport& report, const std::string& path);
FairnessReport LoadMetrics(const std::string& path);

// Schema "decomposition/v1".
std::string SerializeDecompositionJson(const BvnDecomposition& dec);
BvnDecomposition ParseDecompositionJson(std::string_view text);
void SaveDecomposition(const BvnDecomposition& dec, const std::string& path);
BvnDecomposition LoadDecomposition(const std::string& path);

struct SweepRow {
  std::string policy;
  double lambda = 0.0;
  double noise_c = 0.0;
  int k = 0;
  int n_items = 0;
  std::uint64_t seed = 0;
  // Unset when the run failed; the metric columns then read "error".
  std::optional<FairnessReport> report;
};

std::string SweepCsvHeader();
std::string FormatSweepRow(const SweepRow& row);
// Writes the header first if the file is missing or empty.
void AppendSweepRow(const SweepRow& row, const std::string& path);

std::string ReadFile(const std::string& path);
// Throws IoError.
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace fairrank

#endif  // FAIRRANK_IO_H_
