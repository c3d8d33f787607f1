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

#include "fairrank/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "fairrank/errors.h"
#include <nlohmann/json.hpp>

namespace fairrank {
namespace {

using nlohmann::json;

constexpr std::string_view kPolicySchema = "policy/v1";
constexpr std::string_view kMetricsSchema = "metrics/v1";
constexpr std::string_view kDecompositionSchema = "decomposition/v1";

// Rounds to `digits` significant digits by a trip through text, so the JSON
// writer prints the short form.
double Rounded(double value) {
  const std::string text = FormatNumber(value, kMatrixDigits);
  double parsed = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), parsed);
  return parsed;
}

json RoundedOrNull(const std::optional<double>& value) {
  return value ? json(Rounded(*value)) : json(nullptr);
}

std::optional<double> OptionalNumber(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int line = 1;
    int column = 1;
    for (std::size_t p = 0; p + 1 < e.byte && p < text.size(); ++p) {
      if (text[p] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(line, column, e.what());
  }
}

void CheckSchema(const json& doc, std::string_view expected) {
  if (!doc.is_object() || !doc.contains("schema") ||
      !doc["schema"].is_string() ||
      doc["schema"].get<std::string>() != expected) {
    throw SchemaError("expected schema \"" + std::string(expected) + "\"");
  }
}

// Runs a body that reads JSON fields, translating type and key errors.
template <typename F>
auto WithSchemaErrors(F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string FormatNumber(double value, int digits) {
  if (value == 0.0) return "0";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, digits);
  return std::string(buffer, result.ptr);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream contents;
  contents << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return contents.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string SerializeRelevanceCsv(const RelevanceMatrix& rel) {
  std::string out = "# m=" + std::to_string(rel.num_users()) +
                    " n=" + std::to_string(rel.num_items()) + "\n";
  for (int u = 0; u < rel.num_users(); ++u) {
    for (int i = 0; i < rel.num_items(); ++i) {
      if (i > 0) out += ',';
      out += FormatNumber(rel(u, i), kMatrixDigits);
    }
    out += '\n';
  }
  return out;
}

RelevanceMatrix ParseRelevanceCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (lines.empty()) throw ParseError(1, 1, "empty relevance file");

  int m = 0;
  int n = 0;
  {
    const std::string_view header = lines[0];
    constexpr std::string_view kPrefix = "# m=";
    if (header.substr(0, kPrefix.size()) != kPrefix) {
      throw ParseError(1, 1, "expected header '# m=<M> n=<N>'");
    }
    const char* p = header.data() + kPrefix.size();
    const char* end = header.data() + header.size();
    auto r = std::from_chars(p, end, m);
    if (r.ec != std::errc() || m < 1) {
      throw ParseError(1, static_cast<int>(p - header.data()) + 1,
                       "bad user count");
    }
    p = r.ptr;
    constexpr std::string_view kMid = " n=";
    if (std::string_view(p, end - p).substr(0, kMid.size()) != kMid) {
      throw ParseError(1, static_cast<int>(p - header.data()) + 1,
                       "expected ' n='");
    }
    p += kMid.size();
    r = std::from_chars(p, end, n);
    if (r.ec != std::errc() || n < 2) {
      throw ParseError(1, static_cast<int>(p - header.data()) + 1,
                       "bad item count");
    }
    if (r.ptr != end) {
      throw ParseError(1, static_cast<int>(r.ptr - header.data()) + 1,
                       "trailing characters in header");
    }
  }

  const int body_lines = static_cast<int>(lines.size()) - 1;
  if (body_lines != m) {
    throw DimensionError("header declares " + std::to_string(m) +
                         " rows but the body has " +
                         std::to_string(body_lines));
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m) * n);
  for (int u = 0; u < m; ++u) {
    const std::string_view line = lines[u + 1];
    const int line_no = u + 2;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    int fields = 0;
    while (true) {
      double v = 0.0;
      const auto r = std::from_chars(p, end, v);
      if (r.ec != std::errc()) {
        throw ParseError(line_no, static_cast<int>(p - line.data()) + 1,
                         "expected a number");
      }
      values.push_back(v);
      ++fields;
      p = r.ptr;
      if (p == end) break;
      if (*p != ',') {
        throw ParseError(line_no, static_cast<int>(p - line.data()) + 1,
                         "expected ',' between values");
      }
      ++p;
    }
    if (fields != n) {
      throw DimensionError("row " + std::to_string(u + 1) + " has " +
                           std::to_string(fields) + " values, header says " +
                           std::to_string(n));
    }
  }
  try {
    return RelevanceMatrix(m, n, std::move(values));
  } catch (const InvalidArgumentError& e) {
    throw ParseError(2, 1, e.what());
  }
}

void SaveRelevance(const RelevanceMatrix& rel, const std::string& path) {
  WriteFile(path, SerializeRelevanceCsv(rel));
}

RelevanceMatrix LoadRelevance(const std::string& path) {
  return ParseRelevanceCsv(ReadFile(path));
}

std::string SerializePolicyJson(const PolicyDocument& doc) {
  const PolicyTensor& policy = doc.policy;
  policy.CheckDoublyStochastic();
  const int n = policy.num_items();
  json matrices = json::array();
  for (int u = 0; u < policy.num_users(); ++u) {
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
      json row = json::array();
      for (int k = 0; k < n; ++k) row.push_back(Rounded(policy(u, i, k)));
      rows.push_back(std::move(row));
    }
    matrices.push_back(std::move(rows));
  }
  const SolveDiagnostics& d = doc.diagnostics;
  json out = {
      {"schema", kPolicySchema},
      {"m", policy.num_users()},
      {"n", n},
      {"policy_type", doc.policy_type},
      {"alpha", RoundedOrNull(doc.alpha)},
      {"exposure", {{"kind", doc.exposure_kind}, {"cutoff", doc.cutoff}}},
      {"matrices", std::move(matrices)},
      {"diagnostics",
       {{"objective", Rounded(d.objective_value)},
        {"duality_gap", RoundedOrNull(d.duality_gap)},
        {"iterations", d.iterations},
        {"constraint_residual", RoundedOrNull(d.constraint_residual)}}},
  };
  return out.dump(2) + "\n";
}

PolicyDocument ParsePolicyJson(std::string_view text) {
  const json doc = ParseJson(text);
  CheckSchema(doc, kPolicySchema);
  return WithSchemaErrors([&] {
    const int m = doc.at("m").get<int>();
    const int n = doc.at("n").get<int>();
    if (m < 1 || n < 1) throw SchemaError("m and n must be positive");
    const json& matrices = doc.at("matrices");
    if (!matrices.is_array() || static_cast<int>(matrices.size()) != m) {
      throw SchemaError("matrices must hold m entries");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m) * n * n);
    for (const json& user : matrices) {
      if (!user.is_array() || static_cast<int>(user.size()) != n) {
        throw SchemaError("each matrix must have n rows");
      }
      for (const json& row : user) {
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
          throw SchemaError("each matrix row must have n entries");
        }
        for (const json& v : row) values.push_back(v.get<double>());
      }
    }
    PolicyTensor policy(m, n, std::move(values));
    policy.CheckDoublyStochastic();
    const json& diag = doc.at("diagnostics");
    SolveDiagnostics d;
    d.objective_value = diag.at("objective").get<double>();
    d.duality_gap = OptionalNumber(diag.at("duality_gap"));
    d.iterations = diag.at("iterations").get<int>();
    d.constraint_residual = OptionalNumber(diag.at("constraint_residual"));
    const json& exposure = doc.at("exposure");
    return PolicyDocument{std::move(policy),
                          doc.at("policy_type").get<std::string>(),
                          OptionalNumber(doc.at("alpha")),
                          exposure.at("kind").get<std::string>(),
                          exposure.at("cutoff").get<int>(),
                          std::move(d)};
  });
}

void SavePolicy(const PolicyDocument& doc, const std::string& path) {
  WriteFile(path, SerializePolicyJson(doc));
}

PolicyDocument LoadPolicy(const std::string& path) {
  return ParsePolicyJson(ReadFile(path));
}

std::string SerializeMetricsJson(const FairnessReport& report) {
  json impact = json::array();
  for (double v : report.per_item_impact) impact.push_back(Rounded(v));
  json ratio = json::array();
  for (const auto& v : report.per_item_impact_ratio_vs_uniform) {
    ratio.push_back(RoundedOrNull(v));
  }
  json out = {
      {"schema", kMetricsSchema},
      {"user_utility", Rounded(report.user_utility)},
      {"mean_max_envy", Rounded(report.mean_max_envy)},
      {"pct_improved_10", Rounded(report.pct_improved_10)},
      {"pct_decreased_10", Rounded(report.pct_decreased_10)},
      {"per_item_impact", std::move(impact)},
      {"per_item_ratio_vs_uniform", std::move(ratio)},
      {"excluded_items", report.excluded_items},
  };
  return out.dump(2) + "\n";
}

FairnessReport ParseMetricsJson(std::string_view text) {
  const json doc = ParseJson(text);
  CheckSchema(doc, kMetricsSchema);
  return WithSchemaErrors([&] {
    FairnessReport report;
    report.user_utility = doc.at("user_utility").get<double>();
    report.mean_max_envy = doc.at("mean_max_envy").get<double>();
    report.pct_improved_10 = doc.at("pct_improved_10").get<double>();
    report.pct_decreased_10 = doc.at("pct_decreased_10").get<double>();
    report.per_item_impact =
        doc.at("per_item_impact").get<std::vector<double>>();
    for (const json& v : doc.at("per_item_ratio_vs_uniform")) {
      report.per_item_impact_ratio_vs_uniform.push_back(OptionalNumber(v));
    }
    report.excluded_items = doc.at("excluded_items").get<std::vector<int>>();
    if (report.per_item_impact.size() !=
        report.per_item_impact_ratio_vs_uniform.size()) {
      throw SchemaError("per-item arrays differ in length");
    }
    return report;
  });
}

void SaveMetrics(const FairnessReport& report, const std::string& path) {
  WriteFile(path, SerializeMetricsJson(report));
}

FairnessReport LoadMetrics(const std::string& path) {
  return ParseMetricsJson(ReadFile(path));
}

std::string SerializeDecompositionJson(const BvnDecomposition& dec) {
  json users = json::array();
  for (const auto& terms : dec.users) {
    json list = json::array();
    for (const auto& t : terms) {
      list.push_back({{"weight", t.weight}, {"ranking", t.items_by_rank}});
    }
    users.push_back(std::move(list));
  }
  json out = {
      {"schema", kDecompositionSchema},
      {"m", dec.num_users()},
      {"n", dec.num_items},
      {"epsilon", dec.epsilon},
      {"users", std::move(users)},
  };
  return out.dump(2) + "\n";
}

BvnDecomposition ParseDecompositionJson(std::string_view text) {
  const json doc = ParseJson(text);
  CheckSchema(doc, kDecompositionSchema);
  return WithSchemaErrors([&] {
    BvnDecomposition dec;
    dec.num_items = doc.at("n").get<int>();
    dec.epsilon = doc.at("epsilon").get<double>();
    const int m = doc.at("m").get<int>();
    const json& users = doc.at("users");
    if (!users.is_array() || static_cast<int>(users.size()) != m) {
      throw SchemaError("users must hold m entries");
    }
    for (const json& list : users) {
      std::vector<RankingTerm> terms;
      for (const json& t : list) {
        RankingTerm term{t.at("weight").get<double>(),
                         t.at("ranking").get<std::vector<int>>()};
        std::vector<bool> seen(dec.num_items, false);
        if (static_cast<int>(term.items_by_rank.size()) != dec.num_items) {
          throw SchemaError("ranking length must be n");
        }
        for (int item : term.items_by_rank) {
          if (item < 0 || item >= dec.num_items || seen[item]) {
            throw SchemaError("ranking is not a permutation");
          }
          seen[item] = true;
        }
        terms.push_back(std::move(term));
      }
      dec.users.push_back(std::move(terms));
    }
    return dec;
  });
}

void SaveDecomposition(const BvnDecomposition& dec, const std::string& path) {
  WriteFile(path, SerializeDecompositionJson(dec));
}

BvnDecomposition LoadDecomposition(const std::string& path) {
  return ParseDecompositionJson(ReadFile(path));
}

std::string SweepCsvHeader() {
  return "policy,lambda,noise_c,k,n_items,seed,user_utility,mean_max_envy,"
         "pct_improved_10,pct_decreased_10\n";
}

std::string FormatSweepRow(const SweepRow& row) {
  std::string out = row.policy + "," + FormatNumber(row.lambda, kSweepDigits) +
                    "," + FormatNumber(row.noise_c, kSweepDigits) + "," +
                    std::to_string(row.k) + "," + std::to_string(row.n_items) +
                    "," + std::to_string(row.seed) + ",";
  if (row.report) {
    const FairnessReport& r = *row.report;
    out += FormatNumber(r.user_utility, kSweepDigits) + "," +
           FormatNumber(r.mean_max_envy, kSweepDigits) + "," +
           FormatNumber(r.pct_improved_10, kSweepDigits) + "," +
           FormatNumber(r.pct_decreased_10, kSweepDigits);
  } else {
    out += "error,error,error,error";
  }
  return out + "\n";
}

void AppendSweepRow(const SweepRow& row, const std::string& path) {
  bool need_header = true;
  {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (in && in.tellg() > 0) need_header = false;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open '" + path + "' for appending");
  if (need_header) out << SweepCsvHeader();
  out << FormatSweepRow(row);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace fairrank
