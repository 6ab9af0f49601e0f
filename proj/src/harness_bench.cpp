// Copyright 2026 The annkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <chrono>
#include <cmath>

#include "annkit/harness.hpp"

namespace annkit::harness {
namespace {

// "10%" of C for the cluster probe count, otherwise the literal value.
std::string ResolveSweepValue(const Index& index, const std::string& key,
                              const std::string& value) {
  if (value.empty() || value.back() != '%') return value;
  ANNKIT_CHECK(key == "l" && index.clusters() > 0, ErrorCode::kInvalidArgument,
               "percentage sweep values apply only to l on IVF indexes");
  const double pct = ParamDouble({{"p", value.substr(0, value.size() - 1)}}, "p", 0.0);
  ANNKIT_CHECK(pct > 0.0 && pct <= 100.0, ErrorCode::kInvalidArgument,
               "percentage must be in (0, 100]");
  const auto c = static_cast<double>(index.clusters());
  const auto ell = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(pct / 100.0 * c)));
  return std::to_string(ell);
}

}  // namespace

Report Benchmark(const Index& index, const Collection& queries,
                 const BenchmarkOptions& options) {
  ANNKIT_CHECK(!queries.empty(), ErrorCode::kEmpty, "bench: no queries");
  ANNKIT_CHECK(queries.dim() == index.data().dim(), ErrorCode::kDimensionMismatch,
               "bench: query dimension does not match the index");
  ANNKIT_CHECK(options.k >= 1, ErrorCode::kInvalidArgument, "bench: k must be >= 1");

  std::vector<std::string> columns = {"family", "param", "value", "k", "recall",
                                      "evals_per_query"};
  if (options.timing) columns.push_back("wall_ms");
  Report report(columns);

  std::vector<std::vector<VectorId>> truth(queries.size());
  for (std::size_t j = 0; j < queries.size(); ++j) {
    for (const auto& nb : BruteForceTopK(index.data(), queries.row(j), options.k, index.kind()).neighbors)
      truth[j].push_back(nb.id);
    std::sort(truth[j].begin(), truth[j].end());
  }

  std::vector<std::string> values = options.sweep_values;
  if (options.sweep_key.empty()) values = {"-"};
  for (const auto& value : values) {
    Params search = options.search;
    if (!options.sweep_key.empty())
      search[options.sweep_key] = ResolveSweepValue(index, options.sweep_key, value);
    double recall = 0.0, evals = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t j = 0; j < queries.size(); ++j) {
      const auto out = index.Query(queries.row(j), options.k, search);
      std::size_t hits = 0;
      for (const auto& nb : out.result.neighbors)
        hits += std::binary_search(truth[j].begin(), truth[j].end(), nb.id) ? 1 : 0;
      recall += static_cast<double>(hits) / static_cast<double>(truth[j].size());
      evals += static_cast<double>(out.evaluations);
    }
    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const auto n = static_cast<double>(queries.size());
    std::vector<std::string> row = {
        std::string(ToString(index.family())),
        options.sweep_key.empty() ? "-" : options.sweep_key,
        value,
        std::to_string(options.k),
        FormatNumber(recall / n),
        FormatNumber(evals / n)};
    if (options.timing) row.push_back(FormatNumber(elapsed / n));
    report.AddRow(std::move(row));
  }
  return report;
}

}  // namespace annkit::harness
