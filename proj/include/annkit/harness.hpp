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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "annkit/core.hpp"
#include "annkit/graph.hpp"
#include "annkit/ivf.hpp"
#include "annkit/lsh.hpp"
#include "annkit/quant.hpp"
#include "annkit/trees.hpp"

namespace annkit::harness {

// ---- Data -----------------------------------------------------------------

enum class Distribution : std::uint8_t {
  kGaussian = 0,         // N(0, 1)
  kUniformCentered = 1,  // U[-sqrt(12)/2, sqrt(12)/2]
  kUniformPositive = 2,  // U[0, sqrt(12)]
  kExponential = 3,      // rate 1
};

std::string_view ToString(Distribution d);
Distribution ParseDistribution(std::string_view name);

struct SyntheticSpec {
  Distribution distribution = Distribution::kGaussian;
  std::size_t m = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
};

// i.i.d. coordinates drawn row by row from one seeded stream.
Collection Generate(const SyntheticSpec& spec);

// .vecs: per vector a little-endian int32 d followed by d float32 values.
std::vector<std::uint8_t> EncodeVecs(const Collection& x);
Collection DecodeVecs(std::span<const std::uint8_t> bytes);
void SaveVecs(const std::string& path, const Collection& x);
Collection LoadVecs(const std::string& path);

std::vector<std::uint8_t> ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::span<const std::uint8_t> bytes);

// ---- Reports ----------------------------------------------------------------

std::string FormatNumber(double v);

class Report {
 public:
  explicit Report(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void AddRow(std::vector<std::string> row);
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  // Header row then one line per row, comma separated, '\n' terminated.
  std::string ToCsv() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// ---- Parameters -------------------------------------------------------------

using Params = std::map<std::string, std::string>;

// "a=1,b=x" -> {a: 1, b: x}. Empty input gives an empty map.
Params ParseParams(std::string_view text);
std::string ParamString(const Params& p, const std::string& key,
                        const std::string& fallback);
double ParamDouble(const Params& p, const std::string& key, double fallback);
std::size_t ParamSize(const Params& p, const std::string& key,
                      std::size_t fallback);
std::vector<std::size_t> ParseSizeList(std::string_view text);

// ---- Experiments ------------------------------------------------------------

struct CoincidenceOptions {
  Distribution distribution = Distribution::kGaussian;
  std::size_t m = 10000;
  std::vector<std::size_t> dims;
  std::size_t sample_queries = 1000;  // data points used as queries
  std::uint64_t seed = 0;
};

// One row per d: fraction of sampled points u with <u, u> >= <u, v> for all v.
Report ExperimentCoincidence(const CoincidenceOptions& options);

struct InstabilityOptions {
  Distribution distribution = Distribution::kGaussian;
  std::size_t m = 10000;
  std::vector<std::size_t> dims;
  std::size_t queries = 100;
  double eps = 0.1;
  std::uint64_t seed = 0;
};

// One row per d: mean and sd of max/min query-to-data distance, and the mean
// fraction of points within (1 + eps) of the minimum distance.
Report ExperimentInstability(const InstabilityOptions& options);

// Wedge sampling top-k recall, one row per budget in "S" (a list).
// Keys: dist, m, d, queries, k, S, kprime.
Report ExperimentWedge(const Params& params, std::uint64_t seed);

// BoundedME recall, eps-validity rate and sampled products per query.
// Keys: dist, m, d, queries, k, eps, delta.
Report ExperimentBoundedMe(const Params& params, std::uint64_t seed);

// Repeated sketch estimates for one fixed pair, one row per sketch seed.
// Keys: sketch (jl, threshold, asym), dist, d, dout, trials, hashes, mode.
Report ExperimentSketch(const Params& params, std::uint64_t seed);

// Dispatches on name: coincidence (dist, m, dims, queries), instability
// (dist, m, dims, queries, eps), wedge, boundedme or sketch.
Report RunExperiment(std::string_view name, const Params& params,
                     std::uint64_t seed);

// ---- Index registry and container -------------------------------------------

enum class Family : std::uint8_t {
  kFlat = 0,
  kKdTree = 1,
  kRpForest = 2,
  kSpillForest = 3,
  kCoverTree = 4,
  kLsh = 5,
  kApproxNn = 6,
  kMipsLsh = 7,
  kKnnGraph = 8,
  kAlphaSng = 9,
  kVamana = 10,
  kIvf = 11,
  kIvfPq = 12,
};

std::string_view ToString(Family f);
Family ParseFamily(std::string_view name);
const std::vector<Family>& AllFamilies();

inline constexpr char kContainerMagic[8] = {'A', 'N', 'N', 'K', 'I', 'T', 'I', 'X'};
inline constexpr std::uint16_t kContainerVersion = 1;

/// An index of any family bundled with the collection it was built over.
class Index {
 public:
  struct QueryOutput {
    TopKResult result;
    std::size_t evaluations = 0;
  };

  static Index Build(Family family, Collection data, const Params& params,
                     std::uint64_t seed);

  QueryOutput Query(std::span<const float> q, std::size_t k,
                    const Params& params) const;

  // magic | family u8 | version u16 | payload length u64 | payload.
  std::vector<std::uint8_t> Serialize() const;
  static Index Deserialize(std::span<const std::uint8_t> bytes);
  void Save(const std::string& path) const;
  static Index Load(const std::string& path);

  Family family() const { return family_; }
  DistanceKind kind() const { return kind_; }
  const Collection& data() const { return data_; }
  // Cluster count for the IVF families, 0 otherwise.
  std::size_t clusters() const;

 private:
  using Impl = std::variant<std::monostate, trees::KdTree, trees::Forest,
                            trees::CoverTree, lsh::LshIndex, lsh::ApproxNnIndex,
                            lsh::MipsHashIndex, graph::NeighborGraph,
                            ivf::IvfIndex, quant::IvfPqIndex>;

  Family family_ = Family::kFlat;
  DistanceKind kind_ = DistanceKind::kL2Squared;
  Collection data_;
  Impl impl_;
};

// ---- Benchmark ---------------------------------------------------------------

struct BenchmarkOptions {
  std::size_t k = 10;
  std::string sweep_key;                  // search parameter to vary
  std::vector<std::string> sweep_values;  // "5" or "10%" (of C for l)
  Params search;                          // fixed search parameters
  bool timing = false;                    // wall time makes output unstable
};

/// One row per sweep value: recall@k against the exact oracle of the index's
/// kind and mean distance evaluations per query.
Report Benchmark(const Index& index, const Collection& queries,
                 const BenchmarkOptions& options);

// ---- Self test ---------------------------------------------------------------

// Small invariant suites; rows are (check, status, detail).
Report SelfTest(std::uint64_t seed, bool* all_passed);

}  // namespace annkit::harness
