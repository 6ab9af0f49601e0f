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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annkit {

using VectorId = std::uint32_t;

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kIo = 3,
  kFormat = 4,
  kDuplicate = 5,
  kEmpty = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Throw(ErrorCode code, const std::string& what);

#define ANNKIT_CHECK(cond, code, msg)               \
  do {                                              \
    if (!(cond)) ::annkit::Throw((code), (msg));    \
  } while (0)

// Every similarity is mapped onto a "smaller is better" score.
enum class DistanceKind : std::uint8_t {
  kL2Squared = 0,
  kAngular = 1,
  kNegInnerProduct = 2,
  kNegJaccard = 3,
};

std::string_view ToString(DistanceKind kind);
DistanceKind ParseDistanceKind(std::string_view name);

/// Sparse vector in R^dim: strictly increasing indices with non-zero values.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<float> values;
  std::uint32_t dim = 0;

  // Throws if the representation invariants do not hold.
  void Validate() const;
  static SparseVector FromDense(std::span<const float> dense);
  std::vector<float> ToDense() const;
};

/// Dense row-major collection of m vectors of dimension d; ids are 0..m-1.
class Collection {
 public:
  Collection() = default;
  Collection(std::size_t m, std::size_t d);
  Collection(std::vector<float> data, std::size_t d);

  std::size_t size() const { return d_ == 0 ? 0 : data_.size() / d_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return data_.empty(); }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * d_, d_};
  }
  std::span<float> mutable_row(std::size_t i) {
    return {data_.data() + i * d_, d_};
  }
  const std::vector<float>& data() const { return data_; }

  void Append(std::span<const float> v);
  // Finite entries only, m >= 1.
  void Validate() const;

  bool operator==(const Collection&) const = default;

 private:
  std::vector<float> data_;
  std::size_t d_ = 0;
};

struct Neighbor {
  VectorId id = 0;
  double score = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// (score, id) lexicographic order used for every ranking in the library.
inline bool NeighborLess(const Neighbor& a, const Neighbor& b) {
  return a.score < b.score || (a.score == b.score && a.id < b.id);
}

struct TopKResult {
  std::vector<Neighbor> neighbors;
  std::size_t k = 0;

  std::vector<VectorId> ids() const;
  bool operator==(const TopKResult&) const = default;
};

// Optional per-query counters filled by index searches.
struct SearchStats {
  std::size_t evaluations = 0;  // full distance computations
};

/// Bounded max-heap that keeps the k smallest neighbors under NeighborLess.
class TopKCollector {
 public:
  explicit TopKCollector(std::size_t k) : k_(k) {}

  void Push(VectorId id, double score);
  bool full() const { return heap_.size() >= k_; }
  // Score of the current k-th best, +inf when not full.
  double WorstScore() const;
  std::size_t size() const { return heap_.size(); }
  TopKResult Finish() &&;

 private:
  std::size_t k_;
  std::vector<Neighbor> heap_;
};

double Dot(std::span<const float> u, std::span<const float> v);
double SquaredNorm(std::span<const float> u);
double Norm(std::span<const float> u);
double L2Squared(std::span<const float> u, std::span<const float> v);

double Distance(DistanceKind kind, std::span<const float> u,
                std::span<const float> v);
double Distance(DistanceKind kind, const SparseVector& u,
                const SparseVector& v);

TopKResult BruteForceTopK(const Collection& x, std::span<const float> q,
                          std::size_t k, DistanceKind kind);
// Exhaustive scan restricted to a candidate id set (duplicates ignored).
TopKResult ScanCandidates(const Collection& x, std::span<const float> q,
                          std::span<const VectorId> candidates, std::size_t k,
                          DistanceKind kind);

double Recall(const TopKResult& exact, const TopKResult& approx, std::size_t k);

// candidate <= (1 + eps) * exact; scores must be non-negative distances.
bool EpsilonValid(double exact_kth_score, double candidate_score, double eps);

}  // namespace annkit
