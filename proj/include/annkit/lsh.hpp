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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "annkit/core.hpp"
#include "annkit/serialize.hpp"
#include "annkit/transforms.hpp"

namespace annkit::lsh {

enum class FamilyKind : std::uint8_t {
  kBitSampling = 0,
  kHyperplane = 1,
  kCrossPolytope = 2,
  kPStable = 3,
};

std::string_view ToString(FamilyKind kind);
FamilyKind ParseFamilyKind(std::string_view name);

/// A seeded, indexable sequence of hash functions from one family. Function j
/// depends only on (kind, dim, seed, j, r), so any prefix is reproducible.
class HashFamily {
 public:
  HashFamily() = default;
  HashFamily(FamilyKind kind, std::size_t dim, std::size_t count,
             std::uint64_t seed, double r = 1.0);

  std::int64_t Hash(std::size_t j, std::span<const float> u) const;

  FamilyKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }
  std::uint64_t seed() const { return seed_; }
  double r() const { return r_; }
  std::size_t padded_dim() const { return padded_; }

 private:
  void Materialize();

  FamilyKind kind_ = FamilyKind::kHyperplane;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::uint64_t seed_ = 0;
  double r_ = 1.0;
  std::size_t padded_ = 0;
  // Per function: bit-sampling coordinate, or projection vector (hyperplane,
  // p-stable), or three concatenated +-1 diagonals (cross-polytope).
  std::vector<std::uint32_t> coords_;
  std::vector<float> params_;
  std::vector<double> offsets_;  // p-stable beta ~ U[0, r]
};

// Collision probability of a single hash function at the given distance.
double HyperplaneCollision(double angle);
double BitSamplingCollision(std::size_t hamming, std::size_t dim);
// Numeric quadrature of the 2-stable collision integral, 1e-6 absolute.
double PStableCollision(double distance, double r);

struct Params {
  std::size_t ell = 1;   // hashes per table
  std::size_t tables = 1;
  double rho = 0.0;
};

// rho = ln p1 / ln p2, ell = ceil(log_{1/p2} m) (>= 1), L = ceil(m^rho).
Params DeriveParams(std::size_t m, double p1, double p2);

struct PlebAnswer {
  bool yes = false;
  Neighbor witness;  // score is the metric distance, not the squared one
  std::size_t visited = 0;
};

/// L hash tables keyed by the composite g_t(u) = (h_{t,1}(u), ..., h_{t,ell}(u)),
/// folded into one 64-bit key per table. Mixer collisions only add candidates.
class LshIndex {
 public:
  LshIndex() = default;

  static LshIndex Build(const Collection& x, FamilyKind kind, std::size_t ell,
                        std::size_t tables, std::uint64_t seed, double r = 1.0,
                        DistanceKind metric = DistanceKind::kL2Squared);

  std::uint64_t Key(std::size_t table, std::span<const float> u) const;
  std::span<const VectorId> Bucket(std::size_t table, std::uint64_t key) const;
  std::span<const VectorId> Bucket(std::size_t table,
                                   std::span<const float> q) const {
    return Bucket(table, Key(table, q));
  }

  // Scans buckets g_1(q) .. g_L(q) in order, ids ascending within a bucket,
  // evaluating at most 4L distinct points. Yes iff a point within
  // (1 + eps) r is met.
  PlebAnswer Pleb(const Collection& x, std::span<const float> q, double r,
                  double eps) const;

  std::vector<VectorId> Candidates(std::span<const float> q) const;
  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k, DistanceKind kind) const;

  std::size_t ell() const { return ell_; }
  std::size_t tables() const { return tables_.size(); }
  const HashFamily& family() const { return family_; }
  DistanceKind metric() const { return metric_; }
  std::size_t TableSize(std::size_t t) const { return tables_[t].ids.size(); }
  std::size_t BucketCount(std::size_t t) const { return tables_[t].keys.size(); }

  void Save(BinaryWriter& w) const;
  static LshIndex Load(BinaryReader& r);

  bool operator==(const LshIndex& o) const;

 private:
  struct Table {
    std::vector<std::uint64_t> keys;     // sorted
    std::vector<std::uint32_t> offsets;  // keys.size() + 1
    std::vector<VectorId> ids;           // ascending within a bucket
  };

  HashFamily family_;
  std::size_t ell_ = 1;
  DistanceKind metric_ = DistanceKind::kL2Squared;
  std::vector<Table> tables_;
};

// Metric used for radii: unsquared L2, or 1 - cos for angular indexes.
double MetricDistance(DistanceKind kind, std::span<const float> q,
                      std::span<const float> u);

/// epsilon-approximate NN by binary search over a ladder of PLEB indexes with
/// radii r_j = d_min (1 + eps)^j, built from the 2-stable family.
class ApproxNnIndex {
 public:
  struct Options {
    double eps = 0.5;
    std::uint64_t seed = 0;
    std::size_t sample_pairs = 1000;
  };

  static ApproxNnIndex Build(const Collection& x, const Options& options);

  struct Answer {
    Neighbor neighbor;        // score: squared L2
    std::size_t level = 0;    // radius level that answered
    bool fallback = false;    // no level said yes
    std::size_t visited = 0;  // distance evaluations across probed levels
  };
  Answer Query(const Collection& x, std::span<const float> q) const;

  const std::vector<double>& radii() const { return radii_; }
  double min_distance() const { return min_dist_; }
  double max_distance() const { return max_dist_; }
  double aspect_ratio() const { return max_dist_ / min_dist_; }
  const Params& params() const { return params_; }
  double eps() const { return eps_; }

  void Save(BinaryWriter& w) const;
  static ApproxNnIndex Load(BinaryReader& r);

 private:
  std::vector<double> radii_;
  std::vector<LshIndex> levels_;
  Params params_;
  double eps_ = 0.5;
  double min_dist_ = 0.0;
  double max_dist_ = 0.0;
};

/// Hyperplane LSH over the MIPS-to-cosine transform; candidates are ranked by
/// the exact inner product on the original data.
class MipsHashIndex {
 public:
  static MipsHashIndex Build(const Collection& x, std::size_t ell,
                             std::size_t tables, std::uint64_t seed);

  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k) const;
  std::vector<VectorId> Candidates(std::span<const float> q) const;

  const transforms::TransformedPair& transform() const { return transform_; }
  const LshIndex& index() const { return index_; }

  void Save(BinaryWriter& w) const;
  static MipsHashIndex Load(BinaryReader& r);

 private:
  transforms::TransformedPair transform_;
  LshIndex index_;
};

}  // namespace annkit::lsh
