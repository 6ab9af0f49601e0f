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
#include <vector>

#include "annkit/core.hpp"
#include "annkit/random.hpp"
#include "annkit/serialize.hpp"

namespace annkit::trees {

inline constexpr std::int32_t kNoChild = -1;

// k-d tree with median splits on round-robin axes. Queries are exact.
class KdTree {
 public:
  struct Node {
    std::uint32_t axis = 0;
    float split = 0.0f;
    std::int32_t left = kNoChild;
    std::int32_t right = kNoChild;
    // Leaves only: [begin, end) into ids().
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    bool leaf() const { return left == kNoChild; }
  };

  static KdTree Build(const Collection& x, std::size_t leaf_size);

  // Certified top-k under squared L2; identical to BruteForceTopK.
  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k, SearchStats* stats = nullptr) const;

  std::size_t depth() const;
  std::size_t leaf_size() const { return leaf_size_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<VectorId>& ids() const { return ids_; }

  void Save(BinaryWriter& w) const;
  static KdTree Load(BinaryReader& r);

 private:
  std::int32_t BuildNode(const Collection& x, std::uint32_t begin,
                         std::uint32_t end, std::size_t depth);

  std::vector<Node> nodes_;
  std::vector<VectorId> ids_;
  std::size_t leaf_size_ = 1;
};

/// Random-projection tree. An internal node projects onto a random unit
/// direction; the RP variant splits at a random beta-fractile with beta in
/// [1/4, 3/4], the spill variant lets both children share the points between
/// the (1/2 - alpha) and (1/2 + alpha) fractiles and routes queries by the
/// median.
class ProjectionTree {
 public:
  struct Node {
    std::vector<float> direction;  // empty for leaves
    double threshold = 0.0;
    std::int32_t left = kNoChild;
    std::int32_t right = kNoChild;
    std::vector<VectorId> ids;  // leaves only
    std::uint32_t size = 0;     // points routed into this node during build
    bool leaf() const { return left == kNoChild; }
  };

  struct Options {
    std::size_t leaf_size = 16;
    std::uint64_t seed = 0;
    // Spill overlap; nullopt builds a plain RP tree.
    std::optional<double> spill_alpha;
    // RP trees only: fixes the split fractile instead of drawing it.
    std::optional<double> fixed_beta;
  };

  static ProjectionTree Build(const Collection& x, const Options& options);
  static ProjectionTree BuildRp(const Collection& x, std::size_t leaf_size,
                                std::uint64_t seed);
  static ProjectionTree BuildSpill(const Collection& x, std::size_t leaf_size,
                                   double alpha, std::uint64_t seed);

  // Root-to-leaf descent without backtracking.
  std::span<const VectorId> Route(std::span<const float> q) const;
  TopKResult DefeatistSearch(const Collection& x, std::span<const float> q,
                             std::size_t k,
                             DistanceKind kind = DistanceKind::kL2Squared) const;

  bool is_spill() const { return spill_alpha_ >= 0.0; }
  double spill_alpha() const { return spill_alpha_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t TotalLeafIds() const;

  void Save(BinaryWriter& w) const;
  static ProjectionTree Load(BinaryReader& r);

 private:
  std::int32_t BuildNode(const Collection& x, std::vector<VectorId> ids,
                         const Options& options, Rng& rng);

  std::vector<Node> nodes_;
  double spill_alpha_ = -1.0;
};

/// T independently seeded projection trees; a query scans the union of its
/// T leaves once.
class Forest {
 public:
  static Forest Build(const Collection& x, std::size_t trees,
                      const ProjectionTree::Options& options);

  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k,
                    DistanceKind kind = DistanceKind::kL2Squared) const;
  // Distinct candidate ids reached by the query.
  std::vector<VectorId> Candidates(std::span<const float> q) const;

  const std::vector<ProjectionTree>& trees() const { return trees_; }

  void Save(BinaryWriter& w) const;
  static Forest Load(BinaryReader& r);

 private:
  std::vector<ProjectionTree> trees_;
};

// (1/s) * sum_i ||q - x_(1)|| / ||q - x_(i)|| over the s nearest points.
double PotentialPhi(const Collection& x, std::span<const float> q,
                    std::size_t s);

/// Cover tree over the Euclidean metric in its explicit representation: a
/// point appears as a node from its top level downwards and is implicitly its
/// own child on every lower level.
class CoverTree {
 public:
  enum class InsertResult { kInserted, kDuplicate };

  struct Node {
    VectorId id = 0;
    std::int32_t level = 0;  // top level of the point
    std::int32_t parent = kNoChild;
    std::vector<std::int32_t> children;  // node indices, sorted by level desc
  };

  // Repeated insertion in id order. Duplicate points are skipped.
  static CoverTree Build(const Collection& x);

  InsertResult Insert(const Collection& x, VectorId id);

  // Exact k-NN; scores are squared L2 as in BruteForceTopK.
  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k, SearchStats* stats = nullptr) const;
  // Stops descending once dist(q, Q_l) >= 2^(l+1) (1 + 1/eps).
  Neighbor SearchApprox(const Collection& x, std::span<const float> q,
                        double eps, SearchStats* stats = nullptr) const;

  // Exhaustive check of nesting, covering and separation.
  struct InvariantReport {
    std::size_t covering_violations = 0;
    std::size_t separation_violations = 0;
    std::size_t nesting_violations = 0;
    bool ok() const {
      return covering_violations == 0 && separation_violations == 0 &&
             nesting_violations == 0;
    }
  };
  InvariantReport CheckInvariants(const Collection& x) const;

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t duplicates() const { return duplicates_; }
  std::int32_t root_level() const { return nodes_.empty() ? 0 : nodes_[0].level; }
  std::int32_t min_level() const { return min_level_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  // Node indices whose level-(l-1) membership is contributed by `node` at l.
  void ChildrenAt(std::int32_t node, std::int32_t level,
                  std::vector<std::int32_t>& out) const;

  void Save(BinaryWriter& w) const;
  static CoverTree Load(BinaryReader& r);

 private:
  std::vector<Node> nodes_;
  std::int32_t min_level_ = 0;
  std::size_t duplicates_ = 0;
};

}  // namespace annkit::trees
