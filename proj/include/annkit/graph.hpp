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
#include "annkit/serialize.hpp"

namespace annkit::graph {

enum class Construction : std::uint8_t {
  kComplete = 0,
  kKnn = 1,
  kAlphaSng = 2,
  kVamana = 3,
};

struct NeighborGraph {
  std::vector<std::vector<VectorId>> adjacency;  // sorted, no self-loops
  VectorId entry = 0;
  Construction construction = Construction::kComplete;
  DistanceKind kind = DistanceKind::kL2Squared;
  double alpha = 1.0;
  std::size_t max_degree = 0;  // R for Vamana, k for k-NN, 0 if unbounded

  std::size_t size() const { return adjacency.size(); }
  std::size_t EdgeCount() const;
  std::size_t MaxOutDegree() const;
  bool HasEdge(VectorId u, VectorId v) const;

  void Save(BinaryWriter& w) const;
  static NeighborGraph Load(BinaryReader& r);

  bool operator==(const NeighborGraph&) const = default;
};

struct SearchTrace {
  std::size_t visited = 0;  // distance evaluations
  std::size_t hops = 0;     // expanded nodes
  std::vector<Neighbor> final_queue;
  // Best queue score after each expansion.
  std::vector<double> best_scores;
};

struct SearchResult {
  TopKResult result;
  SearchTrace trace;
};

// Point closest to the centroid of x, ties to the smaller id.
VectorId Medoid(const Collection& x);

NeighborGraph BuildComplete(std::size_t m);
NeighborGraph BuildKnnGraph(const Collection& x, std::size_t k,
                            DistanceKind kind = DistanceKind::kL2Squared);

/// Best-first search with a visited set. The queue holds the best `beam`
/// evaluated nodes (beam is raised to k); the closest unexpanded one is
/// expanded until every queued node has been expanded.
SearchResult GreedySearch(const NeighborGraph& g, const Collection& x,
                          std::span<const float> q, std::size_t k,
                          std::size_t beam,
                          std::optional<VectorId> entry = std::nullopt);

// Unsquared Euclidean distance used by the pruning rules.
double Delta(const Collection& x, VectorId a, VectorId b);

// Keeps the nearest remaining candidate v and drops every w with
// delta(u, w) > alpha * delta(w, v), until R are kept. R = 0 means no cap.
std::vector<VectorId> RobustPrune(const Collection& x, VectorId u,
                                  std::vector<VectorId> candidates,
                                  double alpha, std::size_t max_degree);

NeighborGraph BuildAlphaSngExact(const Collection& x, double alpha);

struct VamanaOptions {
  double alpha = 1.2;
  std::size_t max_degree = 32;  // R
  std::size_t beam = 0;         // search list size; 0 means 2R
  std::uint64_t seed = 0;
};

NeighborGraph BuildVamana(const Collection& x, const VamanaOptions& options);

struct Connectivity {
  std::size_t reachable = 0;
  std::size_t unreachable = 0;
  double reachable_fraction = 0.0;
  bool connected() const { return unreachable == 0; }
};

// Breadth-first search from the entry node.
Connectivity CheckConnectivity(const NeighborGraph& g);

// Number of non-edges (u, w) with no edge (u, v) such that
// delta(u, w) >= alpha * delta(w, v). Exhaustive, O(m^2 * degree).
std::size_t CountShortcutViolations(const NeighborGraph& g, const Collection& x,
                                    double alpha);

}  // namespace annkit::graph
