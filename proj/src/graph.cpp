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

#include "annkit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "annkit/random.hpp"

namespace annkit::graph {
namespace {

struct QueueEntry {
  Neighbor n;
  bool expanded = false;
};

void SortUnique(std::vector<VectorId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::size_t NeighborGraph::EdgeCount() const {
  std::size_t n = 0;
  for (const auto& a : adjacency) n += a.size();
  return n;
}

std::size_t NeighborGraph::MaxOutDegree() const {
  std::size_t n = 0;
  for (const auto& a : adjacency) n = std::max(n, a.size());
  return n;
}

bool NeighborGraph::HasEdge(VectorId u, VectorId v) const {
  return std::binary_search(adjacency[u].begin(), adjacency[u].end(), v);
}

void NeighborGraph::Save(BinaryWriter& w) const {
  std::vector<std::uint64_t> offsets{0};
  std::vector<VectorId> targets;
  for (const auto& a : adjacency) {
    targets.insert(targets.end(), a.begin(), a.end());
    offsets.push_back(targets.size());
  }
  w.PutVector(offsets);
  w.PutVector(targets);
  w.Put(entry);
  w.Put(static_cast<std::uint8_t>(construction));
  w.Put(static_cast<std::uint8_t>(kind));
  w.Put(alpha);
  w.Put<std::uint64_t>(max_degree);
}

NeighborGraph NeighborGraph::Load(BinaryReader& r) {
  NeighborGraph g;
  const auto offsets = r.GetVector<std::uint64_t>();
  const auto targets = r.GetVector<VectorId>();
  ANNKIT_CHECK(!offsets.empty() && offsets.back() == targets.size(),
               ErrorCode::kFormat, "graph: inconsistent adjacency");
  g.adjacency.resize(offsets.size() - 1);
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    ANNKIT_CHECK(offsets[i] <= offsets[i + 1], ErrorCode::kFormat,
                 "graph: inconsistent adjacency");
    g.adjacency[i].assign(targets.begin() + offsets[i],
                          targets.begin() + offsets[i + 1]);
  }
  g.entry = r.Get<VectorId>();
  g.construction = static_cast<Construction>(r.Get<std::uint8_t>());
  g.kind = static_cast<DistanceKind>(r.Get<std::uint8_t>());
  g.alpha = r.Get<double>();
  g.max_degree = r.Get<std::uint64_t>();
  return g;
}

VectorId Medoid(const Collection& x) {
  x.Validate();
  std::vector<double> centroid(x.dim(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto row = x.row(i);
    for (std::size_t j = 0; j < x.dim(); ++j) centroid[j] += row[j];
  }
  std::vector<float> c(x.dim());
  for (std::size_t j = 0; j < x.dim(); ++j)
    c[j] = static_cast<float>(centroid[j] / static_cast<double>(x.size()));
  return BruteForceTopK(x, c, 1, DistanceKind::kL2Squared).neighbors[0].id;
}

NeighborGraph BuildComplete(std::size_t m) {
  NeighborGraph g;
  g.adjacency.resize(m);
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = 0; v < m; ++v)
      if (u != v) g.adjacency[u].push_back(static_cast<VectorId>(v));
  g.construction = Construction::kComplete;
  return g;
}

NeighborGraph BuildKnnGraph(const Collection& x, std::size_t k,
                            DistanceKind kind) {
  x.Validate();
  ANNKIT_CHECK(k >= 1 && k < x.size(), ErrorCode::kInvalidArgument,
               "knn graph: require 1 <= k < m");
  NeighborGraph g;
  g.adjacency.resize(x.size());
  g.construction = Construction::kKnn;
  g.kind = kind;
  g.max_degree = k;
  for (std::size_t u = 0; u < x.size(); ++u) {
    auto top = BruteForceTopK(x, x.row(u), k + 1, kind);
    auto& out = g.adjacency[u];
    for (const auto& n : top.neighbors)
      if (n.id != u && out.size() < k) out.push_back(n.id);
    std::sort(out.begin(), out.end());
  }
  g.entry = Medoid(x);
  return g;
}

SearchResult GreedySearch(const NeighborGraph& g, const Collection& x,
                          std::span<const float> q, std::size_t k,
                          std::size_t beam, std::optional<VectorId> entry) {
  ANNKIT_CHECK(k >= 1, ErrorCode::kInvalidArgument, "search: k must be >= 1");
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "search: query dimension mismatch");
  ANNKIT_CHECK(g.size() == x.size() && g.size() > 0, ErrorCode::kInvalidArgument,
               "search: graph does not match collection");
  const VectorId start = entry.value_or(g.entry);
  ANNKIT_CHECK(start < g.size(), ErrorCode::kInvalidArgument,
               "search: entry id out of range");
  beam = std::max(beam, k);

  SearchResult out;
  std::vector<std::uint8_t> evaluated(g.size(), 0);
  std::vector<QueueEntry> queue;
  queue.reserve(beam + 1);
  auto evaluate = [&](VectorId v) {
    evaluated[v] = 1;
    ++out.trace.visited;
    const Neighbor n{v, Distance(g.kind, q, x.row(v))};
    if (queue.size() >= beam && !NeighborLess(n, queue.back().n)) return;
    auto it = std::lower_bound(
        queue.begin(), queue.end(), n,
        [](const QueueEntry& e, const Neighbor& b) { return NeighborLess(e.n, b); });
    queue.insert(it, QueueEntry{n, false});
    if (queue.size() > beam) queue.pop_back();
  };

  evaluate(start);
  while (true) {
    auto it = std::find_if(queue.begin(), queue.end(),
                           [](const QueueEntry& e) { return !e.expanded; });
    if (it == queue.end()) break;
    it->expanded = true;
    const VectorId u = it->n.id;
    ++out.trace.hops;
    for (VectorId v : g.adjacency[u])
      if (!evaluated[v]) evaluate(v);
    out.trace.best_scores.push_back(queue.front().n.score);
  }

  for (const auto& e : queue) out.trace.final_queue.push_back(e.n);
  out.result.k = k;
  for (std::size_t i = 0; i < std::min(k, queue.size()); ++i)
    out.result.neighbors.push_back(queue[i].n);
  return out;
}

double Delta(const Collection& x, VectorId a, VectorId b) {
  return std::sqrt(L2Squared(x.row(a), x.row(b)));
}

std::vector<VectorId> RobustPrune(const Collection& x, VectorId u,
                                  std::vector<VectorId> candidates,
                                  double alpha, std::size_t max_degree) {
  ANNKIT_CHECK(alpha >= 1.0, ErrorCode::kInvalidArgument,
               "robust prune: alpha must be >= 1");
  SortUnique(candidates);
  std::vector<Neighbor> pool;
  pool.reserve(candidates.size());
  for (VectorId c : candidates)
    if (c != u) pool.push_back({c, Delta(x, u, c)});
  std::sort(pool.begin(), pool.end(), NeighborLess);

  std::vector<VectorId> kept;
  std::vector<Neighbor> rest;
  while (!pool.empty()) {
    const Neighbor v = pool.front();
    kept.push_back(v.id);
    if (max_degree != 0 && kept.size() >= max_degree) break;
    rest.clear();
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const Neighbor& w = pool[i];
      if (w.score <= alpha * Delta(x, w.id, v.id)) rest.push_back(w);
    }
    pool.swap(rest);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

NeighborGraph BuildAlphaSngExact(const Collection& x, double alpha) {
  x.Validate();
  NeighborGraph g;
  g.adjacency.resize(x.size());
  g.construction = Construction::kAlphaSng;
  g.alpha = alpha;
  std::vector<VectorId> all(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) all[i] = static_cast<VectorId>(i);
  for (std::size_t u = 0; u < x.size(); ++u)
    g.adjacency[u] = RobustPrune(x, static_cast<VectorId>(u), all, alpha, 0);
  g.entry = Medoid(x);
  return g;
}

NeighborGraph BuildVamana(const Collection& x, const VamanaOptions& options) {
  x.Validate();
  const std::size_t m = x.size();
  const std::size_t r = options.max_degree;
  ANNKIT_CHECK(r >= 1 && r < m, ErrorCode::kInvalidArgument,
               "vamana: require 1 <= R < m");
  ANNKIT_CHECK(options.alpha >= 1.0, ErrorCode::kInvalidArgument,
               "vamana: alpha must be >= 1");
  const std::size_t beam = options.beam == 0 ? 2 * r : options.beam;

  Rng rng(options.seed);
  NeighborGraph g;
  g.construction = Construction::kVamana;
  g.alpha = options.alpha;
  g.max_degree = r;
  g.adjacency.resize(m);
  // Random R-regular start.
  for (std::size_t u = 0; u < m; ++u) {
    auto& out = g.adjacency[u];
    while (out.size() < r) {
      auto v = static_cast<VectorId>(rng.Index(m - 1));
      if (v >= u) ++v;
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
  }
  g.entry = Medoid(x);

  for (double alpha : {1.0, options.alpha}) {
    for (VectorId u : rng.Permutation(m)) {
      auto found = GreedySearch(g, x, x.row(u), 1, beam);
      std::vector<VectorId> candidates = g.adjacency[u];
      for (const auto& n : found.trace.final_queue) candidates.push_back(n.id);
      g.adjacency[u] = RobustPrune(x, u, std::move(candidates), alpha, r);
      for (VectorId v : g.adjacency[u]) {
        auto& back = g.adjacency[v];
        auto it = std::lower_bound(back.begin(), back.end(), u);
        if (it != back.end() && *it == u) continue;
        back.insert(it, u);
        if (back.size() > r) back = RobustPrune(x, v, back, alpha, r);
      }
    }
  }
  return g;
}

Connectivity CheckConnectivity(const NeighborGraph& g) {
  Connectivity c;
  if (g.size() == 0) return c;
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<VectorId> frontier{g.entry};
  seen[g.entry] = 1;
  while (!frontier.empty()) {
    const VectorId u = frontier.front();
    frontier.pop_front();
    ++c.reachable;
    for (VectorId v : g.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push_back(v);
      }
    }
  }
  c.unreachable = g.size() - c.reachable;
  c.reachable_fraction =
      static_cast<double>(c.reachable) / static_cast<double>(g.size());
  return c;
}

std::size_t CountShortcutViolations(const NeighborGraph& g, const Collection& x,
                                    double alpha) {
  std::size_t violations = 0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    const auto uid = static_cast<VectorId>(u);
    for (std::size_t w = 0; w < g.size(); ++w) {
      const auto wid = static_cast<VectorId>(w);
      if (w == u || g.HasEdge(uid, wid)) continue;
      const double duw = Delta(x, uid, wid);
      bool licensed = false;
      for (VectorId v : g.adjacency[u]) {
        if (duw >= alpha * Delta(x, wid, v)) {
          licensed = true;
          break;
        }
      }
      if (!licensed) ++violations;
    }
  }
  return violations;
}

}  // namespace annkit::graph
