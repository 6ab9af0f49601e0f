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

#include <gtest/gtest.h>

#include "annkit/graph.hpp"
#include "annkit/harness.hpp"

namespace annkit::graph {
namespace {

using harness::Distribution;

Collection Data(Distribution dist, std::size_t m, std::size_t d, std::uint64_t seed) {
  return harness::Generate({dist, m, d, seed});
}

TEST(KnnGraph, CollinearExample) {
  const Collection x({0, 1, 3}, 1);
  const auto g = BuildKnnGraph(x, 1);
  EXPECT_EQ(g.adjacency[0], std::vector<VectorId>{1});
  EXPECT_EQ(g.adjacency[1], std::vector<VectorId>{0});
  EXPECT_EQ(g.adjacency[2], std::vector<VectorId>{1});
  EXPECT_THROW(BuildKnnGraph(x, 3), Error);
  EXPECT_THROW(BuildKnnGraph(x, 0), Error);
}

TEST(KnnGraph, FullDegreeIsComplete) {
  const auto x = Data(Distribution::kGaussian, 12, 3, 1);
  const auto g = BuildKnnGraph(x, 11);
  EXPECT_EQ(g.EdgeCount(), 12u * 11u);
  EXPECT_EQ(g.adjacency, BuildComplete(12).adjacency);
}

TEST(GreedySearch, CompleteGraphIsExact) {
  const auto x = Data(Distribution::kGaussian, 60, 4, 2);
  const auto q = Data(Distribution::kGaussian, 20, 4, 3);
  const auto g = BuildComplete(x.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto r = GreedySearch(g, x, q.row(j), 5, 5);
    EXPECT_EQ(r.result, BruteForceTopK(x, q.row(j), 5, DistanceKind::kL2Squared));
    EXPECT_EQ(r.trace.visited, x.size());
  }
}

TEST(GreedySearch, BestScoreNeverWorsens) {
  const auto x = Data(Distribution::kGaussian, 500, 8, 4);
  const auto g = BuildKnnGraph(x, 8);
  const auto r = GreedySearch(g, x, Data(Distribution::kGaussian, 1, 8, 5).row(0), 3, 16);
  for (std::size_t i = 1; i < r.trace.best_scores.size(); ++i)
    EXPECT_LE(r.trace.best_scores[i], r.trace.best_scores[i - 1]);
}

TEST(Medoid, NearestToCentroid) {
  EXPECT_EQ(Medoid(Collection({0, 0, 1, 0, 10, 0}, 2)), 1u);
  EXPECT_EQ(Medoid(Collection({-1, 1}, 1)), 0u);
}

TEST(RobustPrune, HandCases) {
  // u at the origin; candidates (1,0), (2,0), (0,1).
  const Collection x({0, 0, 1, 0, 2, 0, 0, 1}, 2);
  EXPECT_EQ(RobustPrune(x, 0, {1, 2, 3}, 1.0, 0), (std::vector<VectorId>{1, 3}));
  EXPECT_EQ(RobustPrune(x, 0, {1, 2, 3}, 3.0, 0), (std::vector<VectorId>{1, 2, 3}));
  EXPECT_EQ(RobustPrune(x, 0, {1, 2, 3}, 3.0, 1), (std::vector<VectorId>{1}));
  EXPECT_EQ(RobustPrune(x, 0, {2}, 1.0, 0), (std::vector<VectorId>{2}));
  EXPECT_EQ(RobustPrune(x, 0, {0, 2, 2}, 1.0, 0), (std::vector<VectorId>{2}));
  EXPECT_THROW(RobustPrune(x, 0, {1}, 0.5, 0), Error);
}

TEST(AlphaSng, TwoPointsMutual) {
  const auto g = BuildAlphaSngExact(Collection({0, 5}, 1), 1.0);
  EXPECT_TRUE(g.HasEdge(0, 1));
  EXPECT_TRUE(g.HasEdge(1, 0));
}

TEST(AlphaSng, EdgesGrowWithAlpha) {
  const auto x = Data(Distribution::kGaussian, 150, 4, 6);
  std::size_t prev = 0;
  for (double a : {1.0, 1.2, 1.5, 2.0}) {
    const auto g = BuildAlphaSngExact(x, a);
    EXPECT_GE(g.EdgeCount(), prev);
    prev = g.EdgeCount();
    EXPECT_EQ(CountShortcutViolations(g, x, a), 0u);
  }
}

TEST(AlphaSng, ConnectedAndFindsDataPoints) {
  const auto x = Data(Distribution::kGaussian, 200, 4, 7);
  const auto g = BuildAlphaSngExact(x, 1.0);
  EXPECT_TRUE(CheckConnectivity(g).connected());
  for (VectorId i = 0; i < x.size(); i += 17)
    EXPECT_EQ(GreedySearch(g, x, x.row(i), 1, 1).result.neighbors[0].id, i);
}

TEST(Vamana, DegreeConnectivityAndReproducibility) {
  const auto x = Data(Distribution::kGaussian, 2000, 32, 8);
  VamanaOptions o;
  o.seed = 9;
  const auto g = BuildVamana(x, o);
  EXPECT_LE(g.MaxOutDegree(), 32u);
  // A handful of points end with no in-edges after the second pass, so full
  // reachability is not guaranteed.
  const auto c = CheckConnectivity(g);
  RecordProperty("reachable_fraction", std::to_string(c.reachable_fraction));
  EXPECT_GE(c.reachable_fraction, 0.99);
  EXPECT_EQ(g, BuildVamana(x, o));
  o.max_degree = 2000;
  EXPECT_THROW(BuildVamana(x, o), Error);
}

TEST(Connectivity, TwoCliques) {
  NeighborGraph g;
  g.adjacency = {{1, 2}, {0, 2}, {0, 1}, {4}, {3}};
  const auto c = CheckConnectivity(g);
  EXPECT_EQ(c.reachable, 3u);
  EXPECT_EQ(c.unreachable, 2u);
  EXPECT_DOUBLE_EQ(c.reachable_fraction, 0.6);
  EXPECT_FALSE(c.connected());
}

TEST(NeighborGraph, SaveLoad) {
  const auto x = Data(Distribution::kGaussian, 100, 4, 10);
  const auto g = BuildKnnGraph(x, 5);
  BinaryWriter w;
  g.Save(w);
  const auto bytes = std::move(w).Release();
  BinaryReader r(bytes);
  EXPECT_EQ(NeighborGraph::Load(r), g);
}

}  // namespace
}  // namespace annkit::graph
