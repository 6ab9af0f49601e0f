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

#include <cmath>

#include "annkit/harness.hpp"
#include "annkit/random.hpp"
#include "annkit/trees.hpp"

namespace annkit::trees {
namespace {

using harness::Distribution;

Collection Data(Distribution dist, std::size_t m, std::size_t d, std::uint64_t seed) {
  return harness::Generate({dist, m, d, seed});
}

TEST(KdTree, HandConstruction) {
  const Collection x({0, 0, 1, 0, 2, 0, 3, 0}, 2);
  const auto t = KdTree::Build(x, 1);
  const auto& root = t.nodes()[0];
  ASSERT_FALSE(root.leaf());
  EXPECT_EQ(root.axis, 0u);
  EXPECT_EQ(root.split, 1.0f);
  std::size_t leaves = 0;
  for (const auto& n : t.nodes())
    if (n.leaf()) {
      EXPECT_EQ(n.end - n.begin, 1u);
      ++leaves;
    }
  EXPECT_EQ(leaves, 4u);
}

TEST(KdTree, SinglePointIsOneLeaf) {
  const auto t = KdTree::Build(Collection({1, 2}, 2), 1);
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_TRUE(t.nodes()[0].leaf());
}

TEST(KdTree, DuplicatesTerminateAndStayExact) {
  Collection x;
  for (int i = 0; i < 64; ++i) x.Append(std::vector<float>{1, 1, 1});
  x.Append(std::vector<float>{0, 0, 0});
  const auto t = KdTree::Build(x, 1);
  EXPECT_EQ(t.ids().size(), x.size());
  const std::vector<float> q = {0.9f, 1, 1};
  EXPECT_EQ(t.Search(x, q, 10), BruteForceTopK(x, q, 10, DistanceKind::kL2Squared));
}

TEST(KdTree, ExactOnUniform) {
  const auto x = Data(Distribution::kUniformCentered, 100, 4, 1);
  const auto q = Data(Distribution::kUniformCentered, 200, 4, 2);
  const auto t = KdTree::Build(x, 4);
  for (std::size_t j = 0; j < q.size(); ++j)
    for (std::size_t k : {1, 5, 100})
      EXPECT_EQ(t.Search(x, q.row(j), k), BruteForceTopK(x, q.row(j), k, DistanceKind::kL2Squared));
}

TEST(KdTree, DataPointQueryComesFirst) {
  const auto x = Data(Distribution::kGaussian, 200, 5, 3);
  const auto t = KdTree::Build(x, 8);
  SearchStats stats;
  const auto r = t.Search(x, x.row(17), 3, &stats);
  EXPECT_EQ(r.neighbors[0].id, 17u);
  EXPECT_EQ(r.neighbors[0].score, 0.0);
  EXPECT_GT(stats.evaluations, 0u);
  EXPECT_LE(stats.evaluations, x.size());
}

TEST(KdTree, SaveLoadRoundTrip) {
  const auto x = Data(Distribution::kGaussian, 150, 3, 4);
  const auto t = KdTree::Build(x, 4);
  BinaryWriter w;
  t.Save(w);
  const auto bytes = std::move(w).Release();
  BinaryReader r(bytes);
  const auto u = KdTree::Load(r);
  EXPECT_EQ(u.ids(), t.ids());
  EXPECT_EQ(u.Search(x, x.row(3), 5), t.Search(x, x.row(3), 5));
}

std::vector<std::vector<VectorId>> LeafSets(const ProjectionTree& t) {
  std::vector<std::vector<VectorId>> out;
  for (const auto& n : t.nodes())
    if (n.leaf()) out.push_back(n.ids);
  return out;
}

TEST(ProjectionTree, ZeroSpillEqualsHalfSplitRpTree) {
  const auto x = Data(Distribution::kGaussian, 300, 8, 5);
  ProjectionTree::Options spill{8, 11, 0.0, std::nullopt};
  ProjectionTree::Options rp{8, 11, std::nullopt, 0.5};
  EXPECT_EQ(LeafSets(ProjectionTree::Build(x, spill)), LeafSets(ProjectionTree::Build(x, rp)));
}

TEST(ProjectionTree, SeedReproducible) {
  const auto x = Data(Distribution::kGaussian, 300, 8, 6);
  EXPECT_EQ(LeafSets(ProjectionTree::BuildRp(x, 8, 3)), LeafSets(ProjectionTree::BuildRp(x, 8, 3)));
  EXPECT_EQ(LeafSets(ProjectionTree::BuildSpill(x, 8, 0.1, 3)),
            LeafSets(ProjectionTree::BuildSpill(x, 8, 0.1, 3)));
}

TEST(ProjectionTree, RejectsLargeSpill) {
  const auto x = Data(Distribution::kGaussian, 50, 4, 7);
  EXPECT_THROW(ProjectionTree::BuildSpill(x, 4, 0.5, 1), Error);
  EXPECT_THROW(ProjectionTree::BuildSpill(x, 4, -0.1, 1), Error);
}

TEST(ProjectionTree, SpillDuplicatesIds) {
  const auto x = Data(Distribution::kGaussian, 1024, 8, 8);
  const auto t = ProjectionTree::BuildSpill(x, 16, 0.1, 2);
  EXPECT_GE(t.TotalLeafIds(), x.size());
  EXPECT_GT(t.TotalLeafIds(), ProjectionTree::BuildRp(x, 16, 2).TotalLeafIds());
}

TEST(ProjectionTree, EveryPointInSomeLeaf) {
  const auto x = Data(Distribution::kGaussian, 500, 6, 9);
  for (const auto& t : {ProjectionTree::BuildRp(x, 10, 1), ProjectionTree::BuildSpill(x, 10, 0.2, 1)}) {
    std::vector<int> seen(x.size(), 0);
    for (const auto& leaf : LeafSets(t))
      for (auto id : leaf) seen[id] = 1;
    EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), static_cast<long>(x.size()));
  }
}

TEST(ProjectionTree, SingleLeafEqualsOracle) {
  const auto x = Data(Distribution::kGaussian, 20, 4, 10);
  const auto t = ProjectionTree::BuildRp(x, 32, 1);
  const std::vector<float> q = {0.1f, 0.2f, 0.3f, 0.4f};
  EXPECT_EQ(t.DefeatistSearch(x, q, 5), BruteForceTopK(x, q, 5, DistanceKind::kL2Squared));
}

TEST(ProjectionTree, SpillFindsDuplicatedQuery) {
  const auto x = Data(Distribution::kGaussian, 512, 16, 11);
  std::size_t found = 0;
  const std::size_t trials = 100;
  for (std::size_t s = 0; s < trials; ++s) {
    const auto t = ProjectionTree::BuildSpill(x, 16, 0.2, HashCombine(12, s));
    const auto id = static_cast<VectorId>(Rng(HashCombine(13, s)).Index(x.size()));
    found += t.DefeatistSearch(x, x.row(id), 1).neighbors[0].id == id ? 1 : 0;
  }
  EXPECT_GE(found, 95u);
}

TEST(Forest, MoreTreesNoWorseRecall) {
  const auto x = Data(Distribution::kGaussian, 2048, 32, 14);
  const auto q = Data(Distribution::kGaussian, 100, 32, 15);
  ProjectionTree::Options o;
  o.leaf_size = 32;
  o.seed = 16;
  const auto one = Forest::Build(x, 1, o);
  const auto eight = Forest::Build(x, 8, o);
  double r1 = 0.0, r8 = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto truth = BruteForceTopK(x, q.row(j), 10, DistanceKind::kL2Squared);
    r1 += Recall(truth, one.Search(x, q.row(j), 10), 10);
    r8 += Recall(truth, eight.Search(x, q.row(j), 10), 10);
  }
  EXPECT_GE(r8, r1);
  EXPECT_GT(r8, 0.0);
}

TEST(Forest, CandidatesAreUniqueUnionOfLeaves) {
  const auto x = Data(Distribution::kGaussian, 400, 8, 17);
  ProjectionTree::Options o;
  o.leaf_size = 20;
  const auto f = Forest::Build(x, 4, o);
  const auto q = x.row(5);
  std::vector<VectorId> expect;
  for (const auto& t : f.trees()) {
    const auto leaf = t.Route(q);
    expect.insert(expect.end(), leaf.begin(), leaf.end());
  }
  std::sort(expect.begin(), expect.end());
  expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
  EXPECT_EQ(f.Candidates(q), expect);
}

TEST(PotentialPhi, Examples) {
  // Distances 1 and 2 from the origin.
  const Collection x({1, 0, 0, 2}, 2);
  const std::vector<float> q = {0, 0};
  EXPECT_DOUBLE_EQ(PotentialPhi(x, q, 2), 0.75);
  const Collection ring({1, 0, 0, 1, -1, 0, 0, -1}, 2);
  EXPECT_DOUBLE_EQ(PotentialPhi(ring, q, 4), 1.0);
  EXPECT_THROW(PotentialPhi(x, q, 1), Error);
  EXPECT_THROW(PotentialPhi(x, std::vector<float>{1, 0}, 2), Error);
}

TEST(CoverTree, InvariantsOnUniform) {
  const auto x = Data(Distribution::kUniformCentered, 256, 8, 18);
  const auto t = CoverTree::Build(x);
  EXPECT_TRUE(t.CheckInvariants(x).ok());
  EXPECT_EQ(t.size(), x.size());
}

TEST(CoverTree, DuplicateSignal) {
  Collection x({0, 0, 1, 1, 0, 0}, 2);
  CoverTree t;
  EXPECT_EQ(t.Insert(x, 0), CoverTree::InsertResult::kInserted);
  EXPECT_EQ(t.Insert(x, 1), CoverTree::InsertResult::kInserted);
  EXPECT_EQ(t.Insert(x, 2), CoverTree::InsertResult::kDuplicate);
  const auto built = CoverTree::Build(x);
  EXPECT_EQ(built.duplicates(), 1u);
}

TEST(CoverTree, RootLevelOnSecondInsert) {
  const Collection x({0, 0, 3, 4}, 2);
  const auto t = CoverTree::Build(x);
  // Distance 5 needs level ceil(log2 5) = 3 to cover.
  EXPECT_EQ(t.root_level(), 3);
}

TEST(CoverTree, SingletonAndEmpty) {
  const Collection x({2, 3}, 2);
  const auto t = CoverTree::Build(x);
  const std::vector<float> q = {0, 0};
  EXPECT_EQ(t.Search(x, q, 1).neighbors[0].id, 0u);
  EXPECT_EQ(t.SearchApprox(x, q, 0.5).id, 0u);
  const CoverTree empty;
  EXPECT_THROW(empty.Search(x, q, 1), Error);
  EXPECT_THROW(empty.SearchApprox(x, q, 0.5), Error);
}

TEST(CoverTree, ExactAndApproximate) {
  const auto x = Data(Distribution::kGaussian, 500, 16, 19);
  const auto q = Data(Distribution::kGaussian, 100, 16, 20);
  const auto t = CoverTree::Build(x);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto truth = BruteForceTopK(x, q.row(j), 10, DistanceKind::kL2Squared);
    EXPECT_EQ(t.Search(x, q.row(j), 10), truth);
    const auto a = t.SearchApprox(x, q.row(j), 0.5);
    EXPECT_TRUE(EpsilonValid(std::sqrt(truth.neighbors[0].score), std::sqrt(a.score), 0.5));
  }
}

TEST(CoverTree, SaveLoadRoundTrip) {
  const auto x = Data(Distribution::kGaussian, 200, 4, 21);
  const auto t = CoverTree::Build(x);
  BinaryWriter w;
  t.Save(w);
  const auto bytes = std::move(w).Release();
  BinaryReader r(bytes);
  const auto u = CoverTree::Load(r);
  EXPECT_TRUE(u.CheckInvariants(x).ok());
  EXPECT_EQ(u.Search(x, x.row(9), 4), t.Search(x, x.row(9), 4));
}

}  // namespace
}  // namespace annkit::trees
