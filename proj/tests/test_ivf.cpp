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
#include "annkit/ivf.hpp"

namespace annkit::ivf {
namespace {

using harness::Distribution;

Collection Data(Distribution dist, std::size_t m, std::size_t d, std::uint64_t seed) {
  return harness::Generate({dist, m, d, seed});
}

TEST(KMeans, RejectsTooManyClusters) {
  const auto x = Data(Distribution::kGaussian, 10, 2, 1);
  EXPECT_THROW(TrainKMeans(x, 11, KMeansKind::kEuclidean, 10, 1), Error);
  EXPECT_THROW(TrainKMeans(x, 0, KMeansKind::kEuclidean, 10, 1), Error);
}

TEST(KMeans, RepeatedLocationsGiveZeroObjective) {
  Collection x;
  for (int i = 0; i < 30; ++i) x.Append(std::vector<float>{float(i % 3) * 5, 1});
  const auto model = TrainKMeans(x, 3, KMeansKind::kEuclidean, 20, 2);
  EXPECT_DOUBLE_EQ(model.objective.back(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_EQ(model.assignment[i], model.assignment[i % 3]);
}

TEST(KMeans, SingleClusterIsMean) {
  const auto x = Data(Distribution::kGaussian, 50, 3, 3);
  const auto model = TrainKMeans(x, 1, KMeansKind::kEuclidean, 5, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += x.row(i)[j];
    EXPECT_NEAR(model.centroids.row(0)[j], mean / 50.0, 1e-5);
  }
}

TEST(KMeans, ObjectiveNonIncreasing) {
  const auto x = Data(Distribution::kGaussian, 1000, 8, 4);
  for (auto kind : {KMeansKind::kEuclidean, KMeansKind::kSpherical}) {
    const auto model = TrainKMeans(x, 20, kind, 30, 5);
    ASSERT_FALSE(model.objective.empty());
    for (std::size_t i = 1; i < model.objective.size(); ++i)
      EXPECT_LE(model.objective[i], model.objective[i - 1] * (1 + 1e-9) + 1e-9);
  }
}

TEST(KMeans, AssignmentIsNearestCentroid) {
  const auto x = Data(Distribution::kGaussian, 400, 4, 6);
  const auto model = TrainKMeans(x, 10, KMeansKind::kEuclidean, 50, 7);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(model.Assign(x.row(i)), model.assignment[i]);
}

TEST(KMeans, SphericalCentroidsAreUnit) {
  const auto x = Data(Distribution::kGaussian, 300, 6, 8);
  const auto model = TrainKMeans(x, 8, KMeansKind::kSpherical, 20, 9);
  for (std::size_t c = 0; c < model.clusters(); ++c)
    EXPECT_NEAR(Norm(model.centroids.row(c)), 1.0, 1e-5);
}

TEST(KMeans, SeedReproducible) {
  const auto x = Data(Distribution::kGaussian, 300, 6, 10);
  EXPECT_EQ(TrainKMeans(x, 7, KMeansKind::kEuclidean, 20, 11),
            TrainKMeans(x, 7, KMeansKind::kEuclidean, 20, 11));
}

TEST(KMeans, DefaultClusters) {
  EXPECT_EQ(DefaultClusters(10000), 100u);
  EXPECT_EQ(DefaultClusters(101), 11u);
  EXPECT_EQ(DefaultClusters(1), 1u);
}

TEST(Ivf, RouteTwoBlobs) {
  Collection x;
  for (int i = 0; i < 20; ++i) x.Append(std::vector<float>{float(i % 2) * 10, 0.01f * float(i)});
  IvfIndex::Options o;
  o.clusters = 2;
  const auto idx = IvfIndex::Build(x, o);
  const auto near_far = idx.Route(std::vector<float>{9, 0}, 2);
  ASSERT_EQ(near_far.size(), 2u);
  const auto& c = idx.model().centroids;
  EXPECT_GT(c.row(near_far[0])[0], c.row(near_far[1])[0]);
  const auto cands = idx.Candidates(std::vector<float>{9, 0}, 1);
  ASSERT_EQ(cands.size(), 10u);
  for (auto id : cands) EXPECT_EQ(id % 2, 1u);
}

TEST(Ivf, ListsPartitionData) {
  const auto x = Data(Distribution::kGaussian, 500, 8, 12);
  IvfIndex::Options o;
  const auto idx = IvfIndex::Build(x, o);
  EXPECT_EQ(idx.clusters(), DefaultClusters(500));
  std::vector<int> seen(x.size(), 0);
  for (const auto& list : idx.lists())
    for (auto id : list) ++seen[id];
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Ivf, AllClustersIsExact) {
  const auto x = Data(Distribution::kGaussian, 800, 8, 13);
  const auto q = Data(Distribution::kGaussian, 30, 8, 14);
  for (auto kind : {DistanceKind::kL2Squared, DistanceKind::kNegInnerProduct}) {
    IvfIndex::Options o;
    o.clusters = 16;
    o.kind = kind;
    o.kmeans = kind == DistanceKind::kL2Squared ? KMeansKind::kEuclidean : KMeansKind::kSpherical;
    const auto idx = IvfIndex::Build(x, o);
    for (std::size_t j = 0; j < q.size(); ++j)
      EXPECT_EQ(idx.Search(x, q.row(j), 10, 16), BruteForceTopK(x, q.row(j), 10, kind));
  }
}

TEST(Ivf, RecallGrowsWithProbes) {
  const auto x = Data(Distribution::kGaussian, 2000, 16, 15);
  const auto q = Data(Distribution::kGaussian, 50, 16, 16);
  IvfIndex::Options o;
  o.clusters = 40;
  const auto idx = IvfIndex::Build(x, o);
  double prev = -1.0;
  for (std::size_t ell : {1, 4, 16, 40}) {
    double r = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j)
      r += Recall(BruteForceTopK(x, q.row(j), 10, DistanceKind::kL2Squared),
                  idx.Search(x, q.row(j), 10, ell), 10);
    EXPECT_GE(r, prev);
    prev = r;
  }
  EXPECT_DOUBLE_EQ(prev, static_cast<double>(q.size()));
}

TEST(Ivf, SaveLoad) {
  const auto x = Data(Distribution::kGaussian, 200, 4, 17);
  IvfIndex::Options o;
  o.clusters = 5;
  const auto idx = IvfIndex::Build(x, o);
  BinaryWriter w;
  idx.Save(w);
  const auto bytes = std::move(w).Release();
  BinaryReader r(bytes);
  EXPECT_EQ(IvfIndex::Load(r), idx);
}

}  // namespace
}  // namespace annkit::ivf
