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
#include "annkit/transforms.hpp"

namespace annkit::transforms {
namespace {

Collection Random(std::size_t m, std::size_t d, std::uint64_t seed) {
  return harness::Generate({harness::Distribution::kGaussian, m, d, seed});
}

TEST(MipsToNn, AppendsSquaredNormAndHalf) {
  const auto t = MipsToNn(Collection({1, 0}, 2));
  EXPECT_EQ(t.output_dim, 3u);
  EXPECT_EQ(t.data.row(0)[2], 1.0f);
  EXPECT_EQ(t.MapQuery(std::vector<float>{0, 0}), (std::vector<float>{0, 0, -0.5f}));
}

TEST(MipsToNn, InnerProductOnPairRanksAsL2OnOriginals) {
  const auto x = Random(300, 6, 1);
  const auto q = Random(30, 6, 2);
  const auto t = MipsToNn(x);
  EXPECT_EQ(t.target_kind, DistanceKind::kNegInnerProduct);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto nn = BruteForceTopK(x, q.row(j), 5, DistanceKind::kL2Squared);
    const auto mips = BruteForceTopK(t.data, t.MapQuery(q.row(j)), 5, t.target_kind);
    EXPECT_EQ(nn.ids(), mips.ids());
  }
}

TEST(MipsToNn, TwoPointInstance) {
  const Collection x({1, 0, 2, 0}, 2);
  const std::vector<float> q = {1, 0};
  const auto t = MipsToNn(x);
  // Original MIPS picks the longer vector; L2 and MIPS-on-pair pick id 0.
  EXPECT_EQ(BruteForceTopK(x, q, 1, DistanceKind::kNegInnerProduct).neighbors[0].id, 1u);
  EXPECT_EQ(BruteForceTopK(x, q, 1, DistanceKind::kL2Squared).neighbors[0].id, 0u);
  EXPECT_EQ(BruteForceTopK(t.data, t.MapQuery(q), 1, t.target_kind).neighbors[0].id, 0u);
}

TEST(MipsToNn, ZeroQueryRanksByNorm) {
  const auto x = Random(50, 4, 3);
  const auto t = MipsToNn(x);
  const auto r = BruteForceTopK(t.data, t.MapQuery(std::vector<float>(4, 0.0f)), 50, t.target_kind);
  for (std::size_t i = 1; i < r.neighbors.size(); ++i)
    EXPECT_LE(SquaredNorm(x.row(r.neighbors[i - 1].id)), SquaredNorm(x.row(r.neighbors[i].id)));
}

TEST(MipsToMcs, HandExample) {
  const auto t = MipsToMcs(Collection({0.6f, 0.0f, 1.0f, 0.0f}, 2));
  EXPECT_DOUBLE_EQ(t.data_scale, 1.0);
  const auto u = t.data.row(0);
  EXPECT_NEAR(u[0], 0.6, 1e-7);
  EXPECT_NEAR(u[2], 0.8, 1e-7);
  EXPECT_EQ(t.data.row(1)[2], 0.0f);
  const auto q = t.MapQuery(std::vector<float>{1, 1});
  EXPECT_EQ(q, (std::vector<float>{1, 1, 0}));
  EXPECT_NEAR(Dot(q, u), 0.6, 1e-7);
}

TEST(MipsToMcs, ZeroVectorMapsToLastAxis) {
  const auto t = MipsToMcs(Collection({0, 0, 3, 4}, 2));
  EXPECT_EQ(t.data.row(0)[0], 0.0f);
  EXPECT_EQ(t.data.row(0)[2], 1.0f);
}

TEST(MipsToMcs, UnitNormAndRankPreserving) {
  const auto x = Random(300, 6, 4);
  const auto q = Random(30, 6, 5);
  const auto t = MipsToMcs(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(Norm(t.data.row(i)), 1.0, 1e-6);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto mips = BruteForceTopK(x, q.row(j), 5, DistanceKind::kNegInnerProduct);
    const auto mcs = BruteForceTopK(t.data, t.MapQuery(q.row(j)), 5, t.target_kind);
    EXPECT_EQ(mips.ids(), mcs.ids());
    // <phi_q(q), phi_d(u)> = <q, u / s>.
    const auto u = mips.neighbors[0].id;
    EXPECT_NEAR(Dot(t.MapQuery(q.row(j)), t.data.row(u)), Dot(q.row(j), x.row(u)) / t.data_scale,
                1e-5);
  }
}

TEST(AugmentedMips, PairwiseIdentity) {
  const auto x = Random(20, 8, 6);
  const AugmentedMips a(x);
  const auto dense = a.Materialize();
  EXPECT_EQ(dense.dim(), a.output_dim());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      const double expect = 2.0 - 2.0 * Dot(a.scaled().row(i), a.scaled().row(j));
      EXPECT_NEAR(a.DataDistance(i, j), expect, 1e-5);
      EXPECT_NEAR(L2Squared(dense.row(i), dense.row(j)), expect, 1e-5);
    }
}

TEST(AugmentedMips, OrthogonalUnitVectors) {
  const AugmentedMips a(Collection({1, 0, 0, 1}, 2));
  EXPECT_NEAR(a.DataDistance(0, 1), 2.0, 1e-12);
}

TEST(AugmentedMips, KnnGraphEqualsKMipsGraph) {
  const auto x = Random(20, 8, 7);
  const AugmentedMips a(x);
  const auto dense = a.Materialize();
  for (std::size_t i = 0; i < x.size(); ++i) {
    // k-NN among the other mapped points vs k-MIPS among the other originals.
    auto nn = BruteForceTopK(dense, dense.row(i), 4, DistanceKind::kL2Squared).ids();
    auto mips = BruteForceTopK(x, x.row(i), 20, DistanceKind::kNegInnerProduct).ids();
    nn.erase(std::remove(nn.begin(), nn.end(), i), nn.end());
    mips.erase(std::remove(mips.begin(), mips.end(), i), mips.end());
    nn.resize(3);
    mips.resize(3);
    EXPECT_EQ(nn, mips) << "point " << i;
  }
}

TEST(AugmentedMips, QueryMapPadsZeros) {
  const auto x = Random(5, 3, 8);
  const AugmentedMips a(x);
  const std::vector<float> q = {1, 2, 3};
  const auto mq = a.MapQuery(q);
  ASSERT_EQ(mq.size(), 8u);
  for (std::size_t i = 3; i < 8; ++i) EXPECT_EQ(mq[i], 0.0f);
  EXPECT_NEAR(a.QueryDistance(q, 2), L2Squared(mq, a.Materialize().row(2)), 1e-4);
}

}  // namespace
}  // namespace annkit::transforms
