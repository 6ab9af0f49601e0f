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
#include "annkit/quant.hpp"

namespace annkit::quant {
namespace {

using harness::Distribution;

Collection Data(Distribution dist, std::size_t m, std::size_t d, std::uint64_t seed) {
  return harness::Generate({dist, m, d, seed});
}

double Sq(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (double(a[i]) - b[i]) * (double(a[i]) - b[i]);
  return s;
}

TEST(Vq, OneCodewordPerPointIsLossless) {
  const auto x = Data(Distribution::kGaussian, 20, 3, 1);
  EXPECT_NEAR(TrainVq(x, 20, 10, 1).Mse(x), 0.0, 1e-12);
}

TEST(Vq, SingleCodewordIsMean) {
  const Collection x({0, 0, 2, 4, 4, 2}, 2);
  const auto vq = TrainVq(x, 1, 10, 2);
  EXPECT_FLOAT_EQ(vq.codebook.row(0)[0], 2.0f);
  EXPECT_FLOAT_EQ(vq.codebook.row(0)[1], 2.0f);
  EXPECT_EQ(vq.Encode(std::vector<float>{100, 100}), 0u);
}

TEST(Pq, OneSubspaceEqualsVq) {
  const auto x = Data(Distribution::kGaussian, 300, 4, 3);
  const auto pq = TrainPq(x, 1, 8, 20, 4);
  const auto vq = TrainVq(x, 8, 20, 4);
  EXPECT_EQ(std::vector<float>(pq.values()), std::vector<float>(vq.codebook.data().begin(), vq.codebook.data().end()));
}

TEST(Pq, RejectsIndivisibleDimension) {
  const auto x = Data(Distribution::kGaussian, 50, 5, 5);
  EXPECT_THROW(TrainPq(x, 2, 4, 5, 1), Error);
}

TEST(Pq, HandAdcTable) {
  // d = 4, L = 2, C = 2; chunk 0 codewords (0,0),(1,1), chunk 1 (2,0),(0,2).
  const PqCodebook pq(4, 2, 2, {0, 0, 1, 1, 2, 0, 0, 2});
  const std::vector<float> q = {1, 0, 0, 0};
  const auto t = pq.BuildAdc(q);
  EXPECT_DOUBLE_EQ(t.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(t.at(1, 0), 4.0);
  EXPECT_DOUBLE_EQ(t.at(1, 1), 4.0);
  const Code code = {1, 0};
  EXPECT_DOUBLE_EQ(t.Distance(code), Sq(q, pq.Decode(code)));
  EXPECT_EQ(pq.Encode(std::vector<float>{0.9f, 1.1f, 0.1f, 1.9f}), (Code{1, 1}));
  EXPECT_DOUBLE_EQ(pq.BuildAdc(pq.Decode(code)).Distance(code), 0.0);
}

TEST(Pq, AdcEqualsDistanceToReconstruction) {
  const auto x = Data(Distribution::kGaussian, 400, 8, 6);
  const auto pq = TrainPq(x, 4, 16, 15, 7);
  const auto q = Data(Distribution::kGaussian, 5, 8, 8);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto t = pq.BuildAdc(q.row(j));
    for (std::size_t i = 0; i < 50; ++i) {
      const auto code = pq.Encode(x.row(i));
      EXPECT_NEAR(t.Distance(code), Sq(q.row(j), pq.Decode(code)), 1e-9);
    }
  }
}

TEST(Pq, PackRoundTrip) {
  EXPECT_EQ(CodeBytes(256), 1u);
  EXPECT_EQ(CodeBytes(257), 2u);
  EXPECT_EQ(CodeBytes(2), 1u);
  const Code code = {0, 300, 65535, 7};
  const auto bytes = PackCode(code, 65536);
  EXPECT_EQ(bytes.size(), 8u);
  EXPECT_EQ(UnpackCode(bytes, 4, 65536), code);
}

TEST(Opq, ZeroIterationsIsPq) {
  const auto x = Data(Distribution::kGaussian, 300, 8, 9);
  const auto opq = TrainOpq(x, 2, 8, 0, 10);
  EXPECT_EQ(opq.pq, TrainPq(x, 2, 8, 25, 10));
  EXPECT_EQ(opq.OrthogonalityError(), 0.0);
}

TEST(Opq, RotationStaysOrthogonalAndDecodeInverts) {
  const auto x = Data(Distribution::kGaussian, 500, 8, 11);
  const auto opq = TrainOpq(x, 4, 8, 5, 12);
  EXPECT_LT(opq.OrthogonalityError(), 1e-9);
  for (std::size_t i = 1; i < opq.objective.size(); ++i)
    EXPECT_LE(opq.objective[i], opq.objective[i - 1] * (1 + 1e-9));
  // R^T R u = u, so decoding the rotated code of u leaves the PQ error only.
  const auto code = opq.Encode(x.row(0));
  const auto rec = opq.Decode(code);
  const auto rot = opq.Rotate(x.row(0));
  EXPECT_NEAR(Sq(x.row(0), rec), Sq(rot, opq.pq.Decode(code)), 1e-4);
}

TEST(Aq, OneBookEqualsVq) {
  const auto x = Data(Distribution::kGaussian, 200, 4, 13);
  const auto aq = TrainAq(x, 1, 8, 1, 0, 14);
  const auto vq = TrainVq(x, 8, 25, 14);
  double aq_err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) aq_err += aq.codebook.Error(x.row(i), aq.codes[i].ids);
  EXPECT_NEAR(aq_err / 200.0, vq.Mse(x), 1e-6);
}

TEST(Aq, ReconstructionAndDistanceIdentity) {
  const AqCodebook cb(2, 2, 2, {1, 0, 0, 1, 0.5f, 0.5f, -1, 0});
  const Code ids = {1, 0};
  const auto rec = cb.Reconstruct(ids);
  EXPECT_DOUBLE_EQ(rec[0], 0.5);
  EXPECT_DOUBLE_EQ(rec[1], 1.5);
  const std::vector<float> q = {2, -1};
  AqCode code{ids, 0.5 * 0.5 + 1.5 * 1.5};
  const auto t = cb.BuildIpTable(q);
  EXPECT_NEAR(AqCodebook::Distance(5.0, t, code), (2 - 0.5) * (2 - 0.5) + (-1 - 1.5) * (-1 - 1.5), 1e-12);
  const std::vector<float> zero = {0, 0};
  EXPECT_DOUBLE_EQ(AqCodebook::Distance(0.0, cb.BuildIpTable(zero), code), code.norm_sq);
}

TEST(Aq, ErrorNonIncreasingAndBeamHelps) {
  const auto x = Data(Distribution::kGaussian, 300, 8, 15);
  const auto aq = TrainAq(x, 3, 8, 4, 4, 16);
  for (std::size_t i = 1; i < aq.error.size(); ++i) EXPECT_LE(aq.error[i], aq.error[i - 1]);
  double greedy = 0.0, wide = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    greedy += aq.codebook.Error(x.row(i), aq.codebook.Encode(x.row(i), 1).ids);
    wide += aq.codebook.Error(x.row(i), aq.codebook.Encode(x.row(i), 16).ids);
  }
  EXPECT_LE(wide, greedy + 1e-9);
}

TEST(ScoreAware, ResidualParts) {
  const std::vector<float> u = {2, 0};
  const auto collinear = ResidualDecompose(u, std::vector<float>{1, 0});
  EXPECT_DOUBLE_EQ(collinear.perpendicular[0], 0.0);
  EXPECT_DOUBLE_EQ(collinear.perpendicular[1], 0.0);
  EXPECT_DOUBLE_EQ(collinear.parallel[0], 1.0);
  const auto side = ResidualDecompose(u, std::vector<float>{2, 3});
  EXPECT_DOUBLE_EQ(side.parallel[0], 0.0);
  EXPECT_DOUBLE_EQ(side.perpendicular[1], -3.0);
  EXPECT_THROW(ResidualDecompose(std::vector<float>{0, 0}, u), Error);
}

TEST(ScoreAware, Weight) {
  EXPECT_NEAR(ScoreAwareWeight(1.0 / std::sqrt(2.0), 1.0), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(ScoreAwareWeight(0.0, 1.0), 0.0);
  EXPECT_NEAR(ScoreAwareWeight(0.5, 1.0), 1.0 / 3.0, 1e-12);
  EXPECT_THROW(ScoreAwareWeight(1.0, 1.0), Error);
  EXPECT_THROW(ScoreAwareWeight(-0.1, 1.0), Error);
}

TEST(ScoreAware, LossWithUnitWeightIsSquaredError) {
  const std::vector<float> u = {1, 2, 3}, v = {0.5f, 2.5f, 2};
  EXPECT_NEAR(ScoreAwareLoss(u, v, 1.0), Sq(u, v), 1e-9);
  const auto m = TrainScoreAwareVq(Data(Distribution::kGaussian, 200, 4, 17), 8, 0.2, 10, 18);
  for (std::size_t i = 1; i < m.objective.size(); ++i)
    EXPECT_LE(m.objective[i], m.objective[i - 1] * (1 + 1e-9));
}

TEST(IvfPq, FullProbeWithRerankIsExact) {
  const auto x = Data(Distribution::kGaussian, 600, 8, 19);
  IvfPqIndex::Options o;
  o.ivf.clusters = 8;
  o.codewords = 16;
  const auto idx = IvfPqIndex::Build(x, o);
  EXPECT_EQ(idx.codes().size(), x.size() * 4);
  const auto q = Data(Distribution::kGaussian, 10, 8, 20);
  for (std::size_t j = 0; j < q.size(); ++j)
    EXPECT_EQ(idx.Search(x, q.row(j), 5, 8, x.size()),
              BruteForceTopK(x, q.row(j), 5, DistanceKind::kL2Squared));
}

TEST(IvfPq, SaveLoad) {
  const auto x = Data(Distribution::kGaussian, 300, 4, 21);
  IvfPqIndex::Options o;
  o.ivf.clusters = 4;
  o.subspaces = 2;
  o.codewords = 8;
  const auto idx = IvfPqIndex::Build(x, o);
  BinaryWriter w;
  idx.Save(w);
  const auto bytes = std::move(w).Release();
  BinaryReader r(bytes);
  const auto back = IvfPqIndex::Load(r);
  EXPECT_EQ(back.codes(), idx.codes());
  EXPECT_EQ(back.Search(x, x.row(3), 3, 2), idx.Search(x, x.row(3), 3, 2));
}

}  // namespace
}  // namespace annkit::quant
