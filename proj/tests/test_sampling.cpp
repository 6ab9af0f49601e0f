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
#include "annkit/sampling.hpp"

namespace annkit::sampling {
namespace {

using harness::Distribution;

Collection Data(Distribution dist, std::size_t m, std::size_t d, std::uint64_t seed) {
  return harness::Generate({dist, m, d, seed});
}

std::vector<double> Frequencies(const AliasTable& t, std::size_t draws, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> f(t.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) f[t.Sample(rng)] += 1.0;
  for (auto& v : f) v /= static_cast<double>(draws);
  return f;
}

TEST(Alias, TwoWeights) {
  const std::vector<double> w = {1, 3};
  const auto t = AliasTable::Build(w);
  EXPECT_DOUBLE_EQ(t.Probability(0), 0.25);
  EXPECT_DOUBLE_EQ(t.Probability(1), 0.75);
  EXPECT_DOUBLE_EQ(t.total_weight(), 4.0);
  const auto f = Frequencies(t, 20000, 1);
  EXPECT_NEAR(f[0], 0.25, 0.02);
  EXPECT_NEAR(f[1], 0.75, 0.02);
}

TEST(Alias, SingleAndUniform) {
  const std::vector<double> one = {5};
  EXPECT_EQ(Frequencies(AliasTable::Build(one), 100, 2)[0], 1.0);
  const std::vector<double> flat(8, 2.0);
  for (double f : Frequencies(AliasTable::Build(flat), 40000, 3)) EXPECT_NEAR(f, 0.125, 0.02);
}

TEST(Alias, ZeroWeightNeverDrawn) {
  const std::vector<double> w = {0, 1, 0, 1};
  const auto f = Frequencies(AliasTable::Build(w), 10000, 4);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[2], 0.0);
}

TEST(Alias, RejectsBadWeights) {
  const std::vector<double> zeros = {0, 0}, negative = {1, -1}, empty;
  EXPECT_THROW(AliasTable::Build(zeros), Error);
  EXPECT_THROW(AliasTable::Build(negative), Error);
  EXPECT_THROW(AliasTable::Build(empty), Error);
}

TEST(Alias, ChiSquare) {
  Rng wrng(5);
  std::vector<double> w(10);
  double total = 0.0;
  for (auto& v : w) total += v = wrng.Uniform(0.1, 2.0);
  const auto t = AliasTable::Build(w);
  const std::size_t n = 100000;
  const auto f = Frequencies(t, n, 6);
  double chi = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = n * w[i] / total;
    EXPECT_NEAR(t.Probability(i), w[i] / total, 1e-12);
    chi += (f[i] * n - e) * (f[i] * n - e) / e;
  }
  EXPECT_LT(chi, 27.88);  // 0.999 quantile, 9 degrees of freedom
}

TEST(Wedge, AxisExample) {
  const Collection x({1, 0, 0, 1}, 2);
  const auto w = WedgeIndex::Build(x);
  const std::vector<float> q = {1, 0};
  EXPECT_DOUBLE_EQ(w.Normalizer(q), 1.0);
  Rng rng(7);
  const auto c = w.Counts(q, 100, rng);
  EXPECT_DOUBLE_EQ(c[0], 100.0);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
  EXPECT_THROW(w.Counts(std::vector<float>{0, 0}, 10, rng), Error);
}

TEST(Wedge, SignedCountsAreUnbiased) {
  const Collection x({1, -2, -1, 1, 3, 0.5f}, 2);
  const auto w = WedgeIndex::Build(x);
  const std::vector<float> q = {0.5f, 1};
  const double n = w.Normalizer(q);
  EXPECT_NEAR(n, 0.5 * (1 + 1 + 3) + 1 * (2 + 1 + 0.5), 1e-6);
  Rng rng(8);
  const std::size_t s = 200000;
  const auto c = w.Counts(q, s, rng);
  for (std::size_t i = 0; i < 3; ++i) {
    const double expect = s * Dot(q, x.row(i)) / n;
    EXPECT_NEAR(c[i], expect, 4.0 * std::sqrt(double(s)));
  }
}

TEST(Wedge, FullRescoreIsExact) {
  const auto x = Data(Distribution::kGaussian, 200, 8, 9);
  const auto w = WedgeIndex::Build(x);
  const auto q = Data(Distribution::kGaussian, 5, 8, 10);
  for (std::size_t j = 0; j < q.size(); ++j)
    EXPECT_EQ(w.TopK(x, q.row(j), 10, 5, x.size(), 11),
              BruteForceTopK(x, q.row(j), 5, DistanceKind::kNegInnerProduct));
}

TEST(BoundedMe, HFunction) {
  // Independent evaluation of min{(1+x)/(1+x/d), (x+x/d)/(1+x/d)}.
  for (double x : {0.0, 0.5, 3.0, 100.0})
    for (std::size_t d : {1, 10, 1000}) {
      const double dd = double(d);
      const double a = (1 + x) * dd / (dd + x), b = x * (dd + 1) / (dd + x);
      EXPECT_NEAR(BoundedMeH(x, d), std::min(a, b), 1e-12);
      EXPECT_LE(BoundedMeH(x, d), dd + 1e-12);
    }
}

TEST(BoundedMe, ScheduleFormula) {
  const double x = 2.0 / (0.1 * 0.1) * std::log(2.0 * 90 / (0.05 * 46));
  const double dd = 1e6;
  const auto expect = std::size_t(std::ceil(std::min((1 + x) * dd / (dd + x), x * (dd + 1) / (dd + x))));
  EXPECT_EQ(BoundedMeSamples(100, 10, 0.1, 0.05, 1000000), expect);
  EXPECT_EQ(BoundedMeSamples(100, 10, 0.1, 0.05, 16), 16u);
  EXPECT_THROW(BoundedMeSamples(10, 10, 0.1, 0.05, 16), Error);
}

TEST(BoundedMe, KEqualsMReturnsAllExactly) {
  const auto x = Data(Distribution::kGaussian, 20, 4, 12);
  const auto q = Data(Distribution::kGaussian, 1, 4, 13);
  const auto r = BoundedMeTopK(x, q.row(0), 20, 0.2, 0.1, 14);
  EXPECT_TRUE(r.schedule.empty());
  EXPECT_EQ(r.result, BruteForceTopK(x, q.row(0), 20, DistanceKind::kNegInnerProduct));
}

TEST(BoundedMe, TinyDimensionIsExact) {
  // t_1 is capped at d, so every product is read and the top-1 is exact.
  const auto x = Data(Distribution::kGaussian, 300, 4, 15);
  const auto q = Data(Distribution::kGaussian, 20, 4, 16);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto r = BoundedMeTopK(x, q.row(j), 1, 0.2, 0.1, 17);
    EXPECT_EQ(r.result, BruteForceTopK(x, q.row(j), 1, DistanceKind::kNegInnerProduct));
    EXPECT_LE(r.products, x.size() * x.dim());
    for (std::size_t i = 1; i < r.schedule.size(); ++i) {
      EXPECT_GE(r.schedule[i], r.schedule[i - 1]);
      EXPECT_LT(r.survivors[i], r.survivors[i - 1]);
    }
  }
}

TEST(BoundedMe, BudgetNeverExceeded) {
  const auto x = Data(Distribution::kGaussian, 500, 256, 18);
  const auto q = Data(Distribution::kGaussian, 1, 256, 19);
  const auto r = BoundedMeTopK(x, q.row(0), 3, 0.5, 0.2, 20);
  EXPECT_LE(r.products, x.size() * x.dim());
  EXPECT_EQ(r.result.neighbors.size(), 3u);
  EXPECT_GT(r.scale, 0.0);
  EXPECT_THROW(BoundedMeTopK(x, q.row(0), 3, 0.0, 0.2, 20), Error);
}

}  // namespace
}  // namespace annkit::sampling
