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

#include "annkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace annkit::sampling {

AliasTable AliasTable::Build(std::span<const double> weights) {
  ANNKIT_CHECK(!weights.empty(), ErrorCode::kInvalidArgument,
               "alias: empty weight vector");
  AliasTable t;
  for (double w : weights) {
    ANNKIT_CHECK(std::isfinite(w) && w >= 0.0, ErrorCode::kInvalidArgument,
                 "alias: weights must be finite and non-negative");
    t.total_ += w;
  }
  ANNKIT_CHECK(t.total_ > 0.0, ErrorCode::kInvalidArgument,
               "alias: weights are all zero");
  const std::size_t n = weights.size();
  t.cutoff_.resize(n);
  t.alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / t.total_;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    t.cutoff_[s] = scaled[s];
    t.alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) {
    t.cutoff_[i] = 1.0;
    t.alias_[i] = i;
  }
  for (auto i : small) {
    t.cutoff_[i] = 1.0;
    t.alias_[i] = i;
  }
  return t;
}

std::size_t AliasTable::Sample(Rng& rng) const {
  const std::size_t i = rng.Index(cutoff_.size());
  return rng.Uniform() < cutoff_[i] ? i : alias_[i];
}

double AliasTable::Probability(std::size_t i) const {
  double p = cutoff_[i];
  for (std::size_t j = 0; j < cutoff_.size(); ++j)
    if (alias_[j] == i && j != i) p += 1.0 - cutoff_[j];
  return p / static_cast<double>(cutoff_.size());
}

WedgeIndex WedgeIndex::Build(const Collection& x) {
  x.Validate();
  WedgeIndex index;
  index.points_ = x.size();
  index.column_sums_.assign(x.dim(), 0.0);
  index.columns_.resize(x.dim());
  index.signs_.resize(x.dim() * x.size());
  std::vector<double> column(x.size());
  for (std::size_t t = 0; t < x.dim(); ++t) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const float v = x.row(i)[t];
      index.signs_[t * x.size() + i] = static_cast<std::int8_t>((v > 0.0f) - (v < 0.0f));
      column[i] = std::abs(static_cast<double>(v));
      index.column_sums_[t] += column[i];
    }
    if (index.column_sums_[t] > 0.0) index.columns_[t] = AliasTable::Build(column);
  }
  return index;
}

double WedgeIndex::Normalizer(std::span<const float> q) const {
  ANNKIT_CHECK(q.size() == dim(), ErrorCode::kDimensionMismatch,
               "wedge: query dimension mismatch");
  double n = 0.0;
  for (std::size_t t = 0; t < dim(); ++t) n += std::abs(static_cast<double>(q[t])) * column_sums_[t];
  return n;
}

std::vector<double> WedgeIndex::Counts(std::span<const float> q,
                                       std::size_t samples, Rng& rng) const {
  ANNKIT_CHECK(q.size() == dim(), ErrorCode::kDimensionMismatch,
               "wedge: query dimension mismatch");
  std::vector<double> weights(dim());
  for (std::size_t t = 0; t < dim(); ++t)
    weights[t] = std::abs(static_cast<double>(q[t])) * column_sums_[t];
  bool any = false;
  for (double w : weights) any |= w > 0.0;
  ANNKIT_CHECK(any, ErrorCode::kInvalidArgument,
               "wedge: query has no mass on the indexed dimensions");
  const auto dims = AliasTable::Build(weights);
  std::vector<double> counts(points_, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t t = dims.Sample(rng);
    const std::size_t u = columns_[t].Sample(rng);
    const int q_sign = q[t] > 0.0f ? 1 : -1;
    counts[u] += q_sign * signs_[t * points_ + u];
  }
  return counts;
}

TopKResult WedgeIndex::TopK(const Collection& x, std::span<const float> q,
                            std::size_t samples, std::size_t k,
                            std::size_t k_prime, std::uint64_t seed) const {
  ANNKIT_CHECK(samples >= 1 && k >= 1, ErrorCode::kInvalidArgument,
               "wedge: require S >= 1 and k >= 1");
  if (k_prime == 0) k_prime = std::max<std::size_t>(10 * k, 50);
  ANNKIT_CHECK(k_prime >= k, ErrorCode::kInvalidArgument, "wedge: require k' >= k");
  Rng rng(seed);
  const auto counts = Counts(q, samples, rng);
  // Highest counts first: score -count, ties to the smaller id.
  TopKCollector bins(k_prime);
  for (std::size_t i = 0; i < counts.size(); ++i)
    bins.Push(static_cast<VectorId>(i), -counts[i]);
  const auto candidates = std::move(bins).Finish().ids();
  return ScanCandidates(x, q, candidates, k, DistanceKind::kNegInnerProduct);
}

double BoundedMeH(double x, std::size_t d) {
  const double dd = static_cast<double>(d);
  const double denom = 1.0 + x / dd;
  return std::min((1.0 + x) / denom, (x + x / dd) / denom);
}

std::size_t BoundedMeSamples(std::size_t n, std::size_t k, double eps,
                             double delta, std::size_t d) {
  ANNKIT_CHECK(n > k, ErrorCode::kInvalidArgument, "boundedme: require n > k");
  const double gap = static_cast<double>(n - k);
  const double half = std::floor(gap / 2.0) + 1.0;
  const double x = 2.0 / (eps * eps) * std::log(2.0 * gap / (delta * half));
  const double t = std::ceil(BoundedMeH(x, d));
  if (!(t > 0.0)) return 1;
  return std::min<std::size_t>(d, static_cast<std::size_t>(t));
}

BoundedMeResult BoundedMeTopK(const Collection& x, std::span<const float> q,
                              std::size_t k, double eps, double delta,
                              std::uint64_t seed) {
  x.Validate();
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "boundedme: query dimension mismatch");
  ANNKIT_CHECK(k >= 1, ErrorCode::kInvalidArgument, "boundedme: k must be >= 1");
  ANNKIT_CHECK(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0,
               ErrorCode::kInvalidArgument, "boundedme: eps, delta must be in (0, 1)");
  const std::size_t m = x.size(), d = x.dim();
  BoundedMeResult out;

  // Normalization pass: (p + M) / (2M) lies in [0, 1].
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < d; ++t)
      scale = std::max(scale, std::abs(static_cast<double>(q[t]) * x.row(i)[t]));
  out.scale = scale;
  const double inv = scale > 0.0 ? 1.0 / (2.0 * scale) : 0.0;
  auto normalized = [&](double p) { return scale > 0.0 ? (p + scale) * inv : 0.5; };

  Rng rng(seed);
  const auto order = rng.Permutation(d);
  std::vector<VectorId> alive(m);
  for (std::size_t i = 0; i < m; ++i) alive[i] = static_cast<VectorId>(i);
  std::vector<double> acc(m, 0.0);
  double eps_i = eps / 4.0, delta_i = delta / 2.0;
  std::size_t t_prev = 0;

  while (alive.size() > k) {
    const std::size_t n = alive.size();
    const std::size_t t_i =
        std::max(t_prev, BoundedMeSamples(n, k, eps_i, delta_i, d));
    out.schedule.push_back(t_i);
    out.survivors.push_back(n);
    for (VectorId u : alive) {
      auto row = x.row(u);
      for (std::size_t s = t_prev; s < t_i; ++s) {
        const auto t = order[s];
        acc[u] += normalized(static_cast<double>(q[t]) * row[t]);
      }
    }
    out.products += n * (t_i - t_prev);
    t_prev = t_i;

    // alpha is the ceil((n - k)/2)-th smallest accumulator; only A_u > alpha
    // survive.
    std::vector<double> scores(n);
    for (std::size_t j = 0; j < n; ++j) scores[j] = acc[alive[j]];
    const std::size_t rank = (n - k + 1) / 2;
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     scores.end());
    const double alpha = scores[rank - 1];
    std::vector<VectorId> next;
    for (VectorId u : alive)
      if (acc[u] > alpha) next.push_back(u);
    if (next.size() < k) {
      // Ties at alpha removed too many; keep the best k by (A_u, id).
      std::vector<VectorId> sorted = alive;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](VectorId a, VectorId b) { return acc[a] > acc[b]; });
      sorted.resize(k);
      std::sort(sorted.begin(), sorted.end());
      next = std::move(sorted);
    }
    alive = std::move(next);
    eps_i *= 0.75;
    delta_i /= 2.0;
  }

  out.rescore_products = alive.size() * d;
  out.result = ScanCandidates(x, q, alive, k, DistanceKind::kNegInnerProduct);
  return out;
}

}  // namespace annkit::sampling
