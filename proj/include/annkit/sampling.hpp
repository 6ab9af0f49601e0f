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
#include <span>
#include <vector>

#include "annkit/core.hpp"
#include "annkit/random.hpp"

namespace annkit::sampling {

/// Walker/Vose alias table: O(n) build, O(1) draws.
class AliasTable {
 public:
  AliasTable() = default;
  // Weights must be non-negative, finite and not all zero.
  static AliasTable Build(std::span<const double> weights);

  std::size_t Sample(Rng& rng) const;
  std::size_t size() const { return cutoff_.size(); }
  double total_weight() const { return total_; }
  // Exact probability of drawing i implied by the table.
  double Probability(std::size_t i) const;

 private:
  std::vector<double> cutoff_;
  std::vector<std::uint32_t> alias_;
  double total_ = 0.0;
};

/// Per-dimension alias tables over |u_t|. A query draws a dimension t with
/// probability proportional to |q_t| sum_u |u_t|, then a point u with
/// probability proportional to |u_t|, and adds sign(q_t u_t) to u's count.
class WedgeIndex {
 public:
  static WedgeIndex Build(const Collection& x);

  // Signed counts after `samples` draws.
  std::vector<double> Counts(std::span<const float> q, std::size_t samples,
                             Rng& rng) const;
  // Normalizer N = sum_t sum_u |q_t u_t|; E[count_u] = samples <q, u> / N.
  double Normalizer(std::span<const float> q) const;

  // Rescores the top-k' points by count with exact inner products.
  // k' = 0 means max(10k, 50).
  TopKResult TopK(const Collection& x, std::span<const float> q,
                  std::size_t samples, std::size_t k, std::size_t k_prime,
                  std::uint64_t seed) const;

  std::size_t dim() const { return column_sums_.size(); }
  std::size_t size() const { return points_; }
  const std::vector<double>& column_sums() const { return column_sums_; }

 private:
  std::size_t points_ = 0;
  std::vector<double> column_sums_;
  std::vector<AliasTable> columns_;  // empty table for all-zero dimensions
  std::vector<std::int8_t> signs_;   // sign(u_t), dimension-major
};

// h(x) = min{(1 + x) / (1 + x/d), (x + x/d) / (1 + x/d)}.
double BoundedMeH(double x, std::size_t d);

// ceil(h((2 / eps^2) log(2(n - k) / (delta (floor((n - k)/2) + 1))))), capped
// at d. Requires n > k.
std::size_t BoundedMeSamples(std::size_t n, std::size_t k, double eps,
                             double delta, std::size_t d);

struct BoundedMeResult {
  TopKResult result;                 // scores are -<q, u>
  std::size_t products = 0;          // sampled coordinate products
  std::size_t rescore_products = 0;  // exact rescoring of the survivors
  std::vector<std::size_t> schedule;  // t_i per round
  std::vector<std::size_t> survivors; // |X_i| at the start of each round
  double scale = 0.0;                 // M = max |q_t u_t|
};

/// Successive halving over partial inner products on dimensions drawn
/// without replacement from one seeded permutation. Products are mapped to
/// [0, 1] by p -> (p + M) / (2M). Survivors are rescored exactly.
BoundedMeResult BoundedMeTopK(const Collection& x, std::span<const float> q,
                              std::size_t k, double eps, double delta,
                              std::uint64_t seed);

}  // namespace annkit::sampling
