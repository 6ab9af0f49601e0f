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

#include <span>
#include <vector>

#include "annkit/core.hpp"

namespace annkit::transforms {

// Rank-preserving maps between the inner-product and metric problems. Data
// and queries go into a common (d+1)-dimensional space where `target_kind`
// ranks points exactly as the source problem does on the originals.
enum class TransformKind { kMipsToNn, kMipsToMcs };

struct TransformedPair {
  TransformKind kind = TransformKind::kMipsToNn;
  DistanceKind target_kind = DistanceKind::kL2Squared;
  std::size_t output_dim = 0;
  // Data are divided by this before mapping (1 for kMipsToNn). Keeping it
  // lets estimates in the transformed space be mapped back.
  double data_scale = 1.0;
  Collection data;

  std::vector<float> MapData(std::span<const float> u) const;
  std::vector<float> MapQuery(std::span<const float> q) const;
};

// u' = [u, ||u||^2], q' = [q, -1/2]. <q', u'> = <q, u> - ||u||^2 / 2, so
// inner-product search on the pair ranks as squared L2 on the originals;
// target_kind is kNegInnerProduct.
TransformedPair MipsToNn(const Collection& x);

// u' = [u/s, sqrt(1 - ||u/s||^2)] with s = max ||u||, q' = [q, 0]. Angular
// distance on the pair ranks as -<q, u> on the originals.
TransformedPair MipsToMcs(const Collection& x);

/// Data point i becomes [u_i/s, 0, ..., sqrt(1 - ||u_i/s||^2), ..., 0] where
/// the non-zero tail entry sits at position d+i. Only the tail value is
/// stored; pairwise squared distances between mapped points equal
/// 2 - 2<u_i/s, u_j/s>, and queries are padded with m zeros.
class AugmentedMips {
 public:
  explicit AugmentedMips(const Collection& x);

  std::size_t size() const { return scaled_.size(); }
  std::size_t output_dim() const { return scaled_.dim() + scaled_.size(); }
  double data_scale() const { return scale_; }
  const Collection& scaled() const { return scaled_; }
  double tail(std::size_t i) const { return tail_[i]; }

  double DataDistance(std::size_t i, std::size_t j) const;
  double QueryDistance(std::span<const float> q, std::size_t j) const;
  // Dense (d+m)-dimensional copy; for small instances and tests only.
  Collection Materialize() const;
  std::vector<float> MapQuery(std::span<const float> q) const;

 private:
  Collection scaled_;
  std::vector<double> tail_;
  double scale_ = 1.0;
};

}  // namespace annkit::transforms
