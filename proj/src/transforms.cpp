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

#include "annkit/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace annkit::transforms {
namespace {

double MaxNorm(const Collection& x) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) best = std::max(best, Norm(x.row(i)));
  return best;
}

}  // namespace

std::vector<float> TransformedPair::MapData(std::span<const float> u) const {
  std::vector<float> out(u.size() + 1);
  if (kind == TransformKind::kMipsToNn) {
    std::copy(u.begin(), u.end(), out.begin());
    out.back() = static_cast<float>(SquaredNorm(u));
  } else {
    double sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      out[i] = static_cast<float>(u[i] / data_scale);
      sq += (u[i] / data_scale) * (u[i] / data_scale);
    }
    out.back() = static_cast<float>(std::sqrt(std::max(0.0, 1.0 - sq)));
  }
  return out;
}

std::vector<float> TransformedPair::MapQuery(std::span<const float> q) const {
  std::vector<float> out(q.begin(), q.end());
  out.push_back(kind == TransformKind::kMipsToNn ? -0.5f : 0.0f);
  return out;
}

TransformedPair MipsToNn(const Collection& x) {
  TransformedPair t;
  t.kind = TransformKind::kMipsToNn;
  t.target_kind = DistanceKind::kNegInnerProduct;
  t.output_dim = x.dim() + 1;
  t.data = Collection(0, t.output_dim);
  for (std::size_t i = 0; i < x.size(); ++i) t.data.Append(t.MapData(x.row(i)));
  return t;
}

TransformedPair MipsToMcs(const Collection& x) {
  TransformedPair t;
  t.kind = TransformKind::kMipsToMcs;
  t.target_kind = DistanceKind::kAngular;
  t.output_dim = x.dim() + 1;
  const double s = MaxNorm(x);
  t.data_scale = s > 0.0 ? s : 1.0;
  t.data = Collection(0, t.output_dim);
  for (std::size_t i = 0; i < x.size(); ++i) t.data.Append(t.MapData(x.row(i)));
  return t;
}

AugmentedMips::AugmentedMips(const Collection& x) : scaled_(x) {
  const double s = MaxNorm(x);
  scale_ = s > 0.0 ? s : 1.0;
  tail_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto row = scaled_.mutable_row(i);
    for (auto& v : row) v = static_cast<float>(v / scale_);
    tail_[i] = std::sqrt(std::max(0.0, 1.0 - SquaredNorm(row)));
  }
}

double AugmentedMips::DataDistance(std::size_t i, std::size_t j) const {
  const double dense = L2Squared(scaled_.row(i), scaled_.row(j));
  if (i == j) return dense;
  return dense + tail_[i] * tail_[i] + tail_[j] * tail_[j];
}

double AugmentedMips::QueryDistance(std::span<const float> q,
                                    std::size_t j) const {
  return L2Squared(q, scaled_.row(j)) + tail_[j] * tail_[j];
}

Collection AugmentedMips::Materialize() const {
  const std::size_t d = scaled_.dim(), m = scaled_.size();
  Collection out(m, d + m);
  for (std::size_t i = 0; i < m; ++i) {
    auto row = out.mutable_row(i);
    std::copy_n(scaled_.row(i).begin(), d, row.begin());
    row[d + i] = static_cast<float>(tail_[i]);
  }
  return out;
}

std::vector<float> AugmentedMips::MapQuery(std::span<const float> q) const {
  std::vector<float> out(q.begin(), q.end());
  out.resize(output_dim(), 0.0f);
  return out;
}

}  // namespace annkit::transforms
