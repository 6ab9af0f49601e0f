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

#include "annkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace annkit {

void Throw(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::string_view ToString(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kL2Squared: return "l2";
    case DistanceKind::kAngular: return "angular";
    case DistanceKind::kNegInnerProduct: return "ip";
    case DistanceKind::kNegJaccard: return "jaccard";
  }
  return "unknown";
}

DistanceKind ParseDistanceKind(std::string_view name) {
  if (name == "l2" || name == "l2sq") return DistanceKind::kL2Squared;
  if (name == "angular" || name == "cosine") return DistanceKind::kAngular;
  if (name == "ip" || name == "mips") return DistanceKind::kNegInnerProduct;
  if (name == "jaccard") return DistanceKind::kNegJaccard;
  Throw(ErrorCode::kInvalidArgument,
        "unknown distance kind '" + std::string(name) + "'");
}

void SparseVector::Validate() const {
  ANNKIT_CHECK(indices.size() == values.size(), ErrorCode::kInvalidArgument,
               "sparse vector: indices/values length mismatch");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    ANNKIT_CHECK(indices[i] < dim, ErrorCode::kInvalidArgument,
                 "sparse vector: index out of range");
    ANNKIT_CHECK(i == 0 || indices[i - 1] < indices[i],
                 ErrorCode::kInvalidArgument,
                 "sparse vector: indices not strictly increasing");
    ANNKIT_CHECK(values[i] != 0.0f && std::isfinite(values[i]),
                 ErrorCode::kInvalidArgument,
                 "sparse vector: values must be finite and non-zero");
  }
}

SparseVector SparseVector::FromDense(std::span<const float> dense) {
  SparseVector s;
  s.dim = static_cast<std::uint32_t>(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0f) {
      s.indices.push_back(static_cast<std::uint32_t>(i));
      s.values.push_back(dense[i]);
    }
  }
  return s;
}

std::vector<float> SparseVector::ToDense() const {
  std::vector<float> out(dim, 0.0f);
  for (std::size_t i = 0; i < indices.size(); ++i) out[indices[i]] = values[i];
  return out;
}

Collection::Collection(std::size_t m, std::size_t d) : data_(m * d, 0.0f), d_(d) {}

Collection::Collection(std::vector<float> data, std::size_t d)
    : data_(std::move(data)), d_(d) {
  ANNKIT_CHECK(d > 0, ErrorCode::kInvalidArgument, "collection: d must be > 0");
  ANNKIT_CHECK(data_.size() % d == 0, ErrorCode::kDimensionMismatch,
               "collection: data length is not a multiple of d");
}

void Collection::Append(std::span<const float> v) {
  if (d_ == 0) d_ = v.size();
  ANNKIT_CHECK(v.size() == d_ && d_ > 0, ErrorCode::kDimensionMismatch,
               "collection: appended vector has wrong dimension");
  data_.insert(data_.end(), v.begin(), v.end());
}

void Collection::Validate() const {
  ANNKIT_CHECK(size() >= 1, ErrorCode::kEmpty, "collection: m must be >= 1");
  for (float x : data_) {
    ANNKIT_CHECK(std::isfinite(x), ErrorCode::kInvalidArgument,
                 "collection: non-finite entry");
  }
}

std::vector<VectorId> TopKResult::ids() const {
  std::vector<VectorId> out;
  out.reserve(neighbors.size());
  for (const auto& n : neighbors) out.push_back(n.id);
  return out;
}

void TopKCollector::Push(VectorId id, double score) {
  if (k_ == 0) return;
  Neighbor n{id, score};
  if (heap_.size() < k_) {
    heap_.push_back(n);
    std::push_heap(heap_.begin(), heap_.end(), NeighborLess);
  } else if (NeighborLess(n, heap_.front())) {
    std::pop_heap(heap_.begin(), heap_.end(), NeighborLess);
    heap_.back() = n;
    std::push_heap(heap_.begin(), heap_.end(), NeighborLess);
  }
}

double TopKCollector::WorstScore() const {
  if (heap_.size() < k_) return std::numeric_limits<double>::infinity();
  return heap_.front().score;
}

TopKResult TopKCollector::Finish() && {
  std::sort_heap(heap_.begin(), heap_.end(), NeighborLess);
  return TopKResult{std::move(heap_), k_};
}

double Dot(std::span<const float> u, std::span<const float> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    s += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  return s;
}

double SquaredNorm(std::span<const float> u) { return Dot(u, u); }

double Norm(std::span<const float> u) { return std::sqrt(SquaredNorm(u)); }

double L2Squared(std::span<const float> u, std::span<const float> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = static_cast<double>(u[i]) - static_cast<double>(v[i]);
    s += t * t;
  }
  return s;
}

double Distance(DistanceKind kind, std::span<const float> u,
                std::span<const float> v) {
  ANNKIT_CHECK(u.size() == v.size(), ErrorCode::kDimensionMismatch,
               "distance: dimension mismatch");
  switch (kind) {
    case DistanceKind::kL2Squared:
      return L2Squared(u, v);
    case DistanceKind::kAngular: {
      const double nu = Norm(u), nv = Norm(v);
      ANNKIT_CHECK(nu > 0.0 && nv > 0.0, ErrorCode::kInvalidArgument,
                   "distance: zero vector under angular distance");
      return 1.0 - Dot(u, v) / (nu * nv);
    }
    case DistanceKind::kNegInnerProduct:
      return -Dot(u, v);
    case DistanceKind::kNegJaccard: {
      std::size_t inter = 0, uni = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const bool a = u[i] != 0.0f, b = v[i] != 0.0f;
        inter += (a && b);
        uni += (a || b);
      }
      return uni == 0 ? 0.0 : -static_cast<double>(inter) / uni;
    }
  }
  return 0.0;
}

double Distance(DistanceKind kind, const SparseVector& u,
                const SparseVector& v) {
  ANNKIT_CHECK(u.dim == v.dim, ErrorCode::kDimensionMismatch,
               "distance: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0, l2 = 0.0;
  std::size_t inter = 0, i = 0, j = 0;
  while (i < u.indices.size() || j < v.indices.size()) {
    if (j == v.indices.size() ||
        (i < u.indices.size() && u.indices[i] < v.indices[j])) {
      l2 += double(u.values[i]) * u.values[i];
      nu += double(u.values[i]) * u.values[i];
      ++i;
    } else if (i == u.indices.size() || v.indices[j] < u.indices[i]) {
      l2 += double(v.values[j]) * v.values[j];
      nv += double(v.values[j]) * v.values[j];
      ++j;
    } else {
      const double a = u.values[i], b = v.values[j];
      dot += a * b;
      nu += a * a;
      nv += b * b;
      l2 += (a - b) * (a - b);
      ++inter;
      ++i;
      ++j;
    }
  }
  switch (kind) {
    case DistanceKind::kL2Squared:
      return l2;
    case DistanceKind::kAngular:
      ANNKIT_CHECK(nu > 0.0 && nv > 0.0, ErrorCode::kInvalidArgument,
                   "distance: zero vector under angular distance");
      return 1.0 - dot / std::sqrt(nu * nv);
    case DistanceKind::kNegInnerProduct:
      return -dot;
    case DistanceKind::kNegJaccard: {
      const std::size_t uni = u.indices.size() + v.indices.size() - inter;
      return uni == 0 ? 0.0 : -static_cast<double>(inter) / uni;
    }
  }
  return 0.0;
}

TopKResult BruteForceTopK(const Collection& x, std::span<const float> q,
                          std::size_t k, DistanceKind kind) {
  ANNKIT_CHECK(k >= 1, ErrorCode::kInvalidArgument, "top-k: k must be >= 1");
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "top-k: query dimension mismatch");
  TopKCollector top(std::min(k, x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    top.Push(static_cast<VectorId>(i), Distance(kind, q, x.row(i)));
  auto out = std::move(top).Finish();
  out.k = k;
  return out;
}

TopKResult ScanCandidates(const Collection& x, std::span<const float> q,
                          std::span<const VectorId> candidates, std::size_t k,
                          DistanceKind kind) {
  std::vector<VectorId> ids(candidates.begin(), candidates.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  TopKCollector top(std::min(k, ids.size()));
  for (VectorId id : ids) top.Push(id, Distance(kind, q, x.row(id)));
  auto out = std::move(top).Finish();
  out.k = k;
  return out;
}

double Recall(const TopKResult& exact, const TopKResult& approx, std::size_t k) {
  if (k == 0) return 0.0;
  std::unordered_set<VectorId> truth;
  for (std::size_t i = 0; i < exact.neighbors.size() && i < k; ++i)
    truth.insert(exact.neighbors[i].id);
  std::size_t hit = 0;
  std::unordered_set<VectorId> seen;
  for (std::size_t i = 0; i < approx.neighbors.size() && i < k; ++i) {
    const VectorId id = approx.neighbors[i].id;
    if (truth.count(id) && seen.insert(id).second) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(k);
}

bool EpsilonValid(double exact_kth_score, double candidate_score, double eps) {
  ANNKIT_CHECK(exact_kth_score >= 0.0 && candidate_score >= 0.0,
               ErrorCode::kInvalidArgument,
               "epsilon_valid: scores must be non-negative distances");
  ANNKIT_CHECK(eps > 0.0, ErrorCode::kInvalidArgument,
               "epsilon_valid: eps must be > 0");
  return candidate_score <= (1.0 + eps) * exact_kth_score;
}

}  // namespace annkit
