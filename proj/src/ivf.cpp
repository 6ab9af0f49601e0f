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

#include "annkit/ivf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "annkit/random.hpp"

namespace annkit::ivf {
namespace {

// Cost of u against centroid c: squared distance, or 1 - <u, c> for unit u, c.
double Cost(KMeansKind kind, std::span<const float> u, std::span<const float> c) {
  return kind == KMeansKind::kEuclidean ? L2Squared(u, c) : 1.0 - Dot(u, c);
}

std::uint32_t Nearest(KMeansKind kind, const Collection& centroids,
                      std::span<const float> u, double* cost = nullptr) {
  std::uint32_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double v = Cost(kind, u, centroids.row(c));
    if (v < best_cost) {
      best_cost = v;
      best = static_cast<std::uint32_t>(c);
    }
  }
  if (cost) *cost = best_cost;
  return best;
}

Collection Normalized(const Collection& x) {
  Collection out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto row = out.mutable_row(i);
    const double n = Norm(row);
    if (n > 0.0)
      for (auto& v : row) v = static_cast<float>(v / n);
  }
  return out;
}

Collection SeedPlusPlus(const Collection& x, std::size_t clusters,
                        KMeansKind kind, Rng& rng) {
  const std::size_t m = x.size();
  Collection centroids(0, x.dim());
  centroids.Append(x.row(rng.Index(m)));
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i)
    weight[i] = std::max(0.0, Cost(kind, x.row(i), centroids.row(0)));
  while (centroids.size() < clusters) {
    double total = 0.0;
    for (double w : weight) total += w;
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.Uniform() * total;
      pick = m - 1;
      for (std::size_t i = 0; i < m; ++i) {
        target -= weight[i];
        if (target < 0.0 && weight[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.Index(m);
    }
    centroids.Append(x.row(pick));
    const auto last = centroids.row(centroids.size() - 1);
    for (std::size_t i = 0; i < m; ++i)
      weight[i] = std::min(weight[i], std::max(0.0, Cost(kind, x.row(i), last)));
  }
  return centroids;
}

}  // namespace

std::string_view ToString(KMeansKind kind) {
  return kind == KMeansKind::kEuclidean ? "euclidean" : "spherical";
}

KMeansKind ParseKMeansKind(std::string_view name) {
  if (name == "euclidean") return KMeansKind::kEuclidean;
  if (name == "spherical") return KMeansKind::kSpherical;
  Throw(ErrorCode::kInvalidArgument, "unknown kmeans kind '" + std::string(name) + "'");
}

std::uint32_t KMeansModel::Assign(std::span<const float> u) const {
  ANNKIT_CHECK(u.size() == centroids.dim(), ErrorCode::kDimensionMismatch,
               "kmeans: dimension mismatch");
  if (kind == KMeansKind::kEuclidean) return Nearest(kind, centroids, u);
  std::vector<float> unit(u.begin(), u.end());
  const double n = Norm(unit);
  if (n > 0.0)
    for (auto& v : unit) v = static_cast<float>(v / n);
  return Nearest(kind, centroids, unit);
}

void KMeansModel::Save(BinaryWriter& w) const {
  w.Put(static_cast<std::uint8_t>(kind));
  w.PutCollection(centroids);
  w.PutVector(assignment);
  w.PutVector(objective);
}

KMeansModel KMeansModel::Load(BinaryReader& r) {
  KMeansModel m;
  m.kind = static_cast<KMeansKind>(r.Get<std::uint8_t>());
  m.centroids = r.GetCollection();
  m.assignment = r.GetVector<std::uint32_t>();
  m.objective = r.GetVector<double>();
  return m;
}

KMeansModel TrainKMeans(const Collection& x, std::size_t clusters,
                        KMeansKind kind, std::size_t max_iters,
                        std::uint64_t seed) {
  x.Validate();
  ANNKIT_CHECK(clusters >= 1 && clusters <= x.size(),
               ErrorCode::kInvalidArgument, "kmeans: require 1 <= C <= m");
  const Collection data = kind == KMeansKind::kSpherical ? Normalized(x) : x;
  const std::size_t m = data.size(), d = data.dim();
  Rng rng(seed);

  KMeansModel model;
  model.kind = kind;
  model.centroids = SeedPlusPlus(data, clusters, kind, rng);
  model.assignment.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    model.assignment[i] = Nearest(kind, model.centroids, data.row(i));

  std::vector<double> sums(clusters * d);
  std::vector<std::size_t> counts(clusters);
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // Update step.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = model.assignment[i];
      ++counts[c];
      auto row = data.row(i);
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += row[j];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] == 0) continue;
      auto cen = model.centroids.mutable_row(c);
      double scale = static_cast<double>(counts[c]);
      if (kind == KMeansKind::kSpherical) {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) sq += sums[c * d + j] * sums[c * d + j];
        if (sq == 0.0) continue;
        scale = std::sqrt(sq);
      }
      for (std::size_t j = 0; j < d; ++j)
        cen[j] = static_cast<float>(sums[c * d + j] / scale);
    }
    // Empty-cluster repair.
    for (std::size_t c = 0; c < clusters; ++c) {
      if (counts[c] != 0) continue;
      const auto largest = static_cast<std::uint32_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      if (counts[largest] < 2) break;
      std::size_t far = m;
      double far_cost = -1.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (model.assignment[i] != largest) continue;
        const double v = Cost(kind, data.row(i), model.centroids.row(largest));
        if (v > far_cost) {
          far_cost = v;
          far = i;
        }
      }
      auto cen = model.centroids.mutable_row(c);
      std::copy(data.row(far).begin(), data.row(far).end(), cen.begin());
      model.assignment[far] = static_cast<std::uint32_t>(c);
      --counts[largest];
      counts[c] = 1;
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      objective += Cost(kind, data.row(i), model.centroids.row(model.assignment[i]));
    model.objective.push_back(objective);

    // Assignment step; ties keep the current cluster so a fixpoint is stable.
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      const auto current = model.assignment[i];
      double best_cost = 0.0;
      const auto best = Nearest(kind, model.centroids, data.row(i), &best_cost);
      const double current_cost =
          Cost(kind, data.row(i), model.centroids.row(current));
      if (best != current && best_cost < current_cost) {
        model.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return model;
}

std::size_t DefaultClusters(std::size_t m) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
}

IvfIndex IvfIndex::Build(const Collection& x, const Options& options) {
  x.Validate();
  IvfIndex index;
  const std::size_t clusters =
      options.clusters == 0 ? DefaultClusters(x.size()) : options.clusters;
  index.model_ = TrainKMeans(x, clusters, options.kmeans, options.max_iters,
                             options.seed);
  index.kind_ = options.kind;
  index.lists_.resize(clusters);
  for (std::size_t i = 0; i < x.size(); ++i)
    index.lists_[index.model_.assignment[i]].push_back(static_cast<VectorId>(i));
  return index;
}

std::vector<std::uint32_t> IvfIndex::Route(std::span<const float> q,
                                           std::size_t ell) const {
  ANNKIT_CHECK(ell >= 1 && ell <= clusters(), ErrorCode::kInvalidArgument,
               "ivf: require 1 <= ell <= C");
  std::vector<Neighbor> scored(clusters());
  for (std::size_t c = 0; c < clusters(); ++c) {
    auto cen = model_.centroids.row(c);
    // A zero centroid has no direction; rank it last under the angular kind.
    const double s = kind_ == DistanceKind::kAngular && SquaredNorm(cen) == 0.0
                         ? std::numeric_limits<double>::infinity()
                         : Distance(kind_, q, cen);
    scored[c] = {static_cast<VectorId>(c), s};
  }
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(ell),
                    scored.end(), NeighborLess);
  std::vector<std::uint32_t> out(ell);
  for (std::size_t i = 0; i < ell; ++i) out[i] = scored[i].id;
  return out;
}

std::vector<VectorId> IvfIndex::Candidates(std::span<const float> q,
                                           std::size_t ell) const {
  std::vector<VectorId> ids;
  for (auto c : Route(q, ell)) ids.insert(ids.end(), lists_[c].begin(), lists_[c].end());
  return ids;
}

TopKResult IvfIndex::Search(const Collection& x, std::span<const float> q,
                            std::size_t k, std::size_t ell) const {
  return ScanCandidates(x, q, Candidates(q, ell), k, kind_);
}

void IvfIndex::Save(BinaryWriter& w) const {
  model_.Save(w);
  w.Put(static_cast<std::uint8_t>(kind_));
  w.Put<std::uint64_t>(lists_.size());
  for (const auto& l : lists_) w.PutVector(l);
}

IvfIndex IvfIndex::Load(BinaryReader& r) {
  IvfIndex index;
  index.model_ = KMeansModel::Load(r);
  index.kind_ = static_cast<DistanceKind>(r.Get<std::uint8_t>());
  index.lists_.resize(r.Get<std::uint64_t>());
  for (auto& l : index.lists_) l = r.GetVector<VectorId>();
  return index;
}

}  // namespace annkit::ivf
