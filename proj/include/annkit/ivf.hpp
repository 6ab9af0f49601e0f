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
#include <string_view>
#include <vector>

#include "annkit/core.hpp"
#include "annkit/serialize.hpp"

namespace annkit::ivf {

enum class KMeansKind : std::uint8_t { kEuclidean = 0, kSpherical = 1 };

std::string_view ToString(KMeansKind kind);
KMeansKind ParseKMeansKind(std::string_view name);

struct KMeansModel {
  Collection centroids;
  std::vector<std::uint32_t> assignment;
  // Objective after each update step: sum of squared distances (Euclidean)
  // or sum of 1 - cos (spherical).
  std::vector<double> objective;
  KMeansKind kind = KMeansKind::kEuclidean;

  std::size_t clusters() const { return centroids.size(); }
  // Nearest centroid, ties to the smaller cluster id.
  std::uint32_t Assign(std::span<const float> u) const;

  void Save(BinaryWriter& w) const;
  static KMeansModel Load(BinaryReader& r);
  bool operator==(const KMeansModel&) const = default;
};

/// Lloyd iterations from k-means++ seeding until the assignment is a fixpoint
/// or max_iters updates have run. An empty cluster takes over the point of
/// the largest cluster that is farthest from its centroid.
KMeansModel TrainKMeans(const Collection& x, std::size_t clusters,
                        KMeansKind kind, std::size_t max_iters,
                        std::uint64_t seed);

// ceil(sqrt(m)).
std::size_t DefaultClusters(std::size_t m);

class IvfIndex {
 public:
  struct Options {
    std::size_t clusters = 0;  // 0 means DefaultClusters(m)
    KMeansKind kmeans = KMeansKind::kEuclidean;
    DistanceKind kind = DistanceKind::kL2Squared;
    std::size_t max_iters = 25;
    std::uint64_t seed = 0;
  };

  static IvfIndex Build(const Collection& x, const Options& options);

  // Top-ell clusters by the index's distance kind.
  std::vector<std::uint32_t> Route(std::span<const float> q,
                                   std::size_t ell) const;
  std::vector<VectorId> Candidates(std::span<const float> q,
                                   std::size_t ell) const;
  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k, std::size_t ell) const;

  const KMeansModel& model() const { return model_; }
  const std::vector<std::vector<VectorId>>& lists() const { return lists_; }
  std::size_t clusters() const { return lists_.size(); }
  DistanceKind kind() const { return kind_; }

  void Save(BinaryWriter& w) const;
  static IvfIndex Load(BinaryReader& r);
  bool operator==(const IvfIndex&) const = default;

 private:
  KMeansModel model_;
  std::vector<std::vector<VectorId>> lists_;
  DistanceKind kind_ = DistanceKind::kL2Squared;
};

}  // namespace annkit::ivf
