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

#include <algorithm>
#include <cmath>
#include <cstring>

#include "annkit/harness.hpp"
#include "annkit/random.hpp"

namespace annkit::harness {
namespace {

struct FamilyName {
  Family family;
  std::string_view name;
};

constexpr FamilyName kFamilyNames[] = {
    {Family::kFlat, "flat"},
    {Family::kKdTree, "kdtree"},
    {Family::kRpForest, "rpforest"},
    {Family::kSpillForest, "spillforest"},
    {Family::kCoverTree, "covertree"},
    {Family::kLsh, "lsh"},
    {Family::kApproxNn, "e2lsh"},
    {Family::kMipsLsh, "mipslsh"},
    {Family::kKnnGraph, "knngraph"},
    {Family::kAlphaSng, "sng"},
    {Family::kVamana, "vamana"},
    {Family::kIvf, "ivf"},
    {Family::kIvfPq, "ivfpq"},
};

void RequireL2(Family family, DistanceKind kind) {
  ANNKIT_CHECK(kind == DistanceKind::kL2Squared, ErrorCode::kInvalidArgument,
               std::string(ToString(family)) + " supports only the l2 kind");
}

// Mean nearest-neighbor distance over a small seeded sample.
double TypicalNnDistance(const Collection& x, std::uint64_t seed) {
  if (x.size() < 2) return 1.0;
  Rng rng(HashCombine(seed, 0x6e6e));
  const std::size_t n = std::min<std::size_t>(20, x.size());
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto i = rng.Index(x.size());
    for (const auto& nb : BruteForceTopK(x, x.row(i), 2, DistanceKind::kL2Squared).neighbors) {
      if (nb.id == i) continue;
      total += std::sqrt(nb.score);
      ++used;
      break;
    }
  }
  const double mean = used ? total / static_cast<double>(used) : 0.0;
  return mean > 0.0 ? mean : 1.0;
}

}  // namespace

std::string_view ToString(Family f) {
  for (const auto& e : kFamilyNames)
    if (e.family == f) return e.name;
  return "unknown";
}

Family ParseFamily(std::string_view name) {
  for (const auto& e : kFamilyNames)
    if (e.name == name) return e.family;
  Throw(ErrorCode::kInvalidArgument, "unknown index family '" + std::string(name) + "'");
}

const std::vector<Family>& AllFamilies() {
  static const std::vector<Family> all = [] {
    std::vector<Family> v;
    for (const auto& e : kFamilyNames) v.push_back(e.family);
    return v;
  }();
  return all;
}

Index Index::Build(Family family, Collection data, const Params& params,
                   std::uint64_t seed) {
  data.Validate();
  Index index;
  index.family_ = family;
  const std::string default_kind = family == Family::kMipsLsh ? "ip" : "l2";
  index.kind_ = ParseDistanceKind(ParamString(params, "kind", default_kind));
  const Collection& x = data;
  switch (family) {
    case Family::kFlat:
      break;
    case Family::kKdTree:
      RequireL2(family, index.kind_);
      index.impl_ = trees::KdTree::Build(x, ParamSize(params, "leaf", 16));
      break;
    case Family::kRpForest:
    case Family::kSpillForest: {
      trees::ProjectionTree::Options o;
      o.leaf_size = ParamSize(params, "leaf", 32);
      o.seed = seed;
      if (family == Family::kSpillForest) o.spill_alpha = ParamDouble(params, "alpha", 0.1);
      const std::size_t count =
          ParamSize(params, "trees", family == Family::kSpillForest ? 4 : 8);
      index.impl_ = trees::Forest::Build(x, count, o);
      break;
    }
    case Family::kCoverTree:
      RequireL2(family, index.kind_);
      index.impl_ = trees::CoverTree::Build(x);
      break;
    case Family::kLsh: {
      const bool angular = index.kind_ == DistanceKind::kAngular;
      const auto kind = lsh::ParseFamilyKind(
          ParamString(params, "hash", angular ? "hyperplane" : "pstable"));
      const double r = ParamDouble(params, "r", 4.0 * TypicalNnDistance(x, seed));
      index.impl_ = lsh::LshIndex::Build(x, kind, ParamSize(params, "ell", 8),
                                         ParamSize(params, "tables", 16), seed, r,
                                         angular ? DistanceKind::kAngular
                                                 : DistanceKind::kL2Squared);
      break;
    }
    case Family::kApproxNn: {
      RequireL2(family, index.kind_);
      lsh::ApproxNnIndex::Options o;
      o.eps = ParamDouble(params, "eps", 0.5);
      o.seed = seed;
      index.impl_ = lsh::ApproxNnIndex::Build(x, o);
      break;
    }
    case Family::kMipsLsh:
      ANNKIT_CHECK(index.kind_ == DistanceKind::kNegInnerProduct,
                   ErrorCode::kInvalidArgument, "mipslsh supports only the ip kind");
      index.impl_ = lsh::MipsHashIndex::Build(x, ParamSize(params, "ell", 8),
                                              ParamSize(params, "tables", 16), seed);
      break;
    case Family::kKnnGraph:
      index.impl_ = graph::BuildKnnGraph(x, ParamSize(params, "k", 16), index.kind_);
      break;
    case Family::kAlphaSng:
      RequireL2(family, index.kind_);
      index.impl_ = graph::BuildAlphaSngExact(x, ParamDouble(params, "alpha", 1.0));
      break;
    case Family::kVamana: {
      RequireL2(family, index.kind_);
      graph::VamanaOptions o;
      o.max_degree = ParamSize(params, "R", 32);
      o.alpha = ParamDouble(params, "alpha", 1.2);
      o.beam = ParamSize(params, "L", 0);
      o.seed = seed;
      index.impl_ = graph::BuildVamana(x, o);
      break;
    }
    case Family::kIvf: {
      ivf::IvfIndex::Options o;
      o.clusters = ParamSize(params, "C", 0);
      o.kmeans = ivf::ParseKMeansKind(ParamString(params, "kmeans", "euclidean"));
      o.kind = index.kind_;
      o.max_iters = ParamSize(params, "iters", 25);
      o.seed = seed;
      index.impl_ = ivf::IvfIndex::Build(x, o);
      break;
    }
    case Family::kIvfPq: {
      RequireL2(family, index.kind_);
      quant::IvfPqIndex::Options o;
      o.ivf.clusters = ParamSize(params, "C", 0);
      o.ivf.max_iters = ParamSize(params, "iters", 25);
      o.ivf.seed = seed;
      o.subspaces = ParamSize(params, "L", 4);
      o.codewords = ParamSize(params, "codewords", 256);
      o.kmeans_iters = o.ivf.max_iters;
      index.impl_ = quant::IvfPqIndex::Build(x, o);
      break;
    }
  }
  index.data_ = std::move(data);
  return index;
}

Index::QueryOutput Index::Query(std::span<const float> q, std::size_t k,
                                const Params& params) const {
  ANNKIT_CHECK(q.size() == data_.dim(), ErrorCode::kDimensionMismatch,
               "query: dimension mismatch");
  ANNKIT_CHECK(k >= 1, ErrorCode::kInvalidArgument, "query: k must be >= 1");
  const Collection& x = data_;
  QueryOutput out;
  auto scan = [&](const std::vector<VectorId>& ids, DistanceKind kind) {
    out.result = ScanCandidates(x, q, ids, k, kind);
    out.evaluations += ids.size();
  };
  switch (family_) {
    case Family::kFlat:
      out.result = BruteForceTopK(x, q, k, kind_);
      out.evaluations = x.size();
      break;
    case Family::kKdTree: {
      SearchStats stats;
      out.result = std::get<trees::KdTree>(impl_).Search(x, q, k, &stats);
      out.evaluations = stats.evaluations;
      break;
    }
    case Family::kRpForest:
    case Family::kSpillForest:
      scan(std::get<trees::Forest>(impl_).Candidates(q), kind_);
      break;
    case Family::kCoverTree: {
      SearchStats stats;
      const auto& tree = std::get<trees::CoverTree>(impl_);
      const double eps = ParamDouble(params, "eps", 0.0);
      if (eps > 0.0) {
        out.result.k = 1;
        out.result.neighbors.push_back(tree.SearchApprox(x, q, eps, &stats));
      } else {
        out.result = tree.Search(x, q, k, &stats);
      }
      out.evaluations = stats.evaluations;
      break;
    }
    case Family::kLsh:
      scan(std::get<lsh::LshIndex>(impl_).Candidates(q), kind_);
      break;
    case Family::kApproxNn: {
      const auto a = std::get<lsh::ApproxNnIndex>(impl_).Query(x, q);
      out.result.k = 1;
      out.result.neighbors.push_back(a.neighbor);
      out.evaluations = a.visited + (a.fallback ? x.size() : 0);
      break;
    }
    case Family::kMipsLsh:
      scan(std::get<lsh::MipsHashIndex>(impl_).Candidates(q),
           DistanceKind::kNegInnerProduct);
      break;
    case Family::kKnnGraph:
    case Family::kAlphaSng:
    case Family::kVamana: {
      const auto beam = ParamSize(params, "b", std::max<std::size_t>(64, k));
      auto r = graph::GreedySearch(std::get<graph::NeighborGraph>(impl_), x, q, k, beam);
      out.result = std::move(r.result);
      out.evaluations = r.trace.visited;
      break;
    }
    case Family::kIvf: {
      const auto& index = std::get<ivf::IvfIndex>(impl_);
      const auto ell = std::min(ParamSize(params, "l", 1), index.clusters());
      scan(index.Candidates(q, ell), kind_);
      out.evaluations += index.clusters();
      break;
    }
    case Family::kIvfPq: {
      const auto& index = std::get<quant::IvfPqIndex>(impl_);
      const auto ell = std::min(ParamSize(params, "l", 1), index.ivf().clusters());
      const auto rerank = ParamSize(params, "rerank", 0);
      out.result = index.Search(x, q, k, ell, rerank);
      out.evaluations = index.ivf().clusters() + rerank;
      break;
    }
  }
  return out;
}

std::vector<std::uint8_t> Index::Serialize() const {
  BinaryWriter payload;
  payload.Put(static_cast<std::uint8_t>(kind_));
  payload.PutCollection(data_);
  std::visit(
      [&](const auto& impl) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(impl)>, std::monostate>)
          impl.Save(payload);
      },
      impl_);
  BinaryWriter w;
  for (char c : kContainerMagic) w.Put(c);
  w.Put(static_cast<std::uint8_t>(family_));
  w.Put(kContainerVersion);
  w.PutVector(payload.bytes());
  return std::move(w).Release();
}

Index Index::Deserialize(std::span<const std::uint8_t> bytes) {
  BinaryReader r(bytes);
  for (char c : kContainerMagic)
    ANNKIT_CHECK(r.Get<char>() == c, ErrorCode::kFormat, "container: bad magic");
  Index index;
  const auto tag = r.Get<std::uint8_t>();
  ANNKIT_CHECK(tag <= static_cast<std::uint8_t>(Family::kIvfPq), ErrorCode::kFormat,
               "container: unknown family tag");
  index.family_ = static_cast<Family>(tag);
  ANNKIT_CHECK(r.Get<std::uint16_t>() == kContainerVersion, ErrorCode::kFormat,
               "container: unsupported version");
  const auto payload = r.GetVector<std::uint8_t>();
  ANNKIT_CHECK(r.done(), ErrorCode::kFormat, "container: trailing bytes");

  BinaryReader p(payload);
  const auto kind = p.Get<std::uint8_t>();
  ANNKIT_CHECK(kind <= static_cast<std::uint8_t>(DistanceKind::kNegJaccard), ErrorCode::kFormat,
               "container: unknown distance kind");
  index.kind_ = static_cast<DistanceKind>(kind);
  index.data_ = p.GetCollection();
  switch (index.family_) {
    case Family::kFlat: break;
    case Family::kKdTree: index.impl_ = trees::KdTree::Load(p); break;
    case Family::kRpForest:
    case Family::kSpillForest: index.impl_ = trees::Forest::Load(p); break;
    case Family::kCoverTree: index.impl_ = trees::CoverTree::Load(p); break;
    case Family::kLsh: index.impl_ = lsh::LshIndex::Load(p); break;
    case Family::kApproxNn: index.impl_ = lsh::ApproxNnIndex::Load(p); break;
    case Family::kMipsLsh: index.impl_ = lsh::MipsHashIndex::Load(p); break;
    case Family::kKnnGraph:
    case Family::kAlphaSng:
    case Family::kVamana: index.impl_ = graph::NeighborGraph::Load(p); break;
    case Family::kIvf: index.impl_ = ivf::IvfIndex::Load(p); break;
    case Family::kIvfPq: index.impl_ = quant::IvfPqIndex::Load(p); break;
  }
  ANNKIT_CHECK(p.done(), ErrorCode::kFormat, "container: trailing payload bytes");
  return index;
}

std::size_t Index::clusters() const {
  if (const auto* ivf = std::get_if<ivf::IvfIndex>(&impl_)) return ivf->clusters();
  if (const auto* pq = std::get_if<quant::IvfPqIndex>(&impl_)) return pq->ivf().clusters();
  return 0;
}

void Index::Save(const std::string& path) const { WriteFile(path, Serialize()); }

Index Index::Load(const std::string& path) { return Deserialize(ReadFile(path)); }

}  // namespace annkit::harness
