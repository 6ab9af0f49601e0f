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

#include "annkit/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_set>

#include "annkit/random.hpp"

namespace annkit::lsh {
namespace {

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Unnormalized in-place Walsh-Hadamard transform; length is a power of two.
void Hadamard(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

double AdaptiveSimpson(const auto& f, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return AdaptiveSimpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         AdaptiveSimpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

std::string_view ToString(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kBitSampling: return "bitsampling";
    case FamilyKind::kHyperplane: return "hyperplane";
    case FamilyKind::kCrossPolytope: return "crosspolytope";
    case FamilyKind::kPStable: return "pstable";
  }
  return "unknown";
}

FamilyKind ParseFamilyKind(std::string_view name) {
  if (name == "bitsampling") return FamilyKind::kBitSampling;
  if (name == "hyperplane") return FamilyKind::kHyperplane;
  if (name == "crosspolytope") return FamilyKind::kCrossPolytope;
  if (name == "pstable") return FamilyKind::kPStable;
  Throw(ErrorCode::kInvalidArgument,
        "unknown hash family '" + std::string(name) + "'");
}

HashFamily::HashFamily(FamilyKind kind, std::size_t dim, std::size_t count,
                       std::uint64_t seed, double r)
    : kind_(kind), dim_(dim), count_(count), seed_(seed), r_(r) {
  ANNKIT_CHECK(dim >= 1, ErrorCode::kInvalidArgument, "hash family: dim >= 1");
  ANNKIT_CHECK(r > 0.0, ErrorCode::kInvalidArgument, "hash family: r > 0");
  Materialize();
}

void HashFamily::Materialize() {
  padded_ = kind_ == FamilyKind::kCrossPolytope ? NextPow2(dim_) : dim_;
  coords_.clear();
  params_.clear();
  offsets_.clear();
  for (std::size_t j = 0; j < count_; ++j) {
    Rng rng(HashCombine(seed_, j, static_cast<std::uint64_t>(kind_)));
    switch (kind_) {
      case FamilyKind::kBitSampling:
        coords_.push_back(static_cast<std::uint32_t>(rng.Index(dim_)));
        break;
      case FamilyKind::kHyperplane:
        for (std::size_t i = 0; i < dim_; ++i)
          params_.push_back(static_cast<float>(rng.Normal()));
        break;
      case FamilyKind::kPStable:
        for (std::size_t i = 0; i < dim_; ++i)
          params_.push_back(static_cast<float>(rng.Normal()));
        offsets_.push_back(rng.Uniform(0.0, r_));
        break;
      case FamilyKind::kCrossPolytope:
        for (std::size_t i = 0; i < 3 * padded_; ++i)
          params_.push_back(rng.Uniform() < 0.5 ? -1.0f : 1.0f);
        break;
    }
  }
}

std::int64_t HashFamily::Hash(std::size_t j, std::span<const float> u) const {
  ANNKIT_CHECK(u.size() == dim_, ErrorCode::kDimensionMismatch,
               "hash: dimension mismatch");
  switch (kind_) {
    case FamilyKind::kBitSampling: {
      const float v = u[coords_[j]];
      ANNKIT_CHECK(v == 0.0f || v == 1.0f, ErrorCode::kInvalidArgument,
                   "bit sampling requires binary vectors");
      return v == 1.0f ? 1 : 0;
    }
    case FamilyKind::kHyperplane: {
      std::span<const float> a(params_.data() + j * dim_, dim_);
      return Dot(a, u) >= 0.0 ? 1 : 0;
    }
    case FamilyKind::kPStable: {
      std::span<const float> a(params_.data() + j * dim_, dim_);
      return static_cast<std::int64_t>(std::floor((Dot(a, u) + offsets_[j]) / r_));
    }
    case FamilyKind::kCrossPolytope: {
      std::vector<double> y(padded_, 0.0);
      for (std::size_t i = 0; i < dim_; ++i) y[i] = u[i];
      const float* signs = params_.data() + j * 3 * padded_;
      for (int round = 0; round < 3; ++round) {
        for (std::size_t i = 0; i < padded_; ++i)
          y[i] *= signs[round * padded_ + i];
        Hadamard(y);
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < padded_; ++i)
        if (std::abs(y[i]) > std::abs(y[best])) best = i;
      return static_cast<std::int64_t>(2 * best + (y[best] < 0.0 ? 1 : 0));
    }
  }
  return 0;
}

double HyperplaneCollision(double angle) { return 1.0 - angle / std::numbers::pi; }

double BitSamplingCollision(std::size_t hamming, std::size_t dim) {
  return 1.0 - static_cast<double>(hamming) / static_cast<double>(dim);
}

double PStableCollision(double distance, double r) {
  if (distance <= 0.0) return 1.0;
  const double c = 2.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double t) {
    const double z = t / distance;
    return (1.0 / distance) * c * std::exp(-0.5 * z * z) * (1.0 - t / r);
  };
  const double fa = integrand(0.0), fb = integrand(r), fm = integrand(0.5 * r);
  const double whole = r / 6.0 * (fa + 4.0 * fm + fb);
  return AdaptiveSimpson(integrand, 0.0, r, fa, fm, fb, whole, 1e-7, 40);
}

Params DeriveParams(std::size_t m, double p1, double p2) {
  ANNKIT_CHECK(p2 > 0.0 && p1 < 1.0 && p2 < p1, ErrorCode::kInvalidArgument,
               "lsh params: require 0 < p2 < p1 < 1");
  ANNKIT_CHECK(m >= 1, ErrorCode::kInvalidArgument, "lsh params: m >= 1");
  Params p;
  p.rho = std::log(p1) / std::log(p2);
  const double ell = std::log(static_cast<double>(m)) / std::log(1.0 / p2);
  p.ell = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ell - 1e-12)));
  p.tables = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(std::pow(static_cast<double>(m), p.rho) - 1e-12)));
  return p;
}

double MetricDistance(DistanceKind kind, std::span<const float> q,
                      std::span<const float> u) {
  if (kind == DistanceKind::kL2Squared) return std::sqrt(L2Squared(q, u));
  return Distance(kind, q, u);
}

LshIndex LshIndex::Build(const Collection& x, FamilyKind kind, std::size_t ell,
                         std::size_t tables, std::uint64_t seed, double r,
                         DistanceKind metric) {
  x.Validate();
  ANNKIT_CHECK(ell >= 1 && tables >= 1, ErrorCode::kInvalidArgument,
               "lsh index: ell and L must be >= 1");
  LshIndex index;
  index.ell_ = ell;
  index.metric_ = metric;
  index.family_ = HashFamily(kind, x.dim(), ell * tables, seed, r);
  index.tables_.resize(tables);
  std::vector<std::pair<std::uint64_t, VectorId>> entries(x.size());
  for (std::size_t t = 0; t < tables; ++t) {
    for (std::size_t i = 0; i < x.size(); ++i)
      entries[i] = {index.Key(t, x.row(i)), static_cast<VectorId>(i)};
    std::sort(entries.begin(), entries.end());
    Table& table = index.tables_[t];
    table.ids.reserve(x.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i == 0 || entries[i].first != entries[i - 1].first) {
        table.keys.push_back(entries[i].first);
        table.offsets.push_back(static_cast<std::uint32_t>(i));
      }
      table.ids.push_back(entries[i].second);
    }
    table.offsets.push_back(static_cast<std::uint32_t>(entries.size()));
  }
  return index;
}

std::uint64_t LshIndex::Key(std::size_t table, std::span<const float> u) const {
  std::uint64_t key = 0x243f6a8885a308d3ULL;
  for (std::size_t j = 0; j < ell_; ++j) {
    const auto h = static_cast<std::uint64_t>(family_.Hash(table * ell_ + j, u));
    key = Mix64(key ^ (h + 0x9e3779b97f4a7c15ULL + (key << 6)));
  }
  return key;
}

std::span<const VectorId> LshIndex::Bucket(std::size_t table,
                                           std::uint64_t key) const {
  const Table& t = tables_[table];
  auto it = std::lower_bound(t.keys.begin(), t.keys.end(), key);
  if (it == t.keys.end() || *it != key) return {};
  const auto b = static_cast<std::size_t>(it - t.keys.begin());
  return {t.ids.data() + t.offsets[b], t.offsets[b + 1] - t.offsets[b]};
}

PlebAnswer LshIndex::Pleb(const Collection& x, std::span<const float> q,
                          double r, double eps) const {
  PlebAnswer answer;
  const std::size_t cap = 4 * tables_.size();
  std::unordered_set<VectorId> seen;
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    for (VectorId id : Bucket(t, q)) {
      if (!seen.insert(id).second) continue;
      if (answer.visited == cap) return answer;
      ++answer.visited;
      const double dist = MetricDistance(metric_, q, x.row(id));
      if (dist <= (1.0 + eps) * r) {
        answer.yes = true;
        answer.witness = {id, dist};
        return answer;
      }
    }
  }
  return answer;
}

std::vector<VectorId> LshIndex::Candidates(std::span<const float> q) const {
  std::vector<VectorId> ids;
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    auto b = Bucket(t, q);
    ids.insert(ids.end(), b.begin(), b.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

TopKResult LshIndex::Search(const Collection& x, std::span<const float> q,
                            std::size_t k, DistanceKind kind) const {
  return ScanCandidates(x, q, Candidates(q), k, kind);
}

void LshIndex::Save(BinaryWriter& w) const {
  w.Put(static_cast<std::uint8_t>(family_.kind()));
  w.Put<std::uint64_t>(family_.dim());
  w.Put<std::uint64_t>(family_.count());
  w.Put(family_.seed());
  w.Put(family_.r());
  w.Put<std::uint64_t>(ell_);
  w.Put(static_cast<std::uint8_t>(metric_));
  w.Put<std::uint64_t>(tables_.size());
  for (const auto& t : tables_) {
    w.PutVector(t.keys);
    w.PutVector(t.offsets);
    w.PutVector(t.ids);
  }
}

LshIndex LshIndex::Load(BinaryReader& r) {
  LshIndex index;
  const auto kind = static_cast<FamilyKind>(r.Get<std::uint8_t>());
  const auto dim = r.Get<std::uint64_t>();
  const auto count = r.Get<std::uint64_t>();
  const auto seed = r.Get<std::uint64_t>();
  const auto radius = r.Get<double>();
  // Hash functions are regenerated from their seed.
  index.family_ = HashFamily(kind, dim, count, seed, radius);
  index.ell_ = r.Get<std::uint64_t>();
  index.metric_ = static_cast<DistanceKind>(r.Get<std::uint8_t>());
  index.tables_.resize(r.Get<std::uint64_t>());
  for (auto& t : index.tables_) {
    t.keys = r.GetVector<std::uint64_t>();
    t.offsets = r.GetVector<std::uint32_t>();
    t.ids = r.GetVector<VectorId>();
  }
  return index;
}

bool LshIndex::operator==(const LshIndex& o) const {
  if (ell_ != o.ell_ || tables_.size() != o.tables_.size() ||
      metric_ != o.metric_ || family_.seed() != o.family_.seed() ||
      family_.kind() != o.family_.kind())
    return false;
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    if (tables_[t].keys != o.tables_[t].keys ||
        tables_[t].offsets != o.tables_[t].offsets ||
        tables_[t].ids != o.tables_[t].ids)
      return false;
  }
  return true;
}

ApproxNnIndex ApproxNnIndex::Build(const Collection& x, const Options& options) {
  x.Validate();
  ANNKIT_CHECK(options.eps > 0.0, ErrorCode::kInvalidArgument,
               "approx-nn: eps must be > 0");
  ApproxNnIndex index;
  index.eps_ = options.eps;
  const std::size_t m = x.size();
  ANNKIT_CHECK(m >= 2, ErrorCode::kInvalidArgument,
               "approx-nn: need at least two points");
  // Aspect ratio from a random sample of pairs.
  Rng rng(HashCombine(options.seed, 0xa5));
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t s = 0; s < options.sample_pairs; ++s) {
    const auto a = rng.Index(m), b = rng.Index(m);
    if (a == b) continue;
    const double dist = std::sqrt(L2Squared(x.row(a), x.row(b)));
    if (dist > 0.0) lo = std::min(lo, dist);
    hi = std::max(hi, dist);
  }
  ANNKIT_CHECK(hi > 0.0 && std::isfinite(lo), ErrorCode::kInvalidArgument,
               "approx-nn: degenerate collection (all points identical)");
  index.min_dist_ = lo;
  index.max_dist_ = hi;
  const double ratio = hi / lo;
  const auto levels = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(std::log(ratio) / std::log1p(options.eps) - 1e-12)));
  // The collision probabilities depend only on distance / r, so every level
  // shares the same (ell, L).
  const double p1 = PStableCollision(1.0, 1.0);
  const double p2 = PStableCollision(1.0 + options.eps, 1.0);
  index.params_ = DeriveParams(m, p1, p2);
  for (std::size_t j = 0; j < levels; ++j) {
    const double r = lo * std::pow(1.0 + options.eps, static_cast<double>(j));
    index.radii_.push_back(r);
    index.levels_.push_back(LshIndex::Build(x, FamilyKind::kPStable,
                                            index.params_.ell,
                                            index.params_.tables,
                                            HashCombine(options.seed, j), r));
  }
  return index;
}

ApproxNnIndex::Answer ApproxNnIndex::Query(const Collection& x,
                                           std::span<const float> q) const {
  Answer answer;
  std::optional<PlebAnswer> found;
  std::size_t found_level = 0;
  Neighbor best_seen{0, std::numeric_limits<double>::infinity()};
  auto probe = [&](std::size_t level) {
    const auto a = levels_[level].Pleb(x, q, radii_[level], eps_);
    answer.visited += a.visited;
    if (a.yes && a.witness.score < best_seen.score) best_seen = a.witness;
    return a;
  };
  std::size_t lo = 0, hi = radii_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    auto a = probe(mid);
    if (a.yes) {
      found = a;
      found_level = mid;
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (!found || found_level != lo) {
    auto a = probe(lo);
    if (a.yes) {
      found = a;
      found_level = lo;
    }
  }
  if (found) {
    answer.neighbor = {found->witness.id, L2Squared(q, x.row(found->witness.id))};
    answer.level = found_level;
    return answer;
  }
  // No level answered yes: scan exhaustively and flag it.
  answer.fallback = true;
  answer.level = radii_.size() - 1;
  const auto exact = BruteForceTopK(x, q, 1, DistanceKind::kL2Squared);
  answer.neighbor = exact.neighbors.front();
  return answer;
}

void ApproxNnIndex::Save(BinaryWriter& w) const {
  w.PutVector(radii_);
  w.Put<std::uint64_t>(params_.ell);
  w.Put<std::uint64_t>(params_.tables);
  w.Put(params_.rho);
  w.Put(eps_);
  w.Put(min_dist_);
  w.Put(max_dist_);
  w.Put<std::uint64_t>(levels_.size());
  for (const auto& l : levels_) l.Save(w);
}

ApproxNnIndex ApproxNnIndex::Load(BinaryReader& r) {
  ApproxNnIndex index;
  index.radii_ = r.GetVector<double>();
  index.params_.ell = r.Get<std::uint64_t>();
  index.params_.tables = r.Get<std::uint64_t>();
  index.params_.rho = r.Get<double>();
  index.eps_ = r.Get<double>();
  index.min_dist_ = r.Get<double>();
  index.max_dist_ = r.Get<double>();
  const auto n = r.Get<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) index.levels_.push_back(LshIndex::Load(r));
  return index;
}

MipsHashIndex MipsHashIndex::Build(const Collection& x, std::size_t ell,
                                   std::size_t tables, std::uint64_t seed) {
  MipsHashIndex index;
  index.transform_ = transforms::MipsToMcs(x);
  index.index_ = LshIndex::Build(index.transform_.data, FamilyKind::kHyperplane,
                                 ell, tables, seed, 1.0, DistanceKind::kAngular);
  return index;
}

std::vector<VectorId> MipsHashIndex::Candidates(std::span<const float> q) const {
  return index_.Candidates(transform_.MapQuery(q));
}

TopKResult MipsHashIndex::Search(const Collection& x, std::span<const float> q,
                                 std::size_t k) const {
  return ScanCandidates(x, q, Candidates(q), k, DistanceKind::kNegInnerProduct);
}

void MipsHashIndex::Save(BinaryWriter& w) const {
  w.Put(static_cast<std::uint8_t>(transform_.kind));
  w.Put(transform_.data_scale);
  w.PutCollection(transform_.data);
  index_.Save(w);
}

MipsHashIndex MipsHashIndex::Load(BinaryReader& r) {
  MipsHashIndex index;
  index.transform_.kind = static_cast<transforms::TransformKind>(r.Get<std::uint8_t>());
  index.transform_.target_kind = DistanceKind::kAngular;
  index.transform_.data_scale = r.Get<double>();
  index.transform_.data = r.GetCollection();
  index.transform_.output_dim = index.transform_.data.dim();
  index.index_ = LshIndex::Load(r);
  return index;
}

}  // namespace annkit::lsh
