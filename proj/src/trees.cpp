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

#include "annkit/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace annkit::trees {

// ---------------------------------------------------------------------------
// k-d tree
// ---------------------------------------------------------------------------

KdTree KdTree::Build(const Collection& x, std::size_t leaf_size) {
  x.Validate();
  ANNKIT_CHECK(leaf_size >= 1, ErrorCode::kInvalidArgument,
               "kd-tree: leaf size must be >= 1");
  KdTree t;
  t.leaf_size_ = leaf_size;
  t.ids_.resize(x.size());
  std::iota(t.ids_.begin(), t.ids_.end(), 0u);
  t.BuildNode(x, 0, static_cast<std::uint32_t>(x.size()), 0);
  return t;
}

std::int32_t KdTree::BuildNode(const Collection& x, std::uint32_t begin,
                               std::uint32_t end, std::size_t depth) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  const std::uint32_t n = end - begin;
  if (n <= leaf_size_) {
    nodes_[index].begin = begin;
    nodes_[index].end = end;
    return index;
  }
  const auto axis = static_cast<std::uint32_t>(depth % x.dim());
  auto first = ids_.begin() + begin, last = ids_.begin() + end;
  std::sort(first, last, [&](VectorId a, VectorId b) {
    const float va = x.row(a)[axis], vb = x.row(b)[axis];
    return va < vb || (va == vb && a < b);
  });
  // Lower median. Ties with the median value go right, except the median
  // element itself, so the left side is never empty and never everything.
  const std::uint32_t med = (n - 1) / 2;
  const VectorId median_id = *(first + med);
  const float split = x.row(median_id)[axis];
  auto strictly_less = std::stable_partition(
      first, last, [&](VectorId id) { return x.row(id)[axis] < split; });
  auto median_pos = std::find(strictly_less, last, median_id);
  std::rotate(strictly_less, median_pos, median_pos + 1);
  const auto left_count =
      static_cast<std::uint32_t>(strictly_less - first) + 1;

  nodes_[index].axis = axis;
  nodes_[index].split = split;
  const auto l = BuildNode(x, begin, begin + left_count, depth + 1);
  const auto r = BuildNode(x, begin + left_count, end, depth + 1);
  nodes_[index].left = l;
  nodes_[index].right = r;
  return index;
}

TopKResult KdTree::Search(const Collection& x, std::span<const float> q,
                          std::size_t k, SearchStats* stats) const {
  ANNKIT_CHECK(k >= 1, ErrorCode::kInvalidArgument, "kd-tree: k must be >= 1");
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "kd-tree: query dimension mismatch");
  TopKCollector top(std::min(k, x.size()));
  std::function<void(std::int32_t)> visit = [&](std::int32_t i) {
    const Node& node = nodes_[i];
    if (node.leaf()) {
      for (std::uint32_t p = node.begin; p < node.end; ++p)
        top.Push(ids_[p], L2Squared(q, x.row(ids_[p])));
      if (stats) stats->evaluations += node.end - node.begin;
      return;
    }
    const double diff = double(q[node.axis]) - double(node.split);
    const std::int32_t near = diff <= 0.0 ? node.left : node.right;
    const std::int32_t far = diff <= 0.0 ? node.right : node.left;
    visit(near);
    // Far side points lie on the other side of the split plane.
    if (diff * diff <= top.WorstScore()) visit(far);
  };
  visit(0);
  auto out = std::move(top).Finish();
  out.k = k;
  return out;
}

std::size_t KdTree::depth() const {
  std::function<std::size_t(std::int32_t)> rec = [&](std::int32_t i) -> std::size_t {
    if (nodes_[i].leaf()) return 0;
    return 1 + std::max(rec(nodes_[i].left), rec(nodes_[i].right));
  };
  return nodes_.empty() ? 0 : rec(0);
}

void KdTree::Save(BinaryWriter& w) const {
  w.Put<std::uint64_t>(leaf_size_);
  w.PutVector(ids_);
  w.Put<std::uint64_t>(nodes_.size());
  for (const auto& n : nodes_) {
    w.Put(n.axis);
    w.Put(n.split);
    w.Put(n.left);
    w.Put(n.right);
    w.Put(n.begin);
    w.Put(n.end);
  }
}

KdTree KdTree::Load(BinaryReader& r) {
  KdTree t;
  t.leaf_size_ = r.Get<std::uint64_t>();
  t.ids_ = r.GetVector<VectorId>();
  t.nodes_.resize(r.Get<std::uint64_t>());
  for (auto& n : t.nodes_) {
    n.axis = r.Get<std::uint32_t>();
    n.split = r.Get<float>();
    n.left = r.Get<std::int32_t>();
    n.right = r.Get<std::int32_t>();
    n.begin = r.Get<std::uint32_t>();
    n.end = r.Get<std::uint32_t>();
  }
  return t;
}

// ---------------------------------------------------------------------------
// RP and spill trees
// ---------------------------------------------------------------------------

ProjectionTree ProjectionTree::Build(const Collection& x,
                                     const Options& options) {
  x.Validate();
  ANNKIT_CHECK(options.leaf_size >= 1, ErrorCode::kInvalidArgument,
               "rp-tree: leaf size must be >= 1");
  if (options.spill_alpha) {
    ANNKIT_CHECK(*options.spill_alpha >= 0.0 && *options.spill_alpha < 0.5,
                 ErrorCode::kInvalidArgument,
                 "spill-tree: alpha must lie in [0, 1/2)");
  }
  if (options.fixed_beta) {
    ANNKIT_CHECK(*options.fixed_beta >= 0.25 && *options.fixed_beta <= 0.75,
                 ErrorCode::kInvalidArgument,
                 "rp-tree: beta must lie in [1/4, 3/4]");
  }
  ProjectionTree t;
  t.spill_alpha_ = options.spill_alpha.value_or(-1.0);
  Rng rng(options.seed);
  std::vector<VectorId> ids(x.size());
  std::iota(ids.begin(), ids.end(), 0u);
  t.BuildNode(x, std::move(ids), options, rng);
  return t;
}

ProjectionTree ProjectionTree::BuildRp(const Collection& x,
                                       std::size_t leaf_size,
                                       std::uint64_t seed) {
  return Build(x, Options{leaf_size, seed, std::nullopt, std::nullopt});
}

ProjectionTree ProjectionTree::BuildSpill(const Collection& x,
                                          std::size_t leaf_size, double alpha,
                                          std::uint64_t seed) {
  return Build(x, Options{leaf_size, seed, alpha, std::nullopt});
}

std::int32_t ProjectionTree::BuildNode(const Collection& x,
                                       std::vector<VectorId> ids,
                                       const Options& options, Rng& rng) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  const std::size_t n = ids.size();
  nodes_[index].size = static_cast<std::uint32_t>(n);
  if (n <= options.leaf_size || n < 2) {
    std::sort(ids.begin(), ids.end());
    nodes_[index].ids = std::move(ids);
    return index;
  }
  std::vector<float> dir = rng.UnitDirection(x.dim());
  std::vector<std::pair<double, VectorId>> proj(n);
  for (std::size_t i = 0; i < n; ++i)
    proj[i] = {Dot(dir, x.row(ids[i])), ids[i]};
  std::sort(proj.begin(), proj.end());

  std::size_t left_end, right_begin, threshold_pos;
  const std::size_t half = (n + 1) / 2;
  if (options.spill_alpha) {
    const double alpha = *options.spill_alpha;
    left_end = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil((0.5 + alpha) * n - 1e-9)), n - 1);
    left_end = std::max(left_end, half);
    right_begin = std::max<std::size_t>(2 * half - left_end, 1);
    threshold_pos = half - 1;
  } else {
    const double beta = options.fixed_beta ? *options.fixed_beta
                                           : rng.Uniform(0.25, 0.75);
    const auto lo = static_cast<std::size_t>(std::ceil(n / 4.0));
    const auto hi = static_cast<std::size_t>(std::floor(3.0 * n / 4.0));
    std::size_t count = static_cast<std::size_t>(std::lround(beta * n));
    count = std::clamp(count, std::max<std::size_t>(lo, 1),
                       std::min<std::size_t>(hi, n - 1));
    left_end = right_begin = count;
    threshold_pos = count - 1;
  }
  std::vector<VectorId> left, right;
  for (std::size_t i = 0; i < left_end; ++i) left.push_back(proj[i].second);
  for (std::size_t i = right_begin; i < n; ++i) right.push_back(proj[i].second);

  nodes_[index].threshold = proj[threshold_pos].first;
  nodes_[index].direction = std::move(dir);
  const auto l = BuildNode(x, std::move(left), options, rng);
  const auto r = BuildNode(x, std::move(right), options, rng);
  nodes_[index].left = l;
  nodes_[index].right = r;
  return index;
}

std::span<const VectorId> ProjectionTree::Route(std::span<const float> q) const {
  std::int32_t i = 0;
  while (!nodes_[i].leaf()) {
    const auto& node = nodes_[i];
    i = Dot(node.direction, q) <= node.threshold ? node.left : node.right;
  }
  return nodes_[i].ids;
}

TopKResult ProjectionTree::DefeatistSearch(const Collection& x,
                                           std::span<const float> q,
                                           std::size_t k,
                                           DistanceKind kind) const {
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "rp-tree: query dimension mismatch");
  return ScanCandidates(x, q, Route(q), k, kind);
}

std::size_t ProjectionTree::TotalLeafIds() const {
  std::size_t total = 0;
  for (const auto& n : nodes_)
    if (n.leaf()) total += n.ids.size();
  return total;
}

void ProjectionTree::Save(BinaryWriter& w) const {
  w.Put(spill_alpha_);
  w.Put<std::uint64_t>(nodes_.size());
  for (const auto& n : nodes_) {
    w.PutVector(n.direction);
    w.Put(n.threshold);
    w.Put(n.left);
    w.Put(n.right);
    w.PutVector(n.ids);
    w.Put(n.size);
  }
}

ProjectionTree ProjectionTree::Load(BinaryReader& r) {
  ProjectionTree t;
  t.spill_alpha_ = r.Get<double>();
  t.nodes_.resize(r.Get<std::uint64_t>());
  for (auto& n : t.nodes_) {
    n.direction = r.GetVector<float>();
    n.threshold = r.Get<double>();
    n.left = r.Get<std::int32_t>();
    n.right = r.Get<std::int32_t>();
    n.ids = r.GetVector<VectorId>();
    n.size = r.Get<std::uint32_t>();
  }
  return t;
}

Forest Forest::Build(const Collection& x, std::size_t trees,
                     const ProjectionTree::Options& options) {
  ANNKIT_CHECK(trees >= 1, ErrorCode::kInvalidArgument,
               "forest: at least one tree required");
  Forest f;
  for (std::size_t t = 0; t < trees; ++t) {
    auto opts = options;
    opts.seed = HashCombine(options.seed, t);
    f.trees_.push_back(ProjectionTree::Build(x, opts));
  }
  return f;
}

std::vector<VectorId> Forest::Candidates(std::span<const float> q) const {
  std::vector<VectorId> ids;
  for (const auto& t : trees_) {
    auto leaf = t.Route(q);
    ids.insert(ids.end(), leaf.begin(), leaf.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

TopKResult Forest::Search(const Collection& x, std::span<const float> q,
                          std::size_t k, DistanceKind kind) const {
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "forest: query dimension mismatch");
  return ScanCandidates(x, q, Candidates(q), k, kind);
}

void Forest::Save(BinaryWriter& w) const {
  w.Put<std::uint64_t>(trees_.size());
  for (const auto& t : trees_) t.Save(w);
}

Forest Forest::Load(BinaryReader& r) {
  Forest f;
  const auto n = r.Get<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) f.trees_.push_back(ProjectionTree::Load(r));
  return f;
}

double PotentialPhi(const Collection& x, std::span<const float> q,
                    std::size_t s) {
  ANNKIT_CHECK(s >= 2 && s <= x.size(), ErrorCode::kInvalidArgument,
               "potential: s must satisfy 2 <= s <= m");
  std::vector<double> dist(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    dist[i] = std::sqrt(L2Squared(q, x.row(i)));
  std::partial_sort(dist.begin(), dist.begin() + s, dist.end());
  ANNKIT_CHECK(dist[0] > 0.0, ErrorCode::kInvalidArgument,
               "potential: query coincides with its nearest neighbor");
  double sum = 0.0;
  for (std::size_t i = 0; i < s; ++i) sum += dist[0] / dist[i];
  return sum / static_cast<double>(s);
}

// ---------------------------------------------------------------------------
// Cover tree
// ---------------------------------------------------------------------------

namespace {

double Radius(std::int32_t level) { return std::ldexp(1.0, level); }

double Metric(const Collection& x, std::span<const float> q, VectorId id) {
  return std::sqrt(L2Squared(q, x.row(id)));
}

struct Candidate {
  std::int32_t node;
  double dist;
};

}  // namespace

void CoverTree::ChildrenAt(std::int32_t node, std::int32_t level,
                           std::vector<std::int32_t>& out) const {
  const auto& ch = nodes_[node].children;
  // Children are sorted by level, descending.
  auto lo = std::partition_point(ch.begin(), ch.end(), [&](std::int32_t c) {
    return nodes_[c].level > level - 1;
  });
  for (auto it = lo; it != ch.end() && nodes_[*it].level == level - 1; ++it)
    out.push_back(*it);
}

CoverTree CoverTree::Build(const Collection& x) {
  x.Validate();
  CoverTree t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (t.Insert(x, static_cast<VectorId>(i)) == InsertResult::kDuplicate)
      ++t.duplicates_;
  }
  return t;
}

CoverTree::InsertResult CoverTree::Insert(const Collection& x, VectorId id) {
  const auto p = x.row(id);
  if (nodes_.empty()) {
    nodes_.push_back(Node{id, 0, kNoChild, {}});
    min_level_ = 0;
    return InsertResult::kInserted;
  }
  const double to_root = Metric(x, p, nodes_[0].id);
  if (to_root == 0.0) return InsertResult::kDuplicate;
  if (nodes_.size() == 1) {
    nodes_[0].level = static_cast<std::int32_t>(std::ceil(std::log2(to_root)));
    min_level_ = nodes_[0].level;
  }
  // The root is its own ancestor on every level above; raising it is free.
  while (Radius(nodes_[0].level) < to_root) ++nodes_[0].level;

  std::int32_t level = nodes_[0].level;
  std::vector<Candidate> current{{0, to_root}};
  std::int32_t parent = kNoChild;
  std::int32_t parent_level = level;
  std::vector<std::int32_t> kids;
  std::vector<Candidate> next;
  while (true) {
    // Children of the current cover set: the set itself plus nodes whose top
    // level is level - 1.
    next = current;
    for (const auto& c : current) {
      kids.clear();
      ChildrenAt(c.node, level, kids);
      for (auto k : kids) {
        const double dist = Metric(x, p, nodes_[k].id);
        if (dist == 0.0) return InsertResult::kDuplicate;
        next.push_back({k, dist});
      }
    }
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& c : next) closest = std::min(closest, c.dist);
    const double radius = Radius(level);
    if (closest > radius) break;
    // This level's call did not fail; it is a valid parent level if the
    // current cover set is itself within reach.
    const Candidate* best = nullptr;
    for (const auto& c : current) {
      if (c.dist <= radius && (best == nullptr || c.dist < best->dist ||
                               (c.dist == best->dist && c.node < best->node)))
        best = &c;
    }
    if (best != nullptr) {
      parent = best->node;
      parent_level = level;
    }
    current.clear();
    for (const auto& c : next)
      if (c.dist <= radius) current.push_back(c);
    --level;
  }
  ANNKIT_CHECK(parent != kNoChild, ErrorCode::kInvalidArgument,
               "cover tree: insertion found no parent");
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{id, parent_level - 1, parent, {}});
  auto& ch = nodes_[parent].children;
  auto pos = std::partition_point(ch.begin(), ch.end(), [&](std::int32_t c) {
    return nodes_[c].level >= parent_level - 1;
  });
  ch.insert(pos, index);
  min_level_ = std::min(min_level_, parent_level - 1);
  return InsertResult::kInserted;
}

TopKResult CoverTree::Search(const Collection& x, std::span<const float> q,
                             std::size_t k, SearchStats* stats) const {
  ANNKIT_CHECK(!nodes_.empty(), ErrorCode::kEmpty, "cover tree: empty tree");
  ANNKIT_CHECK(k >= 1, ErrorCode::kInvalidArgument, "cover tree: k must be >= 1");
  ANNKIT_CHECK(q.size() == x.dim(), ErrorCode::kDimensionMismatch,
               "cover tree: query dimension mismatch");
  std::vector<Candidate> current{{0, Metric(x, q, nodes_[0].id)}};
  if (stats) stats->evaluations += 1;
  std::vector<Candidate> next;
  std::vector<std::int32_t> kids;
  std::vector<double> dists;
  for (std::int32_t level = nodes_[0].level; level > min_level_; --level) {
    next = current;
    for (const auto& c : current) {
      kids.clear();
      ChildrenAt(c.node, level, kids);
      for (auto kid : kids) next.push_back({kid, Metric(x, q, nodes_[kid].id)});
      if (stats) stats->evaluations += kids.size();
    }
    // Any k members of the set bound the k-th nearest distance from above.
    dists.clear();
    for (const auto& c : next) dists.push_back(c.dist);
    double kth = std::numeric_limits<double>::infinity();
    if (dists.size() >= k) {
      std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
      kth = dists[k - 1];
    }
    const double bound = kth + Radius(level);
    current.clear();
    for (const auto& c : next)
      if (c.dist <= bound) current.push_back(c);
  }
  TopKCollector top(std::min(k, x.size()));
  for (const auto& c : current)
    top.Push(nodes_[c.node].id, L2Squared(q, x.row(nodes_[c.node].id)));
  auto out = std::move(top).Finish();
  out.k = k;
  return out;
}

Neighbor CoverTree::SearchApprox(const Collection& x, std::span<const float> q,
                                 double eps, SearchStats* stats) const {
  ANNKIT_CHECK(!nodes_.empty(), ErrorCode::kEmpty, "cover tree: empty tree");
  ANNKIT_CHECK(eps > 0.0, ErrorCode::kInvalidArgument,
               "cover tree: eps must be > 0");
  std::vector<Candidate> current{{0, Metric(x, q, nodes_[0].id)}};
  if (stats) stats->evaluations += 1;
  std::vector<Candidate> next;
  std::vector<std::int32_t> kids;
  auto closest_of = [](const std::vector<Candidate>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : set) best = std::min(best, c.dist);
    return best;
  };
  for (std::int32_t level = nodes_[0].level; level > min_level_; --level) {
    if (closest_of(current) >= Radius(level + 1) * (1.0 + 1.0 / eps)) break;
    next = current;
    for (const auto& c : current) {
      kids.clear();
      ChildrenAt(c.node, level, kids);
      for (auto kid : kids) next.push_back({kid, Metric(x, q, nodes_[kid].id)});
      if (stats) stats->evaluations += kids.size();
    }
    const double bound = closest_of(next) + Radius(level);
    current.clear();
    for (const auto& c : next)
      if (c.dist <= bound) current.push_back(c);
  }
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  for (const auto& c : current) {
    const Neighbor n{nodes_[c.node].id, L2Squared(q, x.row(nodes_[c.node].id))};
    if (NeighborLess(n, best)) best = n;
  }
  return best;
}

CoverTree::InvariantReport CoverTree::CheckInvariants(const Collection& x) const {
  InvariantReport report;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    const auto& parent = nodes_[node.parent];
    if (parent.level <= node.level) ++report.nesting_violations;
    const double dist = Metric(x, x.row(node.id), parent.id);
    if (dist > Radius(node.level + 1)) ++report.covering_violations;
  }
  for (std::int32_t level = root_level(); level >= min_level_; --level) {
    std::vector<VectorId> members;
    for (const auto& n : nodes_)
      if (n.level >= level || &n == &nodes_[0]) members.push_back(n.id);
    const double radius = Radius(level);
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (Metric(x, x.row(members[a]), members[b]) <= radius)
          ++report.separation_violations;
  }
  return report;
}

void CoverTree::Save(BinaryWriter& w) const {
  w.Put(min_level_);
  w.Put<std::uint64_t>(duplicates_);
  w.Put<std::uint64_t>(nodes_.size());
  for (const auto& n : nodes_) {
    w.Put(n.id);
    w.Put(n.level);
    w.Put(n.parent);
    w.PutVector(n.children);
  }
}

CoverTree CoverTree::Load(BinaryReader& r) {
  CoverTree t;
  t.min_level_ = r.Get<std::int32_t>();
  t.duplicates_ = r.Get<std::uint64_t>();
  t.nodes_.resize(r.Get<std::uint64_t>());
  for (auto& n : t.nodes_) {
    n.id = r.Get<VectorId>();
    n.level = r.Get<std::int32_t>();
    n.parent = r.Get<std::int32_t>();
    n.children = r.GetVector<std::int32_t>();
  }
  return t;
}

}  // namespace annkit::trees
