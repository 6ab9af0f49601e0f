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

#include "annkit/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "annkit/random.hpp"

namespace annkit::sketch {
namespace {

constexpr std::uint64_t kJlSalt = 0x4a4c;
constexpr std::uint64_t kThresholdSalt = 0x7468;

void Touch(AsymSketch& s, std::vector<std::uint8_t>& touched, std::size_t k,
           float v) {
  if (!touched[k]) {
    touched[k] = 1;
    s.upper[k] = v;
    if (!s.lower.empty()) s.lower[k] = v;
    return;
  }
  s.upper[k] = std::max(s.upper[k], v);
  if (!s.lower.empty()) s.lower[k] = std::min(s.lower[k], v);
}

AsymSketch Blank(std::uint32_t dim, std::size_t out_dim, std::size_t hashes,
                 std::uint64_t seed, AsymMode mode) {
  ANNKIT_CHECK(out_dim >= 2 && out_dim % 2 == 0, ErrorCode::kInvalidArgument,
               "asym sketch: d_out must be even and >= 2");
  ANNKIT_CHECK(hashes >= 1, ErrorCode::kInvalidArgument,
               "asym sketch: need at least one mapping");
  AsymSketch s;
  s.mode = mode;
  s.dim = dim;
  s.out_dim = out_dim;
  s.hashes = hashes;
  s.seed = seed;
  s.upper.assign(out_dim / 2, 0.0f);
  if (mode != AsymMode::kPositive) s.lower.assign(out_dim / 2, 0.0f);
  return s;
}

// Contribution of q_i against the sketched bounds of u_i.
double Term(const AsymSketch& s, std::size_t i, double qi) {
  const std::size_t half = s.out_dim / 2;
  if (qi > 0.0) {
    double least = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < s.hashes; ++o)
      least = std::min<double>(least, s.upper[AsymBucket(s.seed, o, i, half)]);
    return qi * least;
  }
  // u_i > 0 in positive mode, so 0 is a valid lower bound.
  if (s.mode == AsymMode::kPositive) return 0.0;
  double greatest = -std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < s.hashes; ++o)
    greatest = std::max<double>(greatest, s.lower[AsymBucket(s.seed, o, i, half)]);
  return qi * greatest;
}

double SquaredNormOn(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0.0f && b[i] != 0.0f) s += static_cast<double>(a[i]) * a[i];
  return s;
}

}  // namespace

JlSketcher::JlSketcher(std::size_t out_dim, std::uint64_t seed)
    : out_dim_(out_dim), seed_(seed) {
  ANNKIT_CHECK(out_dim >= 1, ErrorCode::kInvalidArgument, "jl: d_out must be >= 1");
  scale_ = static_cast<float>(1.0 / std::sqrt(static_cast<double>(out_dim)));
}

float JlSketcher::Entry(std::size_t row, std::size_t col) const {
  const auto h = HashCombine(seed_ ^ kJlSalt, row, col);
  return (h >> 63) ? scale_ : -scale_;
}

std::vector<float> JlSketcher::Project(std::span<const float> u) const {
  std::vector<float> out(out_dim_);
  for (std::size_t r = 0; r < out_dim_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c)
      if (u[c] != 0.0f) s += static_cast<double>(Entry(r, c)) * u[c];
    out[r] = static_cast<float>(s);
  }
  return out;
}

double JlInnerProduct(std::span<const float> su, std::span<const float> sv) {
  ANNKIT_CHECK(su.size() == sv.size(), ErrorCode::kDimensionMismatch,
               "jl: sketch size mismatch");
  return Dot(su, sv);
}

double JlVariance(std::span<const float> u, std::span<const float> v,
                  std::size_t out_dim) {
  double cross = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double p = static_cast<double>(u[i]) * v[i];
    cross += p * p;
  }
  const double ip = Dot(u, v);
  return (SquaredNorm(u) * SquaredNorm(v) + ip * ip - 2.0 * cross) /
         static_cast<double>(out_dim);
}

void AsymSketch::Save(BinaryWriter& w) const {
  w.Put(static_cast<std::uint8_t>(mode));
  w.Put(dim);
  w.Put<std::uint64_t>(out_dim);
  w.Put<std::uint64_t>(hashes);
  w.Put(seed);
  w.PutVector(nz);
  w.PutVector(upper);
  w.PutVector(lower);
}

AsymSketch AsymSketch::Load(BinaryReader& r) {
  AsymSketch s;
  s.mode = static_cast<AsymMode>(r.Get<std::uint8_t>());
  s.dim = r.Get<std::uint32_t>();
  s.out_dim = r.Get<std::uint64_t>();
  s.hashes = r.Get<std::uint64_t>();
  s.seed = r.Get<std::uint64_t>();
  s.nz = r.GetVector<std::uint32_t>();
  s.upper = r.GetVector<float>();
  s.lower = r.GetVector<float>();
  return s;
}

std::size_t AsymBucket(std::uint64_t seed, std::size_t o, std::size_t i,
                       std::size_t half) {
  return static_cast<std::size_t>(HashCombine(seed, o, i) % half);
}

AsymSketch MakeAsymSketch(const SparseVector& u, std::size_t out_dim,
                          std::size_t hashes, std::uint64_t seed,
                          AsymMode mode) {
  u.Validate();
  if (mode == AsymMode::kDense) return MakeAsymSketch(u.ToDense(), out_dim, hashes, seed, mode);
  AsymSketch s = Blank(u.dim, out_dim, hashes, seed, mode);
  std::vector<std::uint8_t> touched(out_dim / 2, 0);
  s.nz = u.indices;
  for (std::size_t n = 0; n < u.indices.size(); ++n) {
    ANNKIT_CHECK(mode != AsymMode::kPositive || u.values[n] > 0.0f,
                 ErrorCode::kInvalidArgument,
                 "asym sketch: positive mode requires non-negative input");
    for (std::size_t o = 0; o < hashes; ++o)
      Touch(s, touched, AsymBucket(seed, o, u.indices[n], out_dim / 2), u.values[n]);
  }
  return s;
}

AsymSketch MakeAsymSketch(std::span<const float> u, std::size_t out_dim,
                          std::size_t hashes, std::uint64_t seed,
                          AsymMode mode) {
  if (mode != AsymMode::kDense)
    return MakeAsymSketch(SparseVector::FromDense(u), out_dim, hashes, seed, mode);
  AsymSketch s = Blank(static_cast<std::uint32_t>(u.size()), out_dim, hashes, seed, mode);
  std::vector<std::uint8_t> touched(out_dim / 2, 0);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t o = 0; o < hashes; ++o)
      Touch(s, touched, AsymBucket(seed, o, i, out_dim / 2), u[i]);
  return s;
}

double AsymUpperBound(const SparseVector& q, const AsymSketch& s) {
  ANNKIT_CHECK(q.dim == s.dim, ErrorCode::kDimensionMismatch,
               "asym bound: dimension mismatch");
  double total = 0.0;
  for (std::size_t n = 0; n < q.indices.size(); ++n) {
    const auto i = q.indices[n];
    if (s.mode != AsymMode::kDense &&
        !std::binary_search(s.nz.begin(), s.nz.end(), i))
      continue;
    total += Term(s, i, q.values[n]);
  }
  return total;
}

double AsymUpperBound(std::span<const float> q, const AsymSketch& s) {
  return AsymUpperBound(SparseVector::FromDense(q), s);
}

void ThresholdSketch::Save(BinaryWriter& w) const {
  w.PutVector(indices);
  w.PutVector(values);
  w.Put(norm_sq);
  w.Put<std::uint64_t>(out_dim);
  w.Put(seed);
}

ThresholdSketch ThresholdSketch::Load(BinaryReader& r) {
  ThresholdSketch s;
  s.indices = r.GetVector<std::uint32_t>();
  s.values = r.GetVector<float>();
  s.norm_sq = r.Get<double>();
  s.out_dim = r.Get<std::uint64_t>();
  s.seed = r.Get<std::uint64_t>();
  return s;
}

double ThresholdHash(std::uint64_t seed, std::size_t i) {
  return HashToUnit(HashCombine(seed ^ kThresholdSalt, i));
}

ThresholdSketch MakeThresholdSketch(const SparseVector& u, std::size_t out_dim,
                                    std::uint64_t seed) {
  u.Validate();
  ThresholdSketch s;
  s.out_dim = out_dim;
  s.seed = seed;
  for (float v : u.values) s.norm_sq += static_cast<double>(v) * v;
  ANNKIT_CHECK(s.norm_sq > 0.0, ErrorCode::kInvalidArgument,
               "threshold sketch: zero vector");
  for (std::size_t n = 0; n < u.indices.size(); ++n) {
    const double v = u.values[n];
    const double theta = static_cast<double>(out_dim) * v * v / s.norm_sq;
    if (ThresholdHash(seed, u.indices[n]) <= theta) {
      s.indices.push_back(u.indices[n]);
      s.values.push_back(u.values[n]);
    }
  }
  return s;
}

ThresholdSketch MakeThresholdSketch(std::span<const float> u,
                                    std::size_t out_dim, std::uint64_t seed) {
  return MakeThresholdSketch(SparseVector::FromDense(u), out_dim, seed);
}

double ThresholdInnerProduct(const ThresholdSketch& a, const ThresholdSketch& b) {
  ANNKIT_CHECK(a.seed == b.seed && a.out_dim == b.out_dim,
               ErrorCode::kInvalidArgument,
               "threshold sketch: sketches must share the hash and size");
  const double d_out = static_cast<double>(a.out_dim);
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (b.indices[j] < a.indices[i]) {
      ++j;
    } else {
      const double u = a.values[i], v = b.values[j];
      const double p = std::min({1.0, d_out * u * u / a.norm_sq, d_out * v * v / b.norm_sq});
      s += u * v / p;
      ++i;
      ++j;
    }
  }
  return s;
}

double ThresholdVarianceBound(std::span<const float> u, std::span<const float> v,
                              std::size_t out_dim) {
  const double a = SquaredNormOn(u, v) * SquaredNorm(v);
  const double b = SquaredNorm(u) * SquaredNormOn(v, u);
  return 2.0 / static_cast<double>(out_dim) * std::max(a, b);
}

}  // namespace annkit::sketch
