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
#include "annkit/serialize.hpp"

namespace annkit::sketch {

/// Rademacher projection Phi = R / sqrt(d_out); R(row, col) is a hash of
/// (seed, row, col), so no matrix is stored.
class JlSketcher {
 public:
  JlSketcher(std::size_t out_dim, std::uint64_t seed);

  float Entry(std::size_t row, std::size_t col) const;
  std::vector<float> Project(std::span<const float> u) const;

  std::size_t out_dim() const { return out_dim_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t out_dim_;
  std::uint64_t seed_;
  float scale_;
};

// Plain inner product of two projections.
double JlInnerProduct(std::span<const float> su, std::span<const float> sv);
// (1/d_out)(||u||^2 ||v||^2 + <u,v>^2 - 2 sum u_i^2 v_i^2).
double JlVariance(std::span<const float> u, std::span<const float> v,
                  std::size_t out_dim);

enum class AsymMode : std::uint8_t {
  kSigned = 0,    // nz, upper and lower
  kPositive = 1,  // nz and upper; input must be non-negative
  kDense = 2,     // upper and lower over every coordinate, no nz
};

struct AsymSketch {
  AsymMode mode = AsymMode::kSigned;
  std::uint32_t dim = 0;
  std::size_t out_dim = 0;  // d_out; each bound vector has d_out / 2 entries
  std::size_t hashes = 1;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> nz;
  std::vector<float> upper;
  std::vector<float> lower;  // empty in positive mode

  void Save(BinaryWriter& w) const;
  static AsymSketch Load(BinaryReader& r);
  bool operator==(const AsymSketch&) const = default;
};

// pi_o(i) in [0, half).
std::size_t AsymBucket(std::uint64_t seed, std::size_t o, std::size_t i,
                       std::size_t half);

AsymSketch MakeAsymSketch(const SparseVector& u, std::size_t out_dim,
                          std::size_t hashes, std::uint64_t seed,
                          AsymMode mode = AsymMode::kSigned);
AsymSketch MakeAsymSketch(std::span<const float> u, std::size_t out_dim,
                          std::size_t hashes, std::uint64_t seed,
                          AsymMode mode = AsymMode::kSigned);

/// Upper bound on <q, u>: each shared coordinate contributes q_i times the
/// least upper bound of u_i (q_i > 0) or the greatest lower bound (q_i < 0).
double AsymUpperBound(const SparseVector& q, const AsymSketch& s);
double AsymUpperBound(std::span<const float> q, const AsymSketch& s);

struct ThresholdSketch {
  std::vector<std::uint32_t> indices;
  std::vector<float> values;
  double norm_sq = 0.0;
  std::size_t out_dim = 0;
  std::uint64_t seed = 0;

  void Save(BinaryWriter& w) const;
  static ThresholdSketch Load(BinaryReader& r);
  bool operator==(const ThresholdSketch&) const = default;
};

// Shared uniform hash pi(i) in (0, 1].
double ThresholdHash(std::uint64_t seed, std::size_t i);

// Keeps i iff pi(i) <= d_out u_i^2 / ||u||^2. Requires u != 0.
ThresholdSketch MakeThresholdSketch(const SparseVector& u, std::size_t out_dim,
                                    std::uint64_t seed);
ThresholdSketch MakeThresholdSketch(std::span<const float> u,
                                    std::size_t out_dim, std::uint64_t seed);

// sum over I_u cap I_v of u_i v_i / min(1, d_out u_i^2/||u||^2, d_out v_i^2/||v||^2).
double ThresholdInnerProduct(const ThresholdSketch& a, const ThresholdSketch& b);

// (2/d_out) max(||u*||^2 ||v||^2, ||u||^2 ||v*||^2), * = common support.
double ThresholdVarianceBound(std::span<const float> u, std::span<const float> v,
                              std::size_t out_dim);

}  // namespace annkit::sketch
