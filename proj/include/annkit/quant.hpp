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
#include "annkit/ivf.hpp"
#include "annkit/serialize.hpp"

namespace annkit::quant {

using Code = std::vector<std::uint32_t>;

// ---- Vector quantization -------------------------------------------------

struct VqModel {
  Collection codebook;
  std::vector<double> objective;

  std::uint32_t Encode(std::span<const float> u) const;
  std::span<const float> Decode(std::uint32_t code) const {
    return codebook.row(code);
  }
  // Mean squared reconstruction error over x.
  double Mse(const Collection& x) const;
};

VqModel TrainVq(const Collection& x, std::size_t codewords,
                std::size_t max_iters, std::uint64_t seed);

// ---- Product quantization ------------------------------------------------

// Per-query L x C table; Distance() sums one entry per subspace.
struct AdcTable {
  std::size_t subspaces = 0;
  std::size_t codewords = 0;
  std::vector<double> values;  // row-major L x C

  double at(std::size_t i, std::size_t j) const { return values[i * codewords + j]; }
  double Distance(std::span<const std::uint32_t> code) const;
};

/// L codebooks of C codewords over contiguous chunks of width d / L.
class PqCodebook {
 public:
  PqCodebook() = default;
  PqCodebook(std::size_t dim, std::size_t subspaces, std::size_t codewords,
             std::vector<float> values);

  std::size_t dim() const { return dim_; }
  std::size_t subspaces() const { return subspaces_; }
  std::size_t codewords() const { return codewords_; }
  std::size_t sub_dim() const { return dim_ / subspaces_; }
  std::span<const float> Codeword(std::size_t i, std::size_t j) const;
  std::span<float> MutableCodeword(std::size_t i, std::size_t j);
  const std::vector<float>& values() const { return values_; }

  Code Encode(std::span<const float> u) const;
  std::vector<float> Decode(std::span<const std::uint32_t> code) const;
  // Squared Euclidean chunk distances ||S_i q - mu_ij||^2.
  AdcTable BuildAdc(std::span<const float> q) const;

  void Save(BinaryWriter& w) const;
  static PqCodebook Load(BinaryReader& r);
  bool operator==(const PqCodebook&) const = default;

 private:
  std::size_t dim_ = 0;
  std::size_t subspaces_ = 1;
  std::size_t codewords_ = 1;
  std::vector<float> values_;  // [L][C][d / L]
};

// Per-chunk k-means; chunk i uses seed + i.
PqCodebook TrainPq(const Collection& x, std::size_t subspaces,
                   std::size_t codewords, std::size_t max_iters,
                   std::uint64_t seed);

// Bytes per subspace code: ceil(ceil(log2 C) / 8).
std::size_t CodeBytes(std::size_t codewords);
std::vector<std::uint8_t> PackCode(std::span<const std::uint32_t> code,
                                   std::size_t codewords);
Code UnpackCode(std::span<const std::uint8_t> bytes, std::size_t subspaces,
                std::size_t codewords);

// ---- Optimized product quantization --------------------------------------

struct OpqModel {
  std::size_t dim = 0;
  std::vector<double> rotation;  // d x d row-major, y = R u
  PqCodebook pq;
  // ||R U - decode(codes)||_F^2 after initial PQ and after each iteration.
  std::vector<double> objective;
  // max |R R^T - I| after each iteration.
  std::vector<double> orthogonality;

  std::vector<float> Rotate(std::span<const float> u) const;
  Code Encode(std::span<const float> u) const { return pq.Encode(Rotate(u)); }
  // Reconstruction in the original space, R^T decode(code).
  std::vector<float> Decode(std::span<const std::uint32_t> code) const;
  AdcTable BuildAdc(std::span<const float> q) const { return pq.BuildAdc(Rotate(q)); }
  double OrthogonalityError() const;

  void Save(BinaryWriter& w) const;
  static OpqModel Load(BinaryReader& r);
};

/// Starts from identity rotation and plain PQ, then alternates the
/// orthogonal Procrustes update of R with warm-started Lloyd steps on the
/// rotated data. iterations = 0 returns plain PQ.
OpqModel TrainOpq(const Collection& x, std::size_t subspaces,
                  std::size_t codewords, std::size_t iterations,
                  std::uint64_t seed, std::size_t kmeans_iters = 25);

// ---- Additive quantization -----------------------------------------------

struct AqCode {
  Code ids;
  double norm_sq = 0.0;  // ||u||^2, stored exactly
};

class AqCodebook {
 public:
  AqCodebook() = default;
  AqCodebook(std::size_t dim, std::size_t books, std::size_t codewords,
             std::vector<float> values);

  std::size_t dim() const { return dim_; }
  std::size_t books() const { return books_; }
  std::size_t codewords() const { return codewords_; }
  std::span<const float> Codeword(std::size_t i, std::size_t j) const;
  const std::vector<float>& values() const { return values_; }

  std::vector<double> Reconstruct(std::span<const std::uint32_t> code) const;
  double Error(std::span<const float> u, std::span<const std::uint32_t> code) const;
  // Beam search over L rounds; each round extends every tuple by its `beam`
  // closest codewords from each unused codebook and keeps the best `beam`.
  AqCode Encode(std::span<const float> u, std::size_t beam) const;
  // L x C table of <q, mu_ij>.
  AdcTable BuildIpTable(std::span<const float> q) const;
  // ||q||^2 - 2 sum table + stored ||u||^2.
  static double Distance(double q_norm_sq, const AdcTable& table,
                         const AqCode& code);

  void Save(BinaryWriter& w) const;
  static AqCodebook Load(BinaryReader& r);

 private:
  std::size_t dim_ = 0;
  std::size_t books_ = 1;
  std::size_t codewords_ = 1;
  std::vector<float> values_;  // [L][C][d]
};

struct AqModel {
  AqCodebook codebook;
  std::vector<AqCode> codes;
  std::size_t beam = 1;
  // Total squared reconstruction error after initialization and after each
  // outer iteration.
  std::vector<double> error;
};

/// Residual-VQ initialization, then alternating beam re-encoding and the
/// least-squares codeword refit. A step that would raise the error is
/// rejected, so the error trace is non-increasing.
AqModel TrainAq(const Collection& x, std::size_t books, std::size_t codewords,
                std::size_t beam, std::size_t iterations, std::uint64_t seed,
                std::size_t kmeans_iters = 25);

// ---- Score-aware quantization ---------------------------------------------

struct Residual {
  std::vector<double> parallel;
  std::vector<double> perpendicular;
};

// r = u - u_hat split along u and orthogonal to it. Requires ||u|| > 0.
Residual ResidualDecompose(std::span<const float> u, std::span<const float> u_hat);

// eta = (theta/t)^2 / (1 - (theta/t)^2); requires 0 <= theta < t.
double ScoreAwareWeight(double theta, double t);

// eta ||r_par||^2 + ||r_perp||^2.
double ScoreAwareLoss(std::span<const float> u, std::span<const float> u_hat,
                      double eta);

struct ScoreAwareModel {
  Collection codebook;
  std::vector<std::uint32_t> assignment;
  std::vector<double> objective;
  double theta = 0.0;

  // Codeword minimizing the score-aware loss for u.
  std::uint32_t Encode(std::span<const float> u) const;
};

/// Lloyd-style training of the score-aware objective. Assignment minimizes
/// the per-point loss; each centroid is the weighted least-squares minimizer
/// (sum W_u)^+ sum eta_u u with W_u = I + (eta_u - 1) u u^T / ||u||^2.
ScoreAwareModel TrainScoreAwareVq(const Collection& x, std::size_t codewords,
                                  double theta, std::size_t iterations,
                                  std::uint64_t seed);

// ---- IVF with PQ codes ----------------------------------------------------

/// IVF routing over PQ-compressed vectors; candidates are ranked by ADC and
/// optionally the best `rerank` are rescored exactly.
class IvfPqIndex {
 public:
  struct Options {
    ivf::IvfIndex::Options ivf;
    std::size_t subspaces = 4;
    std::size_t codewords = 256;
    std::size_t kmeans_iters = 25;
  };

  static IvfPqIndex Build(const Collection& x, const Options& options);

  TopKResult Search(const Collection& x, std::span<const float> q,
                    std::size_t k, std::size_t ell,
                    std::size_t rerank = 0) const;

  const ivf::IvfIndex& ivf() const { return ivf_; }
  const PqCodebook& pq() const { return pq_; }
  const std::vector<std::uint8_t>& codes() const { return codes_; }

  void Save(BinaryWriter& w) const;
  static IvfPqIndex Load(BinaryReader& r);

 private:
  ivf::IvfIndex ivf_;
  PqCodebook pq_;
  std::vector<std::uint8_t> codes_;  // packed, one record per id
};

}  // namespace annkit::quant
