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

#include "annkit/quant.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace annkit::quant {
namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

std::uint32_t NearestRow(const Collection& codebook, std::span<const float> u) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.size(); ++c) {
    const double v = L2Squared(u, codebook.row(c));
    if (v < best_d) {
      best_d = v;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

Collection Chunk(const Collection& x, std::size_t begin, std::size_t width) {
  Collection out(x.size(), width);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto src = x.row(i).subspan(begin, width);
    std::copy(src.begin(), src.end(), out.mutable_row(i).begin());
  }
  return out;
}

}  // namespace

// ---- VQ ---------------------------------------------------------------------

std::uint32_t VqModel::Encode(std::span<const float> u) const {
  ANNKIT_CHECK(u.size() == codebook.dim(), ErrorCode::kDimensionMismatch,
               "vq: dimension mismatch");
  return NearestRow(codebook, u);
}

double VqModel::Mse(const Collection& x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    total += L2Squared(x.row(i), Decode(Encode(x.row(i))));
  return total / static_cast<double>(x.size());
}

VqModel TrainVq(const Collection& x, std::size_t codewords,
                std::size_t max_iters, std::uint64_t seed) {
  auto km = ivf::TrainKMeans(x, codewords, ivf::KMeansKind::kEuclidean,
                             max_iters, seed);
  return VqModel{std::move(km.centroids), std::move(km.objective)};
}

// ---- PQ ---------------------------------------------------------------------

double AdcTable::Distance(std::span<const std::uint32_t> code) const {
  double s = 0.0;
  for (std::size_t i = 0; i < subspaces; ++i) s += at(i, code[i]);
  return s;
}

PqCodebook::PqCodebook(std::size_t dim, std::size_t subspaces,
                       std::size_t codewords, std::vector<float> values)
    : dim_(dim), subspaces_(subspaces), codewords_(codewords),
      values_(std::move(values)) {
  ANNKIT_CHECK(subspaces >= 1 && dim % subspaces == 0,
               ErrorCode::kInvalidArgument,
               "pq: dimension must be divisible by the number of subspaces");
  ANNKIT_CHECK(values_.size() == dim * codewords, ErrorCode::kInvalidArgument,
               "pq: codebook size mismatch");
}

std::span<const float> PqCodebook::Codeword(std::size_t i, std::size_t j) const {
  return {values_.data() + (i * codewords_ + j) * sub_dim(), sub_dim()};
}

std::span<float> PqCodebook::MutableCodeword(std::size_t i, std::size_t j) {
  return {values_.data() + (i * codewords_ + j) * sub_dim(), sub_dim()};
}

Code PqCodebook::Encode(std::span<const float> u) const {
  ANNKIT_CHECK(u.size() == dim_, ErrorCode::kDimensionMismatch,
               "pq: dimension mismatch");
  Code code(subspaces_);
  const std::size_t w = sub_dim();
  for (std::size_t i = 0; i < subspaces_; ++i) {
    auto chunk = u.subspan(i * w, w);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < codewords_; ++j) {
      const double v = L2Squared(chunk, Codeword(i, j));
      if (v < best) {
        best = v;
        code[i] = static_cast<std::uint32_t>(j);
      }
    }
  }
  return code;
}

std::vector<float> PqCodebook::Decode(std::span<const std::uint32_t> code) const {
  ANNKIT_CHECK(code.size() == subspaces_, ErrorCode::kInvalidArgument,
               "pq: code length mismatch");
  std::vector<float> out;
  out.reserve(dim_);
  for (std::size_t i = 0; i < subspaces_; ++i) {
    ANNKIT_CHECK(code[i] < codewords_, ErrorCode::kInvalidArgument,
                 "pq: codeword id out of range");
    auto cw = Codeword(i, code[i]);
    out.insert(out.end(), cw.begin(), cw.end());
  }
  return out;
}

AdcTable PqCodebook::BuildAdc(std::span<const float> q) const {
  ANNKIT_CHECK(q.size() == dim_, ErrorCode::kDimensionMismatch,
               "pq: query dimension mismatch");
  AdcTable t{subspaces_, codewords_, std::vector<double>(subspaces_ * codewords_)};
  const std::size_t w = sub_dim();
  for (std::size_t i = 0; i < subspaces_; ++i)
    for (std::size_t j = 0; j < codewords_; ++j)
      t.values[i * codewords_ + j] = L2Squared(q.subspan(i * w, w), Codeword(i, j));
  return t;
}

void PqCodebook::Save(BinaryWriter& w) const {
  w.Put<std::uint64_t>(dim_);
  w.Put<std::uint64_t>(subspaces_);
  w.Put<std::uint64_t>(codewords_);
  w.PutVector(values_);
}

PqCodebook PqCodebook::Load(BinaryReader& r) {
  const auto dim = r.Get<std::uint64_t>();
  const auto l = r.Get<std::uint64_t>();
  const auto c = r.Get<std::uint64_t>();
  return PqCodebook(dim, l, c, r.GetVector<float>());
}

PqCodebook TrainPq(const Collection& x, std::size_t subspaces,
                   std::size_t codewords, std::size_t max_iters,
                   std::uint64_t seed) {
  x.Validate();
  ANNKIT_CHECK(subspaces >= 1 && x.dim() % subspaces == 0,
               ErrorCode::kInvalidArgument,
               "pq: dimension must be divisible by the number of subspaces");
  const std::size_t w = x.dim() / subspaces;
  std::vector<float> values;
  values.reserve(x.dim() * codewords);
  for (std::size_t i = 0; i < subspaces; ++i) {
    auto km = ivf::TrainKMeans(Chunk(x, i * w, w), codewords,
                               ivf::KMeansKind::kEuclidean, max_iters, seed + i);
    values.insert(values.end(), km.centroids.data().begin(),
                  km.centroids.data().end());
  }
  return PqCodebook(x.dim(), subspaces, codewords, std::move(values));
}

std::size_t CodeBytes(std::size_t codewords) {
  ANNKIT_CHECK(codewords >= 1, ErrorCode::kInvalidArgument,
               "codes: need at least one codeword");
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < codewords) ++bits;
  return (bits + 7) / 8;
}

std::vector<std::uint8_t> PackCode(std::span<const std::uint32_t> code,
                                   std::size_t codewords) {
  const std::size_t b = CodeBytes(codewords);
  std::vector<std::uint8_t> out;
  out.reserve(code.size() * b);
  for (auto c : code) {
    ANNKIT_CHECK(c < codewords, ErrorCode::kInvalidArgument,
                 "codes: codeword id out of range");
    for (std::size_t k = 0; k < b; ++k)
      out.push_back(static_cast<std::uint8_t>((c >> (8 * k)) & 0xff));
  }
  return out;
}

Code UnpackCode(std::span<const std::uint8_t> bytes, std::size_t subspaces,
                std::size_t codewords) {
  const std::size_t b = CodeBytes(codewords);
  ANNKIT_CHECK(bytes.size() == subspaces * b, ErrorCode::kFormat,
               "codes: packed length mismatch");
  Code code(subspaces, 0);
  for (std::size_t i = 0; i < subspaces; ++i)
    for (std::size_t k = 0; k < b; ++k)
      code[i] |= static_cast<std::uint32_t>(bytes[i * b + k]) << (8 * k);
  return code;
}

// ---- OPQ --------------------------------------------------------------------

std::vector<float> OpqModel::Rotate(std::span<const float> u) const {
  ANNKIT_CHECK(u.size() == dim, ErrorCode::kDimensionMismatch,
               "opq: dimension mismatch");
  std::vector<float> out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) s += rotation[r * dim + c] * u[c];
    out[r] = static_cast<float>(s);
  }
  return out;
}

std::vector<float> OpqModel::Decode(std::span<const std::uint32_t> code) const {
  const auto y = pq.Decode(code);
  std::vector<float> out(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < dim; ++r) s += rotation[r * dim + c] * y[r];
    out[c] = static_cast<float>(s);
  }
  return out;
}

double OpqModel::OrthogonalityError() const {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      r(rotation.data(), static_cast<Eigen::Index>(dim),
        static_cast<Eigen::Index>(dim));
  const Eigen::MatrixXd e =
      r * r.transpose() -
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                static_cast<Eigen::Index>(dim));
  return e.cwiseAbs().maxCoeff();
}

void OpqModel::Save(BinaryWriter& w) const {
  w.Put<std::uint64_t>(dim);
  w.PutVector(rotation);
  pq.Save(w);
  w.PutVector(objective);
  w.PutVector(orthogonality);
}

OpqModel OpqModel::Load(BinaryReader& r) {
  OpqModel m;
  m.dim = r.Get<std::uint64_t>();
  m.rotation = r.GetVector<double>();
  ANNKIT_CHECK(m.rotation.size() == m.dim * m.dim, ErrorCode::kFormat,
               "opq: rotation size mismatch");
  m.pq = PqCodebook::Load(r);
  m.objective = r.GetVector<double>();
  m.orthogonality = r.GetVector<double>();
  return m;
}

OpqModel TrainOpq(const Collection& x, std::size_t subspaces,
                  std::size_t codewords, std::size_t iterations,
                  std::uint64_t seed, std::size_t kmeans_iters) {
  using Eigen::Index;
  using Eigen::MatrixXd;
  OpqModel model;
  model.dim = x.dim();
  model.pq = TrainPq(x, subspaces, codewords, kmeans_iters, seed);
  const auto d = static_cast<Index>(x.dim());
  const auto m = static_cast<Index>(x.size());
  const auto w = static_cast<Index>(model.pq.sub_dim());
  const auto l = static_cast<Index>(subspaces);
  const auto c_count = static_cast<Index>(codewords);

  // Columns are data points.
  MatrixXd u(d, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) u(j, i) = x.row(static_cast<std::size_t>(i))[j];
  // Codewords of subspace s are the columns of books[s] (w x C).
  std::vector<MatrixXd> books(subspaces, MatrixXd(w, c_count));
  for (Index s = 0; s < l; ++s)
    for (Index j = 0; j < c_count; ++j) {
      auto cw = model.pq.Codeword(static_cast<std::size_t>(s), static_cast<std::size_t>(j));
      for (Index t = 0; t < w; ++t) books[s](t, j) = cw[t];
    }
  std::vector<std::uint32_t> codes(x.size() * subspaces);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto code = model.pq.Encode(x.row(i));
    std::copy(code.begin(), code.end(), codes.begin() + i * subspaces);
  }

  MatrixXd rot = MatrixXd::Identity(d, d);
  auto reconstruct = [&]() {
    MatrixXd out(d, m);
    for (Index i = 0; i < m; ++i)
      for (Index s = 0; s < l; ++s)
        out.block(s * w, i, w, 1) = books[s].col(codes[i * l + s]);
    return out;
  };
  auto objective = [&](const MatrixXd& y) { return (y - reconstruct()).squaredNorm(); };
  auto ortho = [&]() {
    return (rot * rot.transpose() - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  };

  model.objective.push_back(objective(u));
  model.orthogonality.push_back(ortho());
  for (std::size_t it = 0; it < iterations; ++it) {
    // Procrustes: R = P Q^T from the SVD of U_hat U^T.
    const MatrixXd target = reconstruct() * u.transpose();
    Eigen::JacobiSVD<MatrixXd> svd(target, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rot = svd.matrixU() * svd.matrixV().transpose();
    const MatrixXd y = rot * u;

    // Warm-started Lloyd steps on the rotated data.
    for (std::size_t step = 0; step < kmeans_iters; ++step) {
      bool changed = false;
      for (Index i = 0; i < m; ++i) {
        for (Index s = 0; s < l; ++s) {
          const auto chunk = y.block(s * w, i, w, 1);
          std::uint32_t& cur = codes[i * l + s];
          double best = (books[s].col(cur) - chunk).squaredNorm();
          for (Index j = 0; j < c_count; ++j) {
            const double v = (books[s].col(j) - chunk).squaredNorm();
            if (v < best) {
              best = v;
              cur = static_cast<std::uint32_t>(j);
              changed = true;
            }
          }
        }
      }
      for (Index s = 0; s < l; ++s) {
        MatrixXd sums = MatrixXd::Zero(w, c_count);
        std::vector<Index> counts(codewords, 0);
        for (Index i = 0; i < m; ++i) {
          const auto j = codes[i * l + s];
          sums.col(j) += y.block(s * w, i, w, 1);
          ++counts[j];
        }
        for (Index j = 0; j < c_count; ++j)
          if (counts[j] > 0) books[s].col(j) = sums.col(j) / static_cast<double>(counts[j]);
      }
      if (!changed && step > 0) break;
    }
    model.objective.push_back(objective(y));
    model.orthogonality.push_back(ortho());
  }

  model.rotation.resize(x.dim() * x.dim());
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) model.rotation[r * d + c] = rot(r, c);
  if (iterations > 0) {
    std::vector<float> values(x.dim() * codewords);
    for (Index s = 0; s < l; ++s)
      for (Index j = 0; j < c_count; ++j)
        for (Index t = 0; t < w; ++t)
          values[(s * c_count + j) * w + t] = static_cast<float>(books[s](t, j));
    model.pq = PqCodebook(x.dim(), subspaces, codewords, std::move(values));
  }
  return model;
}

// ---- AQ ---------------------------------------------------------------------

AqCodebook::AqCodebook(std::size_t dim, std::size_t books, std::size_t codewords,
                       std::vector<float> values)
    : dim_(dim), books_(books), codewords_(codewords), values_(std::move(values)) {
  ANNKIT_CHECK(books >= 1 && codewords >= 1, ErrorCode::kInvalidArgument,
               "aq: need L >= 1 and C >= 1");
  ANNKIT_CHECK(values_.size() == dim * books * codewords,
               ErrorCode::kInvalidArgument, "aq: codebook size mismatch");
}

std::span<const float> AqCodebook::Codeword(std::size_t i, std::size_t j) const {
  return {values_.data() + (i * codewords_ + j) * dim_, dim_};
}

std::vector<double> AqCodebook::Reconstruct(std::span<const std::uint32_t> code) const {
  ANNKIT_CHECK(code.size() == books_, ErrorCode::kInvalidArgument,
               "aq: code length mismatch");
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < books_; ++i) {
    auto cw = Codeword(i, code[i]);
    for (std::size_t t = 0; t < dim_; ++t) out[t] += cw[t];
  }
  return out;
}

double AqCodebook::Error(std::span<const float> u,
                         std::span<const std::uint32_t> code) const {
  const auto rec = Reconstruct(code);
  double s = 0.0;
  for (std::size_t t = 0; t < dim_; ++t) s += (u[t] - rec[t]) * (u[t] - rec[t]);
  return s;
}

AqCode AqCodebook::Encode(std::span<const float> u, std::size_t beam) const {
  ANNKIT_CHECK(u.size() == dim_, ErrorCode::kDimensionMismatch,
               "aq: dimension mismatch");
  ANNKIT_CHECK(beam >= 1, ErrorCode::kInvalidArgument, "aq: beam must be >= 1");
  struct Tuple {
    Code ids;
    std::vector<double> residual;
    double error = 0.0;
  };
  auto tuple_less = [](const Tuple& a, const Tuple& b) {
    return a.error < b.error || (a.error == b.error && a.ids < b.ids);
  };
  std::vector<Tuple> current(1);
  current[0].ids.assign(books_, kUnset);
  current[0].residual.assign(u.begin(), u.end());
  for (double v : current[0].residual) current[0].error += v * v;

  std::vector<std::pair<double, std::uint32_t>> scored(codewords_);
  for (std::size_t round = 0; round < books_; ++round) {
    std::vector<Tuple> next;
    for (const auto& t : current) {
      for (std::size_t i = 0; i < books_; ++i) {
        if (t.ids[i] != kUnset) continue;
        for (std::size_t j = 0; j < codewords_; ++j) {
          auto cw = Codeword(i, j);
          double s = 0.0;
          for (std::size_t k = 0; k < dim_; ++k) {
            const double diff = t.residual[k] - cw[k];
            s += diff * diff;
          }
          scored[j] = {s, static_cast<std::uint32_t>(j)};
        }
        const std::size_t take = std::min(beam, codewords_);
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                          scored.end());
        for (std::size_t r = 0; r < take; ++r) {
          Tuple n;
          n.ids = t.ids;
          n.ids[i] = scored[r].second;
          n.error = scored[r].first;
          next.push_back(std::move(n));
        }
      }
    }
    std::sort(next.begin(), next.end(), tuple_less);
    next.erase(std::unique(next.begin(), next.end(),
                           [](const Tuple& a, const Tuple& b) { return a.ids == b.ids; }),
               next.end());
    if (next.size() > beam) next.resize(beam);
    for (auto& n : next) {
      n.residual.assign(u.begin(), u.end());
      for (std::size_t i = 0; i < books_; ++i) {
        if (n.ids[i] == kUnset) continue;
        auto cw = Codeword(i, n.ids[i]);
        for (std::size_t k = 0; k < dim_; ++k) n.residual[k] -= cw[k];
      }
    }
    current = std::move(next);
  }
  AqCode code;
  code.ids = current.front().ids;
  code.norm_sq = SquaredNorm(u);
  return code;
}

AdcTable AqCodebook::BuildIpTable(std::span<const float> q) const {
  ANNKIT_CHECK(q.size() == dim_, ErrorCode::kDimensionMismatch,
               "aq: query dimension mismatch");
  AdcTable t{books_, codewords_, std::vector<double>(books_ * codewords_)};
  for (std::size_t i = 0; i < books_; ++i)
    for (std::size_t j = 0; j < codewords_; ++j)
      t.values[i * codewords_ + j] = Dot(q, Codeword(i, j));
  return t;
}

double AqCodebook::Distance(double q_norm_sq, const AdcTable& table,
                            const AqCode& code) {
  return q_norm_sq - 2.0 * table.Distance(code.ids) + code.norm_sq;
}

void AqCodebook::Save(BinaryWriter& w) const {
  w.Put<std::uint64_t>(dim_);
  w.Put<std::uint64_t>(books_);
  w.Put<std::uint64_t>(codewords_);
  w.PutVector(values_);
}

AqCodebook AqCodebook::Load(BinaryReader& r) {
  const auto dim = r.Get<std::uint64_t>();
  const auto l = r.Get<std::uint64_t>();
  const auto c = r.Get<std::uint64_t>();
  return AqCodebook(dim, l, c, r.GetVector<float>());
}

AqModel TrainAq(const Collection& x, std::size_t books, std::size_t codewords,
                std::size_t beam, std::size_t iterations, std::uint64_t seed,
                std::size_t kmeans_iters) {
  x.Validate();
  const std::size_t m = x.size(), d = x.dim();
  // Residual VQ initialization.
  std::vector<float> values;
  Collection residual = x;
  for (std::size_t i = 0; i < books; ++i) {
    auto km = ivf::TrainKMeans(residual, codewords, ivf::KMeansKind::kEuclidean,
                               kmeans_iters, seed + i);
    for (std::size_t p = 0; p < m; ++p) {
      auto cw = km.centroids.row(NearestRow(km.centroids, residual.row(p)));
      auto row = residual.mutable_row(p);
      for (std::size_t t = 0; t < d; ++t) row[t] -= cw[t];
    }
    values.insert(values.end(), km.centroids.data().begin(), km.centroids.data().end());
  }

  AqModel model;
  model.beam = beam;
  model.codebook = AqCodebook(d, books, codewords, std::move(values));
  auto total_error = [&](const AqCodebook& cb, const std::vector<AqCode>& codes) {
    double s = 0.0;
    for (std::size_t p = 0; p < m; ++p) s += cb.Error(x.row(p), codes[p].ids);
    return s;
  };
  model.codes.resize(m);
  for (std::size_t p = 0; p < m; ++p) model.codes[p] = model.codebook.Encode(x.row(p), beam);
  model.error.push_back(total_error(model.codebook, model.codes));

  const auto n = static_cast<Eigen::Index>(books * codewords);
  for (std::size_t it = 0; it < iterations; ++it) {
    // Least-squares refit: the normal equations share one Gram matrix across
    // dimensions; the minimum-norm solution handles its rank deficiency.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d));
    for (std::size_t p = 0; p < m; ++p) {
      const auto& ids = model.codes[p].ids;
      auto row = x.row(p);
      for (std::size_t a = 0; a < books; ++a) {
        const auto ia = static_cast<Eigen::Index>(a * codewords + ids[a]);
        for (std::size_t b = 0; b < books; ++b)
          gram(ia, static_cast<Eigen::Index>(b * codewords + ids[b])) += 1.0;
        for (std::size_t t = 0; t < d; ++t) rhs(ia, static_cast<Eigen::Index>(t)) += row[t];
      }
    }
    const Eigen::MatrixXd sol = gram.completeOrthogonalDecomposition().solve(rhs);
    std::vector<float> refit(books * codewords * d);
    for (Eigen::Index r = 0; r < n; ++r)
      for (std::size_t t = 0; t < d; ++t)
        refit[static_cast<std::size_t>(r) * d + t] =
            static_cast<float>(sol(r, static_cast<Eigen::Index>(t)));
    AqCodebook candidate(d, books, codewords, std::move(refit));
    const double before = model.error.back();
    if (total_error(candidate, model.codes) <= before) model.codebook = std::move(candidate);

    // Re-encode, keeping the old code where the beam does worse.
    for (std::size_t p = 0; p < m; ++p) {
      auto fresh = model.codebook.Encode(x.row(p), beam);
      if (model.codebook.Error(x.row(p), fresh.ids) <
          model.codebook.Error(x.row(p), model.codes[p].ids))
        model.codes[p] = std::move(fresh);
    }
    model.error.push_back(total_error(model.codebook, model.codes));
  }
  return model;
}

// ---- Score-aware ------------------------------------------------------------

Residual ResidualDecompose(std::span<const float> u, std::span<const float> u_hat) {
  ANNKIT_CHECK(u.size() == u_hat.size(), ErrorCode::kDimensionMismatch,
               "residual: dimension mismatch");
  const double norm_sq = SquaredNorm(u);
  ANNKIT_CHECK(norm_sq > 0.0, ErrorCode::kInvalidArgument,
               "residual: u must be non-zero");
  Residual out;
  out.parallel.resize(u.size());
  out.perpendicular.resize(u.size());
  double proj = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    proj += (static_cast<double>(u[i]) - u_hat[i]) * u[i];
  proj /= norm_sq;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = static_cast<double>(u[i]) - u_hat[i];
    out.parallel[i] = proj * u[i];
    out.perpendicular[i] = r - out.parallel[i];
  }
  return out;
}

double ScoreAwareWeight(double theta, double t) {
  ANNKIT_CHECK(theta >= 0.0 && theta < t, ErrorCode::kInvalidArgument,
               "score-aware weight: require 0 <= theta < t");
  const double s = (theta / t) * (theta / t);
  return s / (1.0 - s);
}

double ScoreAwareLoss(std::span<const float> u, std::span<const float> u_hat,
                      double eta) {
  const double norm_sq = SquaredNorm(u);
  double r_sq = 0.0, r_dot_u = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = static_cast<double>(u[i]) - u_hat[i];
    r_sq += r * r;
    r_dot_u += r * u[i];
  }
  const double par = norm_sq > 0.0 ? r_dot_u * r_dot_u / norm_sq : 0.0;
  return eta * par + std::max(0.0, r_sq - par);
}

std::uint32_t ScoreAwareModel::Encode(std::span<const float> u) const {
  const double eta = ScoreAwareWeight(theta, Norm(u));
  std::uint32_t best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.size(); ++c) {
    const double v = ScoreAwareLoss(u, codebook.row(c), eta);
    if (v < best_loss) {
      best_loss = v;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

ScoreAwareModel TrainScoreAwareVq(const Collection& x, std::size_t codewords,
                                  double theta, std::size_t iterations,
                                  std::uint64_t seed) {
  x.Validate();
  const std::size_t m = x.size(), d = x.dim();
  std::vector<double> eta(m);
  for (std::size_t i = 0; i < m; ++i) eta[i] = ScoreAwareWeight(theta, Norm(x.row(i)));

  ScoreAwareModel model;
  model.theta = theta;
  model.codebook = ivf::TrainKMeans(x, codewords, ivf::KMeansKind::kEuclidean,
                                    25, seed).centroids;
  model.assignment.assign(m, 0);
  auto assign = [&](bool keep_ties) {
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      std::uint32_t best = keep_ties ? model.assignment[i] : 0;
      double best_loss = ScoreAwareLoss(x.row(i), model.codebook.row(best), eta[i]);
      for (std::size_t c = 0; c < codewords; ++c) {
        const double v = ScoreAwareLoss(x.row(i), model.codebook.row(c), eta[i]);
        if (v < best_loss) {
          best_loss = v;
          best = static_cast<std::uint32_t>(c);
        }
      }
      changed |= best != model.assignment[i];
      model.assignment[i] = best;
    }
    return changed;
  };
  auto cluster_loss = [&](std::size_t c, std::span<const float> centroid) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (model.assignment[i] == c) s += ScoreAwareLoss(x.row(i), centroid, eta[i]);
    return s;
  };
  assign(false);

  const auto dd = static_cast<Eigen::Index>(d);
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<Eigen::MatrixXd> forms(codewords, Eigen::MatrixXd::Zero(dd, dd));
    std::vector<Eigen::VectorXd> rhs(codewords, Eigen::VectorXd::Zero(dd));
    std::vector<std::size_t> counts(codewords, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto c = model.assignment[i];
      Eigen::VectorXd u(dd);
      for (Eigen::Index t = 0; t < dd; ++t) u(t) = x.row(i)[t];
      const double nsq = u.squaredNorm();
      forms[c] += Eigen::MatrixXd::Identity(dd, dd) + (eta[i] - 1.0) * (u * u.transpose()) / nsq;
      rhs[c] += eta[i] * u;
      ++counts[c];
    }
    for (std::size_t c = 0; c < codewords; ++c) {
      if (counts[c] == 0) continue;
      const Eigen::VectorXd sol = forms[c].completeOrthogonalDecomposition().solve(rhs[c]);
      std::vector<float> candidate(d);
      for (std::size_t t = 0; t < d; ++t) candidate[t] = static_cast<float>(sol(static_cast<Eigen::Index>(t)));
      if (cluster_loss(c, candidate) <= cluster_loss(c, model.codebook.row(c))) {
        auto row = model.codebook.mutable_row(c);
        std::copy(candidate.begin(), candidate.end(), row.begin());
      }
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      objective += ScoreAwareLoss(x.row(i), model.codebook.row(model.assignment[i]), eta[i]);
    model.objective.push_back(objective);
    if (!assign(true)) break;
  }
  return model;
}

// ---- IVF-PQ -----------------------------------------------------------------

IvfPqIndex IvfPqIndex::Build(const Collection& x, const Options& options) {
  ANNKIT_CHECK(options.ivf.kind == DistanceKind::kL2Squared,
               ErrorCode::kInvalidArgument, "ivf-pq: only the l2 kind is supported");
  IvfPqIndex index;
  index.ivf_ = ivf::IvfIndex::Build(x, options.ivf);
  index.pq_ = TrainPq(x, options.subspaces, options.codewords,
                      options.kmeans_iters, options.ivf.seed);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto packed = PackCode(index.pq_.Encode(x.row(i)), options.codewords);
    index.codes_.insert(index.codes_.end(), packed.begin(), packed.end());
  }
  return index;
}

TopKResult IvfPqIndex::Search(const Collection& x, std::span<const float> q,
                              std::size_t k, std::size_t ell,
                              std::size_t rerank) const {
  const auto table = pq_.BuildAdc(q);
  const std::size_t stride = pq_.subspaces() * CodeBytes(pq_.codewords());
  const std::size_t first = std::max(k, rerank);
  TopKCollector top(first);
  for (VectorId id : ivf_.Candidates(q, ell)) {
    const auto code = UnpackCode(
        std::span<const std::uint8_t>(codes_.data() + id * stride, stride),
        pq_.subspaces(), pq_.codewords());
    top.Push(id, table.Distance(code));
  }
  auto approx = std::move(top).Finish();
  if (rerank == 0) {
    approx.k = k;
    if (approx.neighbors.size() > k) approx.neighbors.resize(k);
    return approx;
  }
  return ScanCandidates(x, q, approx.ids(), k, DistanceKind::kL2Squared);
}

void IvfPqIndex::Save(BinaryWriter& w) const {
  ivf_.Save(w);
  pq_.Save(w);
  w.PutVector(codes_);
}

IvfPqIndex IvfPqIndex::Load(BinaryReader& r) {
  IvfPqIndex index;
  index.ivf_ = ivf::IvfIndex::Load(r);
  index.pq_ = PqCodebook::Load(r);
  index.codes_ = r.GetVector<std::uint8_t>();
  return index;
}

}  // namespace annkit::quant
