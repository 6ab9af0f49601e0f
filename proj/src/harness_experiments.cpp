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
#include <limits>

#include "annkit/harness.hpp"
#include "annkit/random.hpp"
#include "annkit/sampling.hpp"
#include "annkit/sketch.hpp"

namespace annkit::harness {

Report ExperimentCoincidence(const CoincidenceOptions& options) {
  ANNKIT_CHECK(!options.dims.empty(), ErrorCode::kInvalidArgument,
               "coincidence: no dimensions given");
  Report report({"distribution", "m", "d", "queries", "fraction"});
  for (std::size_t d : options.dims) {
    const auto x = Generate({options.distribution, options.m, d, HashCombine(options.seed, d)});
    const std::size_t m = x.size();
    Rng rng(HashCombine(options.seed, d, 1));
    auto order = rng.Permutation(m);
    const std::size_t n = std::min(options.sample_queries, m);
    ANNKIT_CHECK(n >= 1, ErrorCode::kInvalidArgument, "coincidence: need >= 1 query");
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const auto i = order[s];
      const auto u = x.row(i);
      const double self = Dot(u, u);
      bool own = true;
      for (std::size_t j = 0; j < m && own; ++j)
        if (j != i && Dot(u, x.row(j)) > self) own = false;
      hits += own ? 1 : 0;
    }
    report.AddRow({std::string(ToString(options.distribution)), std::to_string(m),
                   std::to_string(d), std::to_string(n),
                   FormatNumber(static_cast<double>(hits) / static_cast<double>(n))});
  }
  return report;
}

Report ExperimentInstability(const InstabilityOptions& options) {
  ANNKIT_CHECK(!options.dims.empty(), ErrorCode::kInvalidArgument,
               "instability: no dimensions given");
  ANNKIT_CHECK(options.queries >= 1, ErrorCode::kInvalidArgument,
               "instability: need >= 1 query");
  Report report({"distribution", "m", "d", "queries", "ratio_mean", "ratio_sd",
                 "cover_fraction"});
  for (std::size_t d : options.dims) {
    const auto x = Generate({options.distribution, options.m, d, HashCombine(options.seed, d)});
    const auto q = Generate({options.distribution, options.queries, d,
                             HashCombine(options.seed, d, 2)});
    std::vector<double> ratios;
    double cover = 0.0;
    std::vector<double> dist(x.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        dist[i] = std::sqrt(L2Squared(q.row(j), x.row(i)));
        lo = std::min(lo, dist[i]);
        hi = std::max(hi, dist[i]);
      }
      ratios.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
      std::size_t within = 0;
      for (double v : dist) within += v <= (1.0 + options.eps) * lo ? 1 : 0;
      cover += static_cast<double>(within) / static_cast<double>(x.size());
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double sd = ratios.size() > 1 ? std::sqrt(var / static_cast<double>(ratios.size() - 1)) : 0.0;
    report.AddRow({std::string(ToString(options.distribution)), std::to_string(x.size()),
                   std::to_string(d), std::to_string(q.size()), FormatNumber(mean),
                   FormatNumber(sd), FormatNumber(cover / static_cast<double>(q.size()))});
  }
  return report;
}

namespace {

std::size_t RecallAt(const TopKResult& got, const TopKResult& truth) {
  std::size_t hits = 0;
  for (const auto& a : got.neighbors)
    for (const auto& b : truth.neighbors)
      if (a.id == b.id) ++hits;
  return hits;
}

}  // namespace

Report ExperimentWedge(const Params& params, std::uint64_t seed) {
  const auto dist = ParseDistribution(ParamString(params, "dist", "gaussian"));
  const auto m = ParamSize(params, "m", 2000);
  const auto d = ParamSize(params, "d", 32);
  const auto nq = ParamSize(params, "queries", 50);
  const auto k = ParamSize(params, "k", 10);
  const auto kprime = ParamSize(params, "kprime", 0);
  const auto budgets = ParseSizeList(ParamString(params, "S", "1000"));
  const auto x = Generate({dist, m, d, HashCombine(seed, 3)});
  const auto q = Generate({dist, nq, d, HashCombine(seed, 4)});
  const auto index = sampling::WedgeIndex::Build(x);
  std::vector<TopKResult> truth;
  for (std::size_t j = 0; j < q.size(); ++j)
    truth.push_back(BruteForceTopK(x, q.row(j), k, DistanceKind::kNegInnerProduct));
  Report report({"m", "d", "queries", "k", "S", "kprime", "recall"});
  for (std::size_t s : budgets) {
    std::size_t hits = 0;
    for (std::size_t j = 0; j < q.size(); ++j)
      hits += RecallAt(index.TopK(x, q.row(j), s, k, kprime, HashCombine(seed, s, j)), truth[j]);
    report.AddRow({std::to_string(m), std::to_string(d), std::to_string(nq),
                   std::to_string(k), std::to_string(s),
                   std::to_string(kprime ? kprime : std::max<std::size_t>(10 * k, 50)),
                   FormatNumber(static_cast<double>(hits) / static_cast<double>(k * nq))});
  }
  return report;
}

Report ExperimentBoundedMe(const Params& params, std::uint64_t seed) {
  const auto dist = ParseDistribution(ParamString(params, "dist", "gaussian"));
  const auto m = ParamSize(params, "m", 500);
  const auto d = ParamSize(params, "d", 64);
  const auto nq = ParamSize(params, "queries", 50);
  const auto k = ParamSize(params, "k", 1);
  const double eps = ParamDouble(params, "eps", 0.2);
  const double delta = ParamDouble(params, "delta", 0.1);
  const auto x = Generate({dist, m, d, HashCombine(seed, 5)});
  const auto q = Generate({dist, nq, d, HashCombine(seed, 6)});
  std::size_t hits = 0, valid = 0;
  double products = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const auto truth = BruteForceTopK(x, q.row(j), k, DistanceKind::kNegInnerProduct);
    const auto r = sampling::BoundedMeTopK(x, q.row(j), k, eps, delta, HashCombine(seed, j));
    hits += RecallAt(r.result, truth);
    products += static_cast<double>(r.products);
    // Scores are -<q, u>; the gap is measured in normalized-mean units.
    const double gap = r.result.neighbors.back().score - truth.neighbors.back().score;
    const double unit = 2.0 * r.scale * static_cast<double>(d);
    valid += (unit == 0.0 ? gap <= 0.0 : gap / unit <= eps) ? 1 : 0;
  }
  Report report({"m", "d", "queries", "k", "eps", "delta", "recall", "valid_fraction",
                 "products_per_query"});
  const auto n = static_cast<double>(nq);
  report.AddRow({std::to_string(m), std::to_string(d), std::to_string(nq),
                 std::to_string(k), FormatNumber(eps), FormatNumber(delta),
                 FormatNumber(static_cast<double>(hits) / (static_cast<double>(k) * n)),
                 FormatNumber(static_cast<double>(valid) / n), FormatNumber(products / n)});
  return report;
}

Report ExperimentSketch(const Params& params, std::uint64_t seed) {
  const auto kind = ParamString(params, "sketch", "jl");
  const auto dist = ParseDistribution(ParamString(params, "dist", "gaussian"));
  const auto d = ParamSize(params, "d", 256);
  const auto dout = ParamSize(params, "dout", 64);
  const auto trials = ParamSize(params, "trials", 100);
  const auto pair = Generate({dist, 2, d, HashCombine(seed, 7)});
  const auto u = pair.row(0), v = pair.row(1);
  const double truth = Dot(u, v);
  Report report({"sketch", "trial", "seed", "estimate", "truth"});
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = HashCombine(seed, 8, t);
    double estimate = 0.0;
    if (kind == "jl") {
      const sketch::JlSketcher jl(dout, s);
      estimate = sketch::JlInnerProduct(jl.Project(u), jl.Project(v));
    } else if (kind == "threshold") {
      estimate = sketch::ThresholdInnerProduct(sketch::MakeThresholdSketch(u, dout, s),
                                               sketch::MakeThresholdSketch(v, dout, s));
    } else if (kind == "asym") {
      const auto mode = ParamString(params, "mode", "signed");
      sketch::AsymMode am = sketch::AsymMode::kSigned;
      if (mode == "positive") am = sketch::AsymMode::kPositive;
      else if (mode == "dense") am = sketch::AsymMode::kDense;
      else ANNKIT_CHECK(mode == "signed", ErrorCode::kInvalidArgument, "unknown asym mode");
      estimate = sketch::AsymUpperBound(
          u, sketch::MakeAsymSketch(v, dout, ParamSize(params, "hashes", 2), s, am));
    } else {
      Throw(ErrorCode::kInvalidArgument, "unknown sketch '" + kind + "'");
    }
    report.AddRow({kind, std::to_string(t), std::to_string(s), FormatNumber(estimate),
                   FormatNumber(truth)});
  }
  return report;
}

Report RunExperiment(std::string_view name, const Params& params, std::uint64_t seed) {
  if (name == "coincidence" || name == "instability") {
    const auto dist = ParseDistribution(ParamString(params, "dist", "gaussian"));
    const auto m = ParamSize(params, "m", 10000);
    const auto dims = ParseSizeList(ParamString(params, "dims", ""));
    if (name == "coincidence") {
      CoincidenceOptions o;
      o.distribution = dist;
      o.m = m;
      o.dims = dims;
      o.sample_queries = ParamSize(params, "queries", o.sample_queries);
      o.seed = seed;
      return ExperimentCoincidence(o);
    }
    InstabilityOptions o;
    o.distribution = dist;
    o.m = m;
    o.dims = dims;
    o.queries = ParamSize(params, "queries", o.queries);
    o.eps = ParamDouble(params, "eps", o.eps);
    o.seed = seed;
    return ExperimentInstability(o);
  }
  if (name == "wedge") return ExperimentWedge(params, seed);
  if (name == "boundedme") return ExperimentBoundedMe(params, seed);
  if (name == "sketch") return ExperimentSketch(params, seed);
  Throw(ErrorCode::kInvalidArgument, "unknown experiment '" + std::string(name) + "'");
}

}  // namespace annkit::harness
