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

#include <cmath>
#include <functional>

#include "annkit/harness.hpp"
#include "annkit/random.hpp"
#include "annkit/sampling.hpp"

namespace annkit::harness {
namespace {

bool SameIds(const TopKResult& a, const TopKResult& b) {
  if (a.neighbors.size() != b.neighbors.size()) return false;
  for (std::size_t i = 0; i < a.neighbors.size(); ++i)
    if (a.neighbors[i].id != b.neighbors[i].id) return false;
  return true;
}

}  // namespace

Report SelfTest(std::uint64_t seed, bool* all_passed) {
  Report report({"check", "status", "detail"});
  bool ok_all = true;
  auto run = [&](const std::string& name, const std::function<std::string(bool&)>& body) {
    bool ok = false;
    std::string detail;
    try {
      detail = body(ok);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    ok_all = ok_all && ok;
    report.AddRow({name, ok ? "PASS" : "FAIL", detail});
  };

  const auto x = Generate({Distribution::kGaussian, 300, 8, seed});
  const auto queries = Generate({Distribution::kGaussian, 20, 8, HashCombine(seed, 1)});

  run("vecs_roundtrip", [&](bool& ok) {
    ok = DecodeVecs(EncodeVecs(x)) == x;
    return std::to_string(x.size()) + " vectors";
  });

  run("kdtree_exact", [&](bool& ok) {
    const auto tree = trees::KdTree::Build(x, 8);
    std::size_t mismatches = 0;
    for (std::size_t j = 0; j < queries.size(); ++j)
      if (!SameIds(tree.Search(x, queries.row(j), 5),
                   BruteForceTopK(x, queries.row(j), 5, DistanceKind::kL2Squared)))
        ++mismatches;
    ok = mismatches == 0;
    return "mismatches=" + std::to_string(mismatches);
  });

  run("covertree_invariants", [&](bool& ok) {
    const auto tree = trees::CoverTree::Build(x);
    const auto r = tree.CheckInvariants(x);
    ok = r.ok();
    return "covering=" + std::to_string(r.covering_violations) +
           " separation=" + std::to_string(r.separation_violations) +
           " nesting=" + std::to_string(r.nesting_violations);
  });

  run("pq_adc_identity", [&](bool& ok) {
    const auto pq = quant::TrainPq(x, 4, 16, 10, seed);
    double worst = 0.0;
    for (std::size_t j = 0; j < queries.size(); ++j) {
      const auto table = pq.BuildAdc(queries.row(j));
      for (std::size_t i = 0; i < x.size(); i += 7) {
        const auto code = pq.Encode(x.row(i));
        const double exact = L2Squared(queries.row(j), pq.Decode(code));
        const double adc = table.Distance(code);
        worst = std::max(worst, std::abs(adc - exact) / std::max(1e-12, exact));
      }
    }
    ok = worst <= 1e-5;
    return "max_rel_err=" + FormatNumber(worst);
  });

  run("alias_probabilities", [&](bool& ok) {
    const std::vector<double> w = {1.0, 0.0, 3.0, 2.0};
    const auto table = sampling::AliasTable::Build(w);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      worst = std::max(worst, std::abs(table.Probability(i) - w[i] / 6.0));
    ok = worst <= 1e-12;
    return "max_abs_err=" + FormatNumber(worst);
  });

  run("sng_connected", [&](bool& ok) {
    const auto g = graph::BuildAlphaSngExact(x, 1.0);
    ok = graph::CheckConnectivity(g).connected();
    return "edges=" + std::to_string(g.EdgeCount());
  });

  for (Family family : AllFamilies()) {
    run(std::string("container_") + std::string(ToString(family)), [&](bool& ok) {
      const Params build = family == Family::kIvfPq ? Params{{"codewords", "16"}} : Params{};
      const auto index = Index::Build(family, x, build, seed);
      const auto copy = Index::Deserialize(index.Serialize());
      std::size_t mismatches = 0;
      for (std::size_t j = 0; j < queries.size(); ++j) {
        const auto a = index.Query(queries.row(j), 5, {});
        const auto b = copy.Query(queries.row(j), 5, {});
        if (!SameIds(a.result, b.result) || a.evaluations != b.evaluations) ++mismatches;
      }
      ok = mismatches == 0 && copy.Serialize() == index.Serialize();
      return "mismatches=" + std::to_string(mismatches);
    });
  }

  if (all_passed) *all_passed = ok_all;
  return report;
}

}  // namespace annkit::harness
