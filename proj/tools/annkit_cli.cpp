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

// Command line front end. Links only against the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "annkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  ann_status status;
  std::string message;
};

void Check(ann_status s) {
  if (s != ANN_OK) throw Failure{s, ann_last_error()};
}

using CollectionPtr = std::unique_ptr<ann_collection, decltype(&ann_collection_free)>;
using IndexPtr = std::unique_ptr<ann_index, decltype(&ann_index_free)>;

CollectionPtr Wrap(ann_collection* c) { return CollectionPtr(c, ann_collection_free); }
IndexPtr Wrap(ann_index* i) { return IndexPtr(i, ann_index_free); }

void Emit(char* csv) {
  std::fputs(csv, stdout);
  ann_string_free(csv);
}

std::string JoinParams(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

struct DataFlags {
  std::string path;
  std::string dist = "gaussian";
  std::size_t m = 1000;
  std::size_t d = 16;

  void Add(CLI::App* app, const std::string& file_flag, const std::string& count_flag,
           std::size_t default_m, std::size_t default_d) {
    m = default_m;
    d = default_d;
    app->add_option(file_flag, path, ".vecs input; generated data is used when absent");
    app->add_option("--dist", dist, "gaussian, uniform, uniform-positive or exponential");
    app->add_option(count_flag, m, "generated vector count")->check(CLI::PositiveNumber);
    app->add_option("--d", d, "generated dimension")->check(CLI::PositiveNumber);
  }

  CollectionPtr Load(std::uint64_t seed) const {
    ann_collection* c = nullptr;
    if (!path.empty()) {
      Check(ann_collection_load_vecs(path.c_str(), &c));
    } else {
      Check(ann_collection_generate(dist.c_str(), m, d, seed, &c));
    }
    return Wrap(c);
  }
};

// Queries share the distribution of the data but not its stream.
std::uint64_t QuerySeed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annkit: approximate vector retrieval toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = 42;
  app.add_option("--seed", seed, "random seed shared by every subcommand");

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic .vecs file");
  std::string gen_dist = "gaussian", gen_out;
  std::size_t gen_m = 1000, gen_d = 16;
  gen->add_option("--dist", gen_dist, "distribution");
  gen->add_option("--m", gen_m, "vector count")->check(CLI::PositiveNumber);
  gen->add_option("--d", gen_d, "dimension")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output path")->required();

  // build
  auto* build = app.add_subcommand("build", "build an index and save its container");
  std::string build_family, build_out;
  std::vector<std::string> build_params;
  DataFlags build_data;
  build->add_option("--family", build_family, "index family")->required();
  build_data.Add(build, "--data", "--m", 1000, 16);
  build->add_option("--param", build_params, "build parameter key=value (repeatable)");
  build->add_option("--out", build_out, "container path")->required();

  // query
  auto* query = app.add_subcommand("query", "query a saved index");
  std::string query_index;
  std::vector<std::string> query_params;
  std::size_t query_k = 10;
  DataFlags query_data;
  query->add_option("--index", query_index, "container path")->required();
  query_data.Add(query, "--queries", "--nq", 10, 16);
  query->add_option("--k", query_k, "neighbors per query")->check(CLI::PositiveNumber);
  query->add_option("--param", query_params, "search parameter key=value (repeatable)");

  // bench
  auto* bench = app.add_subcommand("bench", "recall and cost against the exact oracle");
  std::string bench_family, bench_queries, bench_clusters, bench_sweep_l, bench_sweep;
  std::vector<std::string> bench_params, bench_search;
  std::size_t bench_nq = 100, bench_k = 10;
  bool bench_timing = false;
  DataFlags bench_data;
  bench->add_option("family", bench_family, "index family")->required();
  bench_data.Add(bench, "--data", "--m", 5000, 32);
  bench->add_option("--queries", bench_queries, ".vecs queries; generated when absent");
  bench->add_option("--nq", bench_nq, "generated query count")->check(CLI::PositiveNumber);
  bench->add_option("--k", bench_k, "recall depth")->check(CLI::PositiveNumber);
  bench->add_option("--C", bench_clusters, "cluster count for IVF families, or auto");
  bench->add_option("--param", bench_params, "build parameter key=value (repeatable)");
  bench->add_option("--search", bench_search, "fixed search parameter key=value");
  bench->add_option("--sweep-l", bench_sweep_l, "probe counts, e.g. 1,2,5 or 10%,50%");
  bench->add_option("--sweep", bench_sweep, "generic sweep key=v1,v2,...");
  bench->add_flag("--timing", bench_timing, "add a wall_ms column (not reproducible)");
  bench->get_option("--sweep-l")->excludes("--sweep");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a synthetic experiment");
  std::string exp_name;
  exp->add_option("name", exp_name, "coincidence, instability, wedge, boundedme or sketch")
      ->required();
  const std::vector<std::pair<std::string, std::string>> exp_keys = {
      {"dist", "distribution"},
      {"m", "data size"},
      {"d", "dimension (wedge, boundedme, sketch)"},
      {"dims", "comma list of dimensions (coincidence, instability)"},
      {"queries", "query count"},
      {"eps", "approximation parameter"},
      {"delta", "failure probability (boundedme)"},
      {"k", "top-k depth"},
      {"S", "comma list of sample budgets (wedge)"},
      {"kprime", "rescoring depth (wedge)"},
      {"sketch", "jl, threshold or asym"},
      {"dout", "sketch size"},
      {"trials", "sketch seeds"},
      {"hashes", "asym mappings"},
      {"mode", "asym mode: signed, positive or dense"},
  };
  std::vector<std::string> exp_values(exp_keys.size());
  for (std::size_t i = 0; i < exp_keys.size(); ++i)
    exp->add_option("--" + exp_keys[i].first, exp_values[i], exp_keys[i].second);

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      ann_collection* c = nullptr;
      Check(ann_collection_generate(gen_dist.c_str(), gen_m, gen_d, seed, &c));
      auto data = Wrap(c);
      Check(ann_collection_save_vecs(data.get(), gen_out.c_str()));
      std::printf("path,dist,m,d,seed\n%s,%s,%zu,%zu,%llu\n", gen_out.c_str(),
                  gen_dist.c_str(), gen_m, gen_d, static_cast<unsigned long long>(seed));
    } else if (build->parsed()) {
      auto data = build_data.Load(seed);
      ann_index* raw = nullptr;
      Check(ann_index_build(build_family.c_str(), data.get(), JoinParams(build_params).c_str(),
                            seed, &raw));
      auto index = Wrap(raw);
      Check(ann_index_save(index.get(), build_out.c_str()));
      std::printf("family,path,m,d\n%s,%s,%zu,%zu\n", ann_index_family(index.get()),
                  build_out.c_str(), ann_index_size(index.get()), ann_index_dim(index.get()));
    } else if (query->parsed()) {
      ann_index* raw = nullptr;
      Check(ann_index_load(query_index.c_str(), &raw));
      auto index = Wrap(raw);
      if (query_data.path.empty()) query_data.d = ann_index_dim(index.get());
      auto queries = query_data.Load(QuerySeed(seed));
      char* csv = nullptr;
      Check(ann_index_query_csv(index.get(), queries.get(), query_k,
                                JoinParams(query_params).c_str(), &csv));
      Emit(csv);
    } else if (bench->parsed()) {
      auto data = bench_data.Load(seed);
      CollectionPtr queries = Wrap(static_cast<ann_collection*>(nullptr));
      {
        ann_collection* q = nullptr;
        if (!bench_queries.empty()) {
          Check(ann_collection_load_vecs(bench_queries.c_str(), &q));
        } else {
          Check(ann_collection_generate(bench_data.dist.c_str(), bench_nq,
                                        ann_collection_dim(data.get()), QuerySeed(seed), &q));
        }
        queries = Wrap(q);
      }
      if (!bench_clusters.empty()) bench_params.push_back("C=" + bench_clusters);
      std::string key, values;
      if (!bench_sweep_l.empty()) {
        key = "l";
        values = bench_sweep_l;
      } else if (!bench_sweep.empty()) {
        const auto eq = bench_sweep.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == bench_sweep.size()) {
          std::cerr << "error: --sweep expects key=v1,v2,...\n\n" << app.help();
          return kExitUsage;
        }
        key = bench_sweep.substr(0, eq);
        values = bench_sweep.substr(eq + 1);
      }
      ann_index* raw = nullptr;
      Check(ann_index_build(bench_family.c_str(), data.get(), JoinParams(bench_params).c_str(),
                            seed, &raw));
      auto index = Wrap(raw);
      char* csv = nullptr;
      Check(ann_bench_csv(index.get(), queries.get(), bench_k,
                          key.empty() ? nullptr : key.c_str(),
                          values.empty() ? nullptr : values.c_str(),
                          JoinParams(bench_search).c_str(), bench_timing ? 1 : 0, &csv));
      Emit(csv);
    } else if (exp->parsed()) {
      std::vector<const char*> keys, values;
      for (std::size_t i = 0; i < exp_keys.size(); ++i) {
        if (exp->get_option("--" + exp_keys[i].first)->count() == 0) continue;
        keys.push_back(exp_keys[i].first.c_str());
        values.push_back(exp_values[i].c_str());
      }
      char* csv = nullptr;
      Check(ann_experiment_csv(exp_name.c_str(), keys.data(), values.data(), keys.size(),
                               seed, &csv));
      Emit(csv);
    } else if (selftest->parsed()) {
      char* csv = nullptr;
      int passed = 0;
      Check(ann_selftest_csv(seed, &passed, &csv));
      Emit(csv);
      return passed ? kExitOk : kExitFailure;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.status == ANN_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
  }
  return kExitOk;
}
