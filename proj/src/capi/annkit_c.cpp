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

#include "annkit.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "annkit/harness.hpp"

struct ann_collection {
  annkit::Collection data;
};

struct ann_index {
  annkit::harness::Index index;
};

namespace {

namespace h = annkit::harness;

thread_local std::string g_last_error;

template <typename F>
ann_status Guard(F&& f) {
  g_last_error.clear();
  try {
    f();
    return ANN_OK;
  } catch (const annkit::Error& e) {
    g_last_error = e.what();
    return static_cast<ann_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return ANN_ERR_INTERNAL;
}

void Require(bool cond, const char* what) {
  if (!cond) annkit::Throw(annkit::ErrorCode::kInvalidArgument, what);
}

char* Duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

h::Params ParamsOf(const char* text) { return h::ParseParams(text ? text : ""); }

}  // namespace

extern "C" {

const char* ann_last_error(void) { return g_last_error.c_str(); }

const char* ann_version(void) { return "0.1.0"; }

void ann_string_free(char* s) { std::free(s); }

ann_status ann_collection_create(const float* data, size_t m, size_t d,
                                 ann_collection** out) {
  return Guard([&] {
    Require(out != nullptr && (data != nullptr || m * d == 0), "null argument");
    Require(m >= 1 && d >= 1, "collection needs m >= 1 and d >= 1");
    std::vector<float> v(data, data + m * d);
    auto* c = new ann_collection{annkit::Collection(std::move(v), d)};
    c->data.Validate();
    *out = c;
  });
}

ann_status ann_collection_generate(const char* dist, size_t m, size_t d,
                                   uint64_t seed, ann_collection** out) {
  return Guard([&] {
    Require(dist != nullptr && out != nullptr, "null argument");
    *out = new ann_collection{h::Generate({h::ParseDistribution(dist), m, d, seed})};
  });
}

ann_status ann_collection_load_vecs(const char* path, ann_collection** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new ann_collection{h::LoadVecs(path)};
  });
}

ann_status ann_collection_save_vecs(const ann_collection* c, const char* path) {
  return Guard([&] {
    Require(c != nullptr && path != nullptr, "null argument");
    h::SaveVecs(path, c->data);
  });
}

size_t ann_collection_size(const ann_collection* c) { return c ? c->data.size() : 0; }

size_t ann_collection_dim(const ann_collection* c) { return c ? c->data.dim() : 0; }

const float* ann_collection_row(const ann_collection* c, size_t i) {
  if (!c || i >= c->data.size()) return nullptr;
  return c->data.row(i).data();
}

void ann_collection_free(ann_collection* c) { delete c; }

ann_status ann_index_build(const char* family, const ann_collection* data,
                           const char* params, uint64_t seed, ann_index** out) {
  return Guard([&] {
    Require(family != nullptr && data != nullptr && out != nullptr, "null argument");
    *out = new ann_index{
        h::Index::Build(h::ParseFamily(family), data->data, ParamsOf(params), seed)};
  });
}

ann_status ann_index_save(const ann_index* index, const char* path) {
  return Guard([&] {
    Require(index != nullptr && path != nullptr, "null argument");
    index->index.Save(path);
  });
}

ann_status ann_index_load(const char* path, ann_index** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new ann_index{h::Index::Load(path)};
  });
}

ann_status ann_index_query(const ann_index* index, const float* q, size_t d,
                           size_t k, const char* params, uint32_t* ids,
                           double* scores, size_t* count, size_t* evaluations) {
  return Guard([&] {
    Require(index != nullptr && q != nullptr && count != nullptr, "null argument");
    const auto out = index->index.Query(std::span<const float>(q, d), k, ParamsOf(params));
    const auto& nb = out.result.neighbors;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (ids) ids[i] = nb[i].id;
      if (scores) scores[i] = nb[i].score;
    }
    *count = nb.size();
    if (evaluations) *evaluations = out.evaluations;
  });
}

ann_status ann_index_query_csv(const ann_index* index, const ann_collection* queries,
                               size_t k, const char* params, char** csv) {
  return Guard([&] {
    Require(index != nullptr && queries != nullptr && csv != nullptr, "null argument");
    const auto p = ParamsOf(params);
    h::Report report({"query", "rank", "id", "score"});
    for (std::size_t j = 0; j < queries->data.size(); ++j) {
      const auto out = index->index.Query(queries->data.row(j), k, p);
      for (std::size_t r = 0; r < out.result.neighbors.size(); ++r) {
        const auto& nb = out.result.neighbors[r];
        report.AddRow({std::to_string(j), std::to_string(r), std::to_string(nb.id),
                       h::FormatNumber(nb.score)});
      }
    }
    *csv = Duplicate(report.ToCsv());
  });
}

const char* ann_index_family(const ann_index* index) {
  return index ? h::ToString(index->index.family()).data() : "";
}

size_t ann_index_size(const ann_index* index) {
  return index ? index->index.data().size() : 0;
}

size_t ann_index_dim(const ann_index* index) {
  return index ? index->index.data().dim() : 0;
}

void ann_index_free(ann_index* index) { delete index; }

ann_status ann_bench_csv(const ann_index* index, const ann_collection* queries,
                         size_t k, const char* sweep_key, const char* sweep_values,
                         const char* search_params, int timing, char** csv) {
  return Guard([&] {
    Require(index != nullptr && queries != nullptr && csv != nullptr, "null argument");
    h::BenchmarkOptions o;
    o.k = k;
    o.search = ParamsOf(search_params);
    o.timing = timing != 0;
    if (sweep_key && *sweep_key) {
      Require(sweep_values != nullptr && *sweep_values, "sweep values required");
      o.sweep_key = sweep_key;
      std::string_view text(sweep_values);
      std::size_t start = 0;
      while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        Require(end > start, "empty sweep value");
        o.sweep_values.emplace_back(text.substr(start, end - start));
        start = end + 1;
      }
    }
    *csv = Duplicate(h::Benchmark(index->index, queries->data, o).ToCsv());
  });
}

ann_status ann_experiment_csv(const char* name, const char* const* keys,
                              const char* const* values, size_t n, uint64_t seed,
                              char** csv) {
  return Guard([&] {
    Require(name != nullptr && csv != nullptr && (n == 0 || (keys && values)),
            "null argument");
    h::Params params;
    for (std::size_t i = 0; i < n; ++i) {
      Require(keys[i] != nullptr && values[i] != nullptr, "null option");
      params[keys[i]] = values[i];
    }
    *csv = Duplicate(h::RunExperiment(name, params, seed).ToCsv());
  });
}

ann_status ann_selftest_csv(uint64_t seed, int* passed, char** csv) {
  return Guard([&] {
    Require(csv != nullptr, "null argument");
    bool ok = false;
    *csv = Duplicate(h::SelfTest(seed, &ok).ToCsv());
    if (passed) *passed = ok ? 1 : 0;
  });
}

}  // extern "C"
