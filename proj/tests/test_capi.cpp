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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "annkit.h"

namespace {

std::string Take(char* s) {
  std::string out(s ? s : "");
  ann_string_free(s);
  return out;
}

TEST(CApi, VersionAndErrors) {
  EXPECT_STREQ(ann_version(), "0.1.0");
  ann_collection* c = nullptr;
  EXPECT_EQ(ann_collection_generate("cauchy", 10, 2, 1, &c), ANN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(ann_last_error()), "");
  EXPECT_EQ(ann_collection_generate("gaussian", 10, 2, 1, nullptr), ANN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ann_collection_load_vecs("/nonexistent/a.fvecs", &c), ANN_ERR_IO);
  ann_collection_free(nullptr);
  ann_index_free(nullptr);
}

TEST(CApi, CollectionAccess) {
  const float data[] = {1, 2, 3, 4, 5, 6};
  ann_collection* c = nullptr;
  ASSERT_EQ(ann_collection_create(data, 3, 2, &c), ANN_OK);
  EXPECT_EQ(ann_collection_size(c), 3u);
  EXPECT_EQ(ann_collection_dim(c), 2u);
  EXPECT_EQ(ann_collection_row(c, 1)[1], 4.0f);
  EXPECT_EQ(ann_collection_row(c, 3), nullptr);
  ann_collection_free(c);
  EXPECT_EQ(ann_collection_create(data, 0, 2, &c), ANN_ERR_INVALID_ARGUMENT);
}

TEST(CApi, BuildQuerySaveLoad) {
  ann_collection* data = nullptr;
  ASSERT_EQ(ann_collection_generate("gaussian", 500, 8, 1, &data), ANN_OK);
  ann_index* idx = nullptr;
  EXPECT_EQ(ann_index_build("hnsw", data, nullptr, 1, &idx), ANN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ann_index_build("ivf", data, "C", 1, &idx), ANN_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(ann_index_build("kdtree", data, "leaf=8", 1, &idx), ANN_OK);
  EXPECT_STREQ(ann_index_family(idx), "kdtree");
  EXPECT_EQ(ann_index_size(idx), 500u);
  EXPECT_EQ(ann_index_dim(idx), 8u);

  const float* q = ann_collection_row(data, 10);
  std::vector<uint32_t> ids(5);
  std::vector<double> scores(5);
  size_t count = 0, evals = 0;
  ASSERT_EQ(ann_index_query(idx, q, 8, 5, nullptr, ids.data(), scores.data(), &count, &evals), ANN_OK);
  EXPECT_EQ(count, 5u);
  EXPECT_EQ(ids[0], 10u);
  EXPECT_EQ(scores[0], 0.0);
  EXPECT_GT(evals, 0u);
  EXPECT_EQ(ann_index_query(idx, q, 7, 5, nullptr, ids.data(), nullptr, &count, nullptr),
            ANN_ERR_DIMENSION_MISMATCH);

  const std::string path = testing::TempDir() + "annkit_capi_test.idx";
  ASSERT_EQ(ann_index_save(idx, path.c_str()), ANN_OK);
  ann_index* back = nullptr;
  ASSERT_EQ(ann_index_load(path.c_str(), &back), ANN_OK);
  ann_collection* queries = nullptr;
  ASSERT_EQ(ann_collection_generate("gaussian", 4, 8, 2, &queries), ANN_OK);
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(ann_index_query_csv(idx, queries, 3, nullptr, &a), ANN_OK);
  ASSERT_EQ(ann_index_query_csv(back, queries, 3, nullptr, &b), ANN_OK);
  const auto csv = Take(a);
  EXPECT_EQ(csv, Take(b));
  EXPECT_EQ(csv.rfind("query,rank,id,score\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  std::fputs("garbage", f);
  std::fclose(f);
  ann_index* bad = nullptr;
  EXPECT_EQ(ann_index_load(path.c_str(), &bad), ANN_ERR_FORMAT);
  std::remove(path.c_str());

  ann_index_free(back);
  ann_index_free(idx);
  ann_collection_free(queries);
  ann_collection_free(data);
}

TEST(CApi, Reports) {
  ann_collection* data = nullptr;
  ann_collection* queries = nullptr;
  ASSERT_EQ(ann_collection_generate("gaussian", 400, 8, 3, &data), ANN_OK);
  ASSERT_EQ(ann_collection_generate("gaussian", 10, 8, 4, &queries), ANN_OK);
  ann_index* idx = nullptr;
  ASSERT_EQ(ann_index_build("ivf", data, "C=10", 5, &idx), ANN_OK);
  char* csv = nullptr;
  ASSERT_EQ(ann_bench_csv(idx, queries, 5, "l", "1,100%", nullptr, 0, &csv), ANN_OK);
  const auto bench = Take(csv);
  EXPECT_EQ(bench.rfind("family,param,value,k,recall,evals_per_query\n", 0), 0u);
  EXPECT_NE(bench.find("ivf,l,100%,5,1,"), std::string::npos);

  const char* keys[] = {"dims", "m"};
  const char* values[] = {"4,8", "50"};
  ASSERT_EQ(ann_experiment_csv("coincidence", keys, values, 2, 1, &csv), ANN_OK);
  const auto exp = Take(csv);
  EXPECT_EQ(std::count(exp.begin(), exp.end(), '\n'), 3);
  EXPECT_EQ(ann_experiment_csv("nope", nullptr, nullptr, 0, 1, &csv), ANN_ERR_INVALID_ARGUMENT);

  int passed = 0;
  ASSERT_EQ(ann_selftest_csv(1, &passed, &csv), ANN_OK);
  EXPECT_EQ(passed, 1);
  Take(csv);

  ann_index_free(idx);
  ann_collection_free(queries);
  ann_collection_free(data);
}

}  // namespace
