/* Copyright 2026 The annkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANNKIT_H_
#define ANNKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ANN_API __declspec(dllexport)
#else
#define ANN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ann_status {
  ANN_OK = 0,
  ANN_ERR_INVALID_ARGUMENT = 1,
  ANN_ERR_DIMENSION_MISMATCH = 2,
  ANN_ERR_IO = 3,
  ANN_ERR_FORMAT = 4,
  ANN_ERR_DUPLICATE = 5,
  ANN_ERR_EMPTY = 6,
  ANN_ERR_INTERNAL = 100
} ann_status;

typedef struct ann_collection ann_collection;
typedef struct ann_index ann_index;

/* Message for the last failing call on this thread; "" if none. */
ANN_API const char* ann_last_error(void);
ANN_API const char* ann_version(void);

/* Strings returned through char** are owned by the caller. */
ANN_API void ann_string_free(char* s);

/* ---- Collections ---- */

/* Copies m * d floats, row major. */
ANN_API ann_status ann_collection_create(const float* data, size_t m, size_t d,
                                         ann_collection** out);
/* dist: gaussian, uniform, uniform-positive or exponential. */
ANN_API ann_status ann_collection_generate(const char* dist, size_t m, size_t d,
                                           uint64_t seed, ann_collection** out);
ANN_API ann_status ann_collection_load_vecs(const char* path, ann_collection** out);
ANN_API ann_status ann_collection_save_vecs(const ann_collection* c, const char* path);
ANN_API size_t ann_collection_size(const ann_collection* c);
ANN_API size_t ann_collection_dim(const ann_collection* c);
/* Pointer to row i, or NULL when out of range. */
ANN_API const float* ann_collection_row(const ann_collection* c, size_t i);
ANN_API void ann_collection_free(ann_collection* c);

/* ---- Indexes ---- */

/* params is "key=value,..." and may be NULL or empty. The collection is
 * copied into the index. */
ANN_API ann_status ann_index_build(const char* family, const ann_collection* data,
                                   const char* params, uint64_t seed, ann_index** out);
ANN_API ann_status ann_index_save(const ann_index* index, const char* path);
ANN_API ann_status ann_index_load(const char* path, ann_index** out);

/* Writes up to k results into ids and scores (either may be NULL) and the
 * number written into *count. evaluations may be NULL. */
ANN_API ann_status ann_index_query(const ann_index* index, const float* q, size_t d,
                                   size_t k, const char* params, uint32_t* ids,
                                   double* scores, size_t* count, size_t* evaluations);
/* CSV with columns query,rank,id,score. */
ANN_API ann_status ann_index_query_csv(const ann_index* index,
                                       const ann_collection* queries, size_t k,
                                       const char* params, char** csv);
ANN_API const char* ann_index_family(const ann_index* index);
ANN_API size_t ann_index_size(const ann_index* index);
ANN_API size_t ann_index_dim(const ann_index* index);
ANN_API void ann_index_free(ann_index* index);

/* ---- Reports ---- */

/* sweep_key may be NULL for a single row. sweep_values is a comma list; for
 * the key "l" entries may be percentages of C such as "10%". */
ANN_API ann_status ann_bench_csv(const ann_index* index, const ann_collection* queries,
                                 size_t k, const char* sweep_key,
                                 const char* sweep_values, const char* search_params,
                                 int timing, char** csv);
/* name: coincidence, instability, wedge, boundedme or sketch. Options are
 * n key/value pairs such as ("dims", "4,16,64"). */
ANN_API ann_status ann_experiment_csv(const char* name, const char* const* keys,
                                      const char* const* values, size_t n,
                                      uint64_t seed, char** csv);
ANN_API ann_status ann_selftest_csv(uint64_t seed, int* passed, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* ANNKIT_H_ */
