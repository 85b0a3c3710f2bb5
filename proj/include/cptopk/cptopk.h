/* SPDX-License-Identifier: Apache-2.0 */

#ifndef CPTOPK_H
#define CPTOPK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CPTOPK_API __declspec(dllexport)
#else
#define CPTOPK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first four double as CLI exit codes. */
enum {
  CPTOPK_OK = 0,
  CPTOPK_ERR_IO = 1,
  CPTOPK_ERR_INFEASIBLE_K = 2,
  CPTOPK_ERR_CAPACITY = 3,
  CPTOPK_ERR_PARSE = 4,
  CPTOPK_ERR_BOUNDS = 5,
  CPTOPK_ERR_SHAPE = 6,
  CPTOPK_ERR_DEGENERATE = 7,
  CPTOPK_ERR_EXHAUSTION = 8,
  CPTOPK_ERR_INVALID_ARGUMENT = 9,
  CPTOPK_ERR_INTERNAL = 10
};

enum { CPTOPK_REAL = 0, CPTOPK_COMPLEX = 1 };

enum {
  CPTOPK_KEY_MAX = 0,
  CPTOPK_KEY_MIN = 1,
  CPTOPK_KEY_MAXABS = 2,
  CPTOPK_KEY_MAXREAL = 3,
  CPTOPK_KEY_MAXIMAG = 4
};

typedef struct cptopk_tensor cptopk_tensor;
typedef struct cptopk_result cptopk_result;

CPTOPK_API const char* cptopk_version(void);
/* Message of the last failed call on this thread ("" if none). */
CPTOPK_API const char* cptopk_last_error(void);
CPTOPK_API const char* cptopk_status_name(int status);
/* Parses "max", "min", "maxabs", "maxreal", "maximag". */
CPTOPK_API int cptopk_parse_key(const char* name, int* key);

/* Tensors. Indices are zero-based. Factor p is n_p x rank, row-major;
   complex factors interleave (re, im). */
CPTOPK_API int cptopk_tensor_create_real(size_t order, const size_t* dims, size_t rank,
                                         const double* const* factors, cptopk_tensor** out);
CPTOPK_API int cptopk_tensor_create_complex(size_t order, const size_t* dims, size_t rank,
                                            const double* const* factors, cptopk_tensor** out);
CPTOPK_API int cptopk_tensor_load(const char* path, cptopk_tensor** out);
CPTOPK_API int cptopk_tensor_save(const cptopk_tensor* t, const char* path);
CPTOPK_API int cptopk_tensor_from_cpt(const char* text, cptopk_tensor** out);
/* *out is released with cptopk_string_free. */
CPTOPK_API int cptopk_tensor_to_cpt(const cptopk_tensor* t, char** out);
CPTOPK_API int cptopk_tensor_negate(const cptopk_tensor* t, cptopk_tensor** out);
CPTOPK_API void cptopk_tensor_free(cptopk_tensor* t);

CPTOPK_API int cptopk_tensor_field(const cptopk_tensor* t);
CPTOPK_API size_t cptopk_tensor_order(const cptopk_tensor* t);
CPTOPK_API size_t cptopk_tensor_rank(const cptopk_tensor* t);
CPTOPK_API size_t cptopk_tensor_dim(const cptopk_tensor* t, size_t mode);
/* im may be NULL for real tensors. */
CPTOPK_API int cptopk_tensor_element(const cptopk_tensor* t, const size_t* index, double* re, double* im);

typedef struct cptopk_solver_config {
  size_t k;
  size_t extra;
  size_t block_size;
  int auto_block;
  size_t max_sweeps;
  size_t restarts;
  uint64_t seed;
  size_t subproblem_cap;
  int key;
} cptopk_solver_config;

CPTOPK_API void cptopk_solver_config_init(cptopk_solver_config* cfg);

CPTOPK_API int cptopk_solve(const cptopk_tensor* t, const cptopk_solver_config* cfg, cptopk_result** out);
CPTOPK_API int cptopk_oracle(const cptopk_tensor* t, size_t k, int key, size_t max_elems, cptopk_result** out);
/* Largest entry of a real tensor by shifted Hadamard power iteration (default settings). */
CPTOPK_API int cptopk_power_iteration(const cptopk_tensor* t, cptopk_result** out);

CPTOPK_API size_t cptopk_result_count(const cptopk_result* r);
CPTOPK_API size_t cptopk_result_order(const cptopk_result* r);
CPTOPK_API int cptopk_result_field(const cptopk_result* r);
CPTOPK_API int cptopk_result_value(const cptopk_result* r, size_t j, double* re, double* im);
/* Writes cptopk_result_order(r) zero-based entries. */
CPTOPK_API int cptopk_result_index(const cptopk_result* r, size_t j, size_t* index);
CPTOPK_API double cptopk_result_objective(const cptopk_result* r);
CPTOPK_API size_t cptopk_result_sweeps(const cptopk_result* r);
CPTOPK_API int cptopk_result_converged(const cptopk_result* r);
CPTOPK_API void cptopk_result_free(cptopk_result* r);

/* Generators. dist: "u-11", "u0075", "u01". fn: "griewank", "schwefel". */
CPTOPK_API int cptopk_gen_random(const char* dist, uint64_t seed, cptopk_tensor** out);
/* Uniform meshes over the function's domain with sizes[p] points on mode p. */
CPTOPK_API int cptopk_gen_function(const char* fn, size_t d, const size_t* sizes, cptopk_tensor** out);
/* QFT output state on p modes of q qubits; exact disables recompression. */
CPTOPK_API int cptopk_qft_state(size_t p, size_t q, uint64_t seed, int exact, cptopk_tensor** out);

/* Experiment runners; each returns a CSV document (schema=1) in *csv. */
typedef struct cptopk_bench_config {
  size_t trials;
  const char* dists;   /* comma list, NULL for all three */
  const char* methods; /* comma list such as "oracle,ours(2)+5,power"; NULL for the defaults */
  size_t k;
  int key;
  uint64_t seed;
  size_t restarts;
  size_t max_sweeps;
  size_t oracle_cap;
  size_t threads; /* 0: TENSOR_TOPK_THREADS or hardware concurrency */
  int timing;
  int verify;
} cptopk_bench_config;

typedef struct cptopk_func_config {
  const char* fn;
  size_t d;
  size_t n_min;
  size_t n_max;
  size_t runs;
  uint64_t seed;
  int uniform_grid;
  int include_optimum;
  size_t extra;
  size_t restarts;
  size_t oracle_cap;
  size_t threads;
  int timing;
} cptopk_func_config;

typedef struct cptopk_qft_config {
  const size_t* qubits; /* each a perfect square d = l*l */
  size_t qubit_count;
  const size_t* ks;
  size_t k_count;
  size_t trials;
  uint64_t seed;
  size_t block_size;
  size_t extra;
  size_t restarts;
  int exact;
  size_t rank_cap; /* 0: default */
  size_t oracle_cap;
  size_t threads;
  int timing;
} cptopk_qft_config;

CPTOPK_API void cptopk_bench_config_init(cptopk_bench_config* cfg);
CPTOPK_API void cptopk_func_config_init(cptopk_func_config* cfg);
CPTOPK_API void cptopk_qft_config_init(cptopk_qft_config* cfg);
CPTOPK_API int cptopk_bench_csv(const cptopk_bench_config* cfg, char** csv);
CPTOPK_API int cptopk_func_csv(const cptopk_func_config* cfg, char** csv);
CPTOPK_API int cptopk_qft_csv(const cptopk_qft_config* cfg, char** csv);

CPTOPK_API void cptopk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
