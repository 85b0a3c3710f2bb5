// SPDX-License-Identifier: Apache-2.0

#include "cptopk/cptopk.h"

#include <cmath>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "cptopk/baselines.hpp"
#include "cptopk/cpt_io.hpp"
#include "cptopk/experiments.hpp"
#include "cptopk/generators.hpp"
#include "cptopk/qft.hpp"
#include "cptopk/solver.hpp"

using namespace cptopk;

struct cptopk_tensor {
  AnyCpTensor value;
};

struct cptopk_result {
  int field = CPTOPK_REAL;
  std::size_t order = 0;
  std::vector<Complex> values;
  std::vector<IndexTuple> indices;
  double objective = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
};

namespace {

thread_local std::string last_error;

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return CPTOPK_ERR_IO;
    case ErrorCode::InfeasibleK: return CPTOPK_ERR_INFEASIBLE_K;
    case ErrorCode::Capacity: return CPTOPK_ERR_CAPACITY;
    case ErrorCode::Parse: return CPTOPK_ERR_PARSE;
    case ErrorCode::Bounds: return CPTOPK_ERR_BOUNDS;
    case ErrorCode::Shape: return CPTOPK_ERR_SHAPE;
    case ErrorCode::Degenerate: return CPTOPK_ERR_DEGENERATE;
    case ErrorCode::Exhaustion: return CPTOPK_ERR_EXHAUSTION;
    case ErrorCode::InvalidArgument: return CPTOPK_ERR_INVALID_ARGUMENT;
  }
  return CPTOPK_ERR_INTERNAL;
}

int fail(int status, const std::string& what) {
  last_error = what;
  return status;
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CPTOPK_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CPTOPK_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(CPTOPK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CPTOPK_ERR_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw InvalidArgumentError(std::string(name) + " must not be null");
}

OrderingKey key_of(int key) {
  switch (key) {
    case CPTOPK_KEY_MAX: return OrderingKey::Max;
    case CPTOPK_KEY_MIN: return OrderingKey::Min;
    case CPTOPK_KEY_MAXABS: return OrderingKey::MaxAbs;
    case CPTOPK_KEY_MAXREAL: return OrderingKey::MaxReal;
    case CPTOPK_KEY_MAXIMAG: return OrderingKey::MaxImag;
  }
  throw InvalidArgumentError("unknown ordering key " + std::to_string(key));
}

int key_code(OrderingKey key) {
  switch (key) {
    case OrderingKey::Max: return CPTOPK_KEY_MAX;
    case OrderingKey::Min: return CPTOPK_KEY_MIN;
    case OrderingKey::MaxAbs: return CPTOPK_KEY_MAXABS;
    case OrderingKey::MaxReal: return CPTOPK_KEY_MAXREAL;
    case OrderingKey::MaxImag: return CPTOPK_KEY_MAXIMAG;
  }
  return CPTOPK_KEY_MAX;
}

template <class T>
cptopk_result* wrap(const TopKResult<T>& r, std::size_t order) {
  auto* out = new cptopk_result;
  out->field = is_complex_v<T> ? CPTOPK_COMPLEX : CPTOPK_REAL;
  out->order = order;
  for (const T& v : r.values) out->values.emplace_back(v);
  out->indices = r.indices;
  out->objective = r.objective;
  out->sweeps = r.sweeps_used;
  out->converged = r.converged;
  return out;
}

template <class T>
CpTensor<T> build(std::size_t order, const std::size_t* dims, std::size_t rank, const double* const* factors) {
  require(dims, "dims");
  require(factors, "factors");
  if (order == 0 || rank == 0) throw InvalidArgumentError("order and rank must be positive");
  constexpr std::size_t stride = is_complex_v<T> ? 2 : 1;
  std::vector<Matrix<T>> fs;
  for (std::size_t p = 0; p < order; ++p) {
    require(factors[p], "factor");
    Matrix<T> m(static_cast<Eigen::Index>(dims[p]), static_cast<Eigen::Index>(rank));
    for (std::size_t i = 0; i < dims[p]; ++i)
      for (std::size_t r = 0; r < rank; ++r) {
        const double* e = factors[p] + stride * (i * rank + r);
        if constexpr (is_complex_v<T>)
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = Complex(e[0], e[1]);
        else
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = e[0];
      }
    fs.push_back(std::move(m));
  }
  return CpTensor<T>(std::move(fs));
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split(const char* list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

SolverConfig solver_config(const cptopk_solver_config& c) {
  SolverConfig s;
  s.k = c.k;
  s.extra = c.extra;
  s.block_size = c.block_size;
  s.auto_block = c.auto_block != 0;
  s.max_sweeps = c.max_sweeps;
  s.restarts = c.restarts;
  s.seed = c.seed;
  s.subproblem_cap = c.subproblem_cap;
  s.key = key_of(c.key);
  return s;
}

}  // namespace

extern "C" {

const char* cptopk_version(void) { return "0.1.0"; }

const char* cptopk_last_error(void) { return last_error.c_str(); }

const char* cptopk_status_name(int status) {
  switch (status) {
    case CPTOPK_OK: return "ok";
    case CPTOPK_ERR_IO: return "io";
    case CPTOPK_ERR_INFEASIBLE_K: return "infeasible_k";
    case CPTOPK_ERR_CAPACITY: return "capacity";
    case CPTOPK_ERR_PARSE: return "parse";
    case CPTOPK_ERR_BOUNDS: return "bounds";
    case CPTOPK_ERR_SHAPE: return "shape";
    case CPTOPK_ERR_DEGENERATE: return "degenerate";
    case CPTOPK_ERR_EXHAUSTION: return "exhaustion";
    case CPTOPK_ERR_INVALID_ARGUMENT: return "invalid_argument";
    default: return "internal";
  }
}

int cptopk_parse_key(const char* name, int* key) {
  return guarded([&] {
    require(name, "name");
    require(key, "key");
    *key = key_code(parse_ordering_key(name));
  });
}

int cptopk_tensor_create_real(size_t order, const size_t* dims, size_t rank, const double* const* factors,
                              cptopk_tensor** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cptopk_tensor{build<Real>(order, dims, rank, factors)};
  });
}

int cptopk_tensor_create_complex(size_t order, const size_t* dims, size_t rank, const double* const* factors,
                                 cptopk_tensor** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cptopk_tensor{build<Complex>(order, dims, rank, factors)};
  });
}

int cptopk_tensor_load(const char* path, cptopk_tensor** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cptopk_tensor{load_cpt(path)};
  });
}

int cptopk_tensor_save(const cptopk_tensor* t, const char* path) {
  return guarded([&] {
    require(t, "tensor");
    require(path, "path");
    save_cpt(path, t->value);
  });
}

int cptopk_tensor_from_cpt(const char* text, cptopk_tensor** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cptopk_tensor{parse_cpt(text)};
  });
}

int cptopk_tensor_to_cpt(const cptopk_tensor* t, char** out) {
  return guarded([&] {
    require(t, "tensor");
    require(out, "out");
    *out = copy_string(format_cpt(t->value));
  });
}

int cptopk_tensor_negate(const cptopk_tensor* t, cptopk_tensor** out) {
  return guarded([&] {
    require(t, "tensor");
    require(out, "out");
    *out = new cptopk_tensor{std::visit([](const auto& a) -> AnyCpTensor { return negate(a); }, t->value)};
  });
}

void cptopk_tensor_free(cptopk_tensor* t) { delete t; }

int cptopk_tensor_field(const cptopk_tensor* t) {
  return t && std::holds_alternative<CpTensor<Complex>>(t->value) ? CPTOPK_COMPLEX : CPTOPK_REAL;
}

size_t cptopk_tensor_order(const cptopk_tensor* t) {
  return t ? std::visit([](const auto& a) { return a.order(); }, t->value) : 0;
}

size_t cptopk_tensor_rank(const cptopk_tensor* t) {
  return t ? std::visit([](const auto& a) { return a.rank(); }, t->value) : 0;
}

size_t cptopk_tensor_dim(const cptopk_tensor* t, size_t mode) {
  if (!t || mode >= cptopk_tensor_order(t)) return 0;
  return std::visit([&](const auto& a) { return a.dim(mode); }, t->value);
}

int cptopk_tensor_element(const cptopk_tensor* t, const size_t* index, double* re, double* im) {
  return guarded([&] {
    require(t, "tensor");
    require(index, "index");
    require(re, "re");
    std::visit(
        [&](const auto& a) {
          const Complex v(element(a, IndexTuple(index, index + a.order())));
          *re = v.real();
          if (im) *im = v.imag();
        },
        t->value);
  });
}

void cptopk_solver_config_init(cptopk_solver_config* cfg) {
  if (!cfg) return;
  const SolverConfig d;
  *cfg = {d.k, d.extra, d.block_size, d.auto_block ? 1 : 0, d.max_sweeps, d.restarts, d.seed, d.subproblem_cap,
          key_code(d.key)};
}

int cptopk_solve(const cptopk_tensor* t, const cptopk_solver_config* cfg, cptopk_result** out) {
  return guarded([&] {
    require(t, "tensor");
    require(cfg, "config");
    require(out, "out");
    const SolverConfig sc = solver_config(*cfg);
    *out = std::visit([&](const auto& a) { return wrap(solve(a, sc), a.order()); }, t->value);
  });
}

int cptopk_oracle(const cptopk_tensor* t, size_t k, int key, size_t max_elems, cptopk_result** out) {
  return guarded([&] {
    require(t, "tensor");
    require(out, "out");
    const OrderingKey kk = key_of(key);
    *out = std::visit([&](const auto& a) { return wrap(oracle_topk(a, k, kk, max_elems), a.order()); }, t->value);
  });
}

int cptopk_power_iteration(const cptopk_tensor* t, cptopk_result** out) {
  return guarded([&] {
    require(t, "tensor");
    require(out, "out");
    const auto* a = std::get_if<CpTensor<Real>>(&t->value);
    if (!a) throw InvalidArgumentError("power iteration needs a real tensor");
    const PowerIterResult p = power_iteration_max(*a);
    TopKResult<Real> r;
    r.values = {p.value};
    r.indices = {p.index};
    r.objective = p.value;
    r.sweeps_used = p.iterations;
    r.converged = p.converged;
    *out = wrap(r, a->order());
  });
}

size_t cptopk_result_count(const cptopk_result* r) { return r ? r->values.size() : 0; }
size_t cptopk_result_order(const cptopk_result* r) { return r ? r->order : 0; }
int cptopk_result_field(const cptopk_result* r) { return r ? r->field : CPTOPK_REAL; }

int cptopk_result_value(const cptopk_result* r, size_t j, double* re, double* im) {
  return guarded([&] {
    require(r, "result");
    require(re, "re");
    if (j >= r->values.size()) throw BoundsError("result position out of range");
    *re = r->values[j].real();
    if (im) *im = r->values[j].imag();
  });
}

int cptopk_result_index(const cptopk_result* r, size_t j, size_t* index) {
  return guarded([&] {
    require(r, "result");
    require(index, "index");
    if (j >= r->indices.size()) throw BoundsError("result position out of range");
    std::copy(r->indices[j].begin(), r->indices[j].end(), index);
  });
}

double cptopk_result_objective(const cptopk_result* r) { return r ? r->objective : 0.0; }
size_t cptopk_result_sweeps(const cptopk_result* r) { return r ? r->sweeps : 0; }
int cptopk_result_converged(const cptopk_result* r) { return r && r->converged ? 1 : 0; }
void cptopk_result_free(cptopk_result* r) { delete r; }

int cptopk_gen_random(const char* dist, uint64_t seed, cptopk_tensor** out) {
  return guarded([&] {
    require(dist, "dist");
    require(out, "out");
    RandomSpec spec;
    spec.dist = parse_distribution(dist);
    spec.seed = seed;
    *out = new cptopk_tensor{gen_random_cp(spec)};
  });
}

int cptopk_gen_function(const char* fn, size_t d, const size_t* sizes, cptopk_tensor** out) {
  return guarded([&] {
    require(fn, "fn");
    require(sizes, "sizes");
    require(out, "out");
    GridSpec spec{parse_test_function(fn), std::vector<std::size_t>(sizes, sizes + d)};
    *out = new cptopk_tensor{gen_function(spec.function, uniform_grids(spec))};
  });
}

int cptopk_qft_state(size_t p, size_t q, uint64_t seed, int exact, cptopk_tensor** out) {
  return guarded([&] {
    require(out, "out");
    const QubitLayout layout = QubitLayout::make(p, q);
    const auto cap = exact ? std::nullopt : default_rank_cap(layout.qubits);
    *out = new cptopk_tensor{
        run_circuit(qft_initial_state(layout, seed), qft_circuit(layout.qubits), layout, cap)};
  });
}

void cptopk_bench_config_init(cptopk_bench_config* cfg) {
  if (!cfg) return;
  const BenchConfig d;
  *cfg = {d.trials, nullptr, nullptr, d.k, key_code(d.key), d.seed, d.restarts, d.max_sweeps, d.oracle_cap,
          0, 1, 0};
}

void cptopk_func_config_init(cptopk_func_config* cfg) {
  if (!cfg) return;
  const FuncConfig d;
  *cfg = {"griewank", d.d, d.n_min, d.n_max, d.runs, d.seed, d.grid == GridKind::Uniform ? 1 : 0, d.include_optimum ? 1 : 0, d.extra,
          d.restarts, d.oracle_cap, 0, 1};
}

void cptopk_qft_config_init(cptopk_qft_config* cfg) {
  if (!cfg) return;
  const QftBenchConfig d;
  *cfg = {nullptr, 0, nullptr, 0, d.trials, d.seed, d.block_size, d.extra, d.restarts, 0, 0, d.oracle_cap, 0, 1};
}

int cptopk_bench_csv(const cptopk_bench_config* cfg, char** csv) {
  return guarded([&] {
    require(cfg, "config");
    require(csv, "csv");
    BenchConfig b;
    b.trials = cfg->trials;
    if (cfg->dists) {
      b.dists.clear();
      for (const auto& name : split(cfg->dists)) b.dists.push_back(parse_distribution(name));
      if (b.dists.empty()) throw InvalidArgumentError("empty distribution list");
    }
    if (cfg->methods)
      for (const auto& name : split(cfg->methods)) b.methods.push_back(Method::parse(name));
    b.k = cfg->k;
    b.key = key_of(cfg->key);
    b.seed = cfg->seed;
    b.restarts = cfg->restarts;
    b.max_sweeps = cfg->max_sweeps;
    b.oracle_cap = cfg->oracle_cap;
    b.threads = cfg->threads;
    b.timing = cfg->timing != 0;
    b.verify = cfg->verify != 0;
    const BenchReport report = run_bench(b);
    if (b.verify)
      for (const BenchRow& row : report.rows)
        if (!row.verified)
          throw ShapeError("value of " + row.method + " in trial " + std::to_string(row.trial + 1) +
                           " does not match element() at its index");
    *csv = copy_string(bench_csv(report));
  });
}

int cptopk_func_csv(const cptopk_func_config* cfg, char** csv) {
  return guarded([&] {
    require(cfg, "config");
    require(csv, "csv");
    require(cfg->fn, "fn");
    FuncConfig f;
    f.function = parse_test_function(cfg->fn);
    f.d = cfg->d;
    f.n_min = cfg->n_min;
    f.n_max = cfg->n_max;
    f.runs = cfg->runs;
    f.seed = cfg->seed;
    f.grid = cfg->uniform_grid ? GridKind::Uniform : GridKind::Random;
    f.include_optimum = cfg->include_optimum != 0;
    f.extra = cfg->extra;
    f.restarts = cfg->restarts;
    f.oracle_cap = cfg->oracle_cap;
    f.threads = cfg->threads;
    f.timing = cfg->timing != 0;
    *csv = copy_string(func_csv(run_func(f), f.function));
  });
}

int cptopk_qft_csv(const cptopk_qft_config* cfg, char** csv) {
  return guarded([&] {
    require(cfg, "config");
    require(csv, "csv");
    QftBenchConfig q;
    if (cfg->qubits && cfg->qubit_count) {
      q.sides.clear();
      for (std::size_t i = 0; i < cfg->qubit_count; ++i) {
        const auto l = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(cfg->qubits[i]))));
        if (l == 0 || l * l != cfg->qubits[i])
          throw InvalidArgumentError("qubit count " + std::to_string(cfg->qubits[i]) +
                                     " is not a perfect square (p = q = sqrt(d))");
        q.sides.push_back(l);
      }
    }
    if (cfg->ks && cfg->k_count) q.ks.assign(cfg->ks, cfg->ks + cfg->k_count);
    q.trials = cfg->trials;
    q.seed = cfg->seed;
    q.block_size = cfg->block_size;
    q.extra = cfg->extra;
    q.restarts = cfg->restarts;
    q.exact = cfg->exact != 0;
    if (cfg->rank_cap) q.rank_cap = cfg->rank_cap;
    q.oracle_cap = cfg->oracle_cap;
    q.threads = cfg->threads;
    q.timing = cfg->timing != 0;
    *csv = copy_string(qft_csv(run_qft(q)));
  });
}

void cptopk_string_free(char* s) { delete[] s; }

}  // extern "C"
