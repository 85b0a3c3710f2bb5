// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_EXPERIMENTS_HPP
#define CPTOPK_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cptopk/baselines.hpp"
#include "cptopk/generators.hpp"
#include "cptopk/qft.hpp"
#include "cptopk/solver.hpp"

namespace cptopk {

struct Method {
  enum class Kind { Oracle, Ours, Power };
  Kind kind = Kind::Ours;
  std::size_t block_size = 2;  ///< Ours only
  std::size_t extra = 0;       ///< Ours only

  /// "oracle", "power", "ours(2)+5".
  std::string name() const;
  static Method parse(std::string_view text);
};

/// oracle, ours(1)+1, ours(1)+5, ours(2)+1, ours(2)+5, and power when key is
/// Max and k is 1.
std::vector<Method> default_methods(std::size_t k, OrderingKey key);

/// Pool size: TENSOR_TOPK_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t worker_count(std::size_t requested = 0);

/// Runs body(0..n-1) on a worker pool; the first exception is rethrown after
/// all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Seed of the tensor drawn for (distribution, trial). Depends on nothing else,
/// so adding or removing methods never changes the draws.
std::uint64_t trial_seed(std::uint64_t master, Distribution dist, std::size_t trial);

struct BenchConfig {
  std::size_t trials = 100;
  std::vector<Distribution> dists{Distribution::Symmetric, Distribution::Quarter, Distribution::Unit};
  std::size_t k = 1;
  OrderingKey key = OrderingKey::Max;
  std::uint64_t seed = 0;
  std::vector<Method> methods;  ///< Empty: default_methods(k, key)
  std::size_t restarts = 5;
  std::size_t max_sweeps = 50;
  std::size_t oracle_cap = std::size_t{1} << 22;
  RandomSpec shape{};  ///< dist and seed are overwritten per trial
  std::size_t threads = 0;
  bool timing = true;
  bool verify = false;  ///< Re-read every reported value through element()
};

struct BenchRow {
  Distribution dist = Distribution::Unit;
  std::size_t trial = 0;
  std::uint64_t tensor_seed = 0;
  std::string method;
  std::size_t k = 0;
  std::size_t extra = 0;
  std::size_t block_size = 0;
  std::vector<std::size_t> dims;
  std::size_t rank = 0;
  std::vector<double> values;
  std::vector<IndexTuple> indices;
  std::vector<bool> matches;  ///< Empty when the trial has no oracle label
  bool labeled = false;
  double wall_ms = 0.0;
  std::string status = "ok";  ///< "ok" or the error code of a failed run
  std::vector<std::vector<double>> trace;  ///< Solver trace (ours only)
  std::size_t sweeps = 0;
  bool verified = true;
};

struct BenchSummary {
  Distribution dist = Distribution::Unit;
  std::string method;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t labeled = 0;
  std::size_t excluded = 0;  ///< Trials whose tensor exceeded the oracle cap
  std::size_t hits = 0;      ///< Matched positions over labeled trials
  std::size_t set_hits = 0;  ///< Labeled trials with every position matched

  /// hits / (k * labeled)
  double accuracy() const;
  double set_accuracy() const;
};

struct BenchReport {
  std::vector<BenchRow> rows;  ///< Trial order, then method order
  std::vector<BenchSummary> summaries;
};

/// Position j of `found` matches when its tuple is in the oracle's top-k set,
/// or when its key score ties the oracle's k-th score.
template <class T>
std::vector<bool> oracle_matches(const TopKResult<T>& oracle, const std::vector<T>& values,
                                 const std::vector<IndexTuple>& indices, OrderingKey key);

BenchReport run_bench(const BenchConfig& cfg);
std::string bench_csv(const BenchReport& report);

enum class GridKind { Uniform, Random };

struct FuncConfig {
  TestFunction function = TestFunction::Griewank;
  std::size_t d = 10;
  std::size_t n_min = 2;
  std::size_t n_max = 4;
  std::size_t runs = 50;
  std::uint64_t seed = 0;
  GridKind grid = GridKind::Uniform;
  /// Move the grid point closest to the global optimizer (0, or 420.9687 for
  /// Schwefel) onto it, in every mode.
  bool include_optimum = false;
  std::vector<std::size_t> block_sizes{1, 2};
  std::size_t extra = 0;
  std::size_t restarts = 5;
  std::size_t oracle_cap = std::size_t{1} << 22;
  std::size_t threads = 0;
  bool timing = true;
};

/// Grids for one run: per-mode sizes drawn from [n_min, n_max], then the
/// uniform mesh (Uniform) or sorted uniform draws over the domain (Random).
std::vector<std::vector<double>> draw_grids(const FuncConfig& cfg, Rng& rng);

struct FuncRow {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::vector<std::size_t> dims;
  double value = 0.0;
  IndexTuple index;
  std::vector<double> point;  ///< Grid coordinates of index
  std::optional<double> oracle_value;
  bool match = false;
  double wall_ms = 0.0;
  std::vector<std::vector<double>> trace;
};

struct FuncReport {
  std::vector<FuncRow> rows;
};

/// Minimum retrieval on function tensors; "oracle" rows hold the dense minimum
/// when the tensor fits oracle_cap.
FuncReport run_func(const FuncConfig& cfg);
std::string func_csv(const FuncReport& report, TestFunction fn);

struct QftBenchConfig {
  std::vector<std::size_t> sides{2, 3, 4};  ///< l, with p = q = l and d = l^2
  std::vector<std::size_t> ks{1, 5};
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t block_size = 2;
  std::size_t extra = 5;
  std::size_t restarts = 5;
  bool exact = false;
  std::optional<std::size_t> rank_cap;
  std::size_t oracle_cap = std::size_t{1} << 16;
  std::size_t threads = 0;
  bool timing = true;
};

struct QftRow {
  std::size_t qubits = 0;
  std::size_t trial = 0;
  std::uint64_t init_seed = 0;
  std::size_t k = 0;
  std::size_t rank = 0;
  std::vector<Complex> amplitudes;
  std::vector<double> magnitudes;
  std::vector<IndexTuple> indices;
  std::vector<std::uint64_t> basis_states;
  std::vector<bool> matches;  ///< Empty without a dense check
  bool labeled = false;
  double wall_ms = 0.0;
};

struct QftReport {
  std::vector<QftRow> rows;
};

QftReport run_qft(const QftBenchConfig& cfg);
std::string qft_csv(const QftReport& report);

}  // namespace cptopk

#endif
