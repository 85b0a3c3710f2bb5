// SPDX-License-Identifier: Apache-2.0

#include "cptopk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace cptopk {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <class Range, class F>
std::string joined(const Range& items, F fmt) {
  std::string s;
  bool first = true;
  for (const auto& x : items) {
    if (!first) s += ';';
    first = false;
    s += fmt(x);
  }
  return s;
}

std::string dims_text(const std::vector<std::size_t>& dims) {
  return joined(dims, [](std::size_t n) { return std::to_string(n); });
}

std::string indices_text(const std::vector<IndexTuple>& indices) {
  return joined(indices, [](const IndexTuple& t) { return format_index(t); });
}

std::string matches_text(const std::vector<bool>& m) {
  return joined(m, [](bool b) { return std::string(b ? "1" : "0"); });
}

std::string code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Bounds: return "bounds";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::InfeasibleK: return "infeasible_k";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Exhaustion: return "exhaustion";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "error";
}

}  // namespace

std::string Method::name() const {
  switch (kind) {
    case Kind::Oracle: return "oracle";
    case Kind::Power: return "power";
    case Kind::Ours: return "ours(" + std::to_string(block_size) + ")+" + std::to_string(extra);
  }
  return "ours";
}

Method Method::parse(std::string_view text) {
  if (text == "oracle") return {Kind::Oracle, 0, 0};
  if (text == "power") return {Kind::Power, 0, 0};
  const auto bad = [&] {
    return InvalidArgumentError("unknown method '" + std::string(text) + "' (expected oracle, power or ours(S)+K)");
  };
  if (text.substr(0, 5) != "ours(") throw bad();
  const std::size_t close = text.find(")+");
  if (close == std::string_view::npos) throw bad();
  Method m{Kind::Ours, 0, 0};
  const char* b = text.data() + 5;
  const char* e = text.data() + close;
  if (std::from_chars(b, e, m.block_size).ptr != e || m.block_size == 0) throw bad();
  b = text.data() + close + 2;
  e = text.data() + text.size();
  if (b == e || std::from_chars(b, e, m.extra).ptr != e) throw bad();
  return m;
}

std::vector<Method> default_methods(std::size_t k, OrderingKey key) {
  std::vector<Method> m{{Method::Kind::Oracle, 0, 0}};
  for (std::size_t s : {1, 2})
    for (std::size_t extra : {1, 5}) m.push_back({Method::Kind::Ours, s, extra});
  if (k == 1 && key == OrderingKey::Max) m.push_back({Method::Kind::Power, 0, 0});
  return m;
}

std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TENSOR_TOPK_THREADS")) {
    std::size_t n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    if (std::from_chars(env, end, n).ptr == end && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::min(std::max<std::size_t>(threads, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t trial_seed(std::uint64_t master, Distribution dist, std::size_t trial) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(dist)), trial);
}

double BenchSummary::accuracy() const {
  return labeled == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(k * labeled);
}

double BenchSummary::set_accuracy() const {
  return labeled == 0 ? 0.0 : static_cast<double>(set_hits) / static_cast<double>(labeled);
}

template <class T>
std::vector<bool> oracle_matches(const TopKResult<T>& oracle, const std::vector<T>& values,
                                 const std::vector<IndexTuple>& indices, OrderingKey key) {
  const std::set<IndexTuple> truth(oracle.indices.begin(), oracle.indices.end());
  const double kth = oracle.values.empty() ? 0.0 : key_score(oracle.values.back(), key);
  std::vector<bool> m;
  for (std::size_t j = 0; j < indices.size(); ++j)
    m.push_back(truth.count(indices[j]) > 0 || (!oracle.values.empty() && key_score(values[j], key) >= kth));
  return m;
}

template std::vector<bool> oracle_matches<Real>(const TopKResult<Real>&, const std::vector<Real>&,
                                                const std::vector<IndexTuple>&, OrderingKey);
template std::vector<bool> oracle_matches<Complex>(const TopKResult<Complex>&, const std::vector<Complex>&,
                                                   const std::vector<IndexTuple>&, OrderingKey);

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.trials == 0) throw InvalidArgumentError("bench needs at least one trial");
  if (cfg.k == 0) throw InvalidArgumentError("k must be positive");
  const std::vector<Method> methods = cfg.methods.empty() ? default_methods(cfg.k, cfg.key) : cfg.methods;
  for (const Method& m : methods)
    if (m.kind == Method::Kind::Power && (cfg.k != 1 || cfg.key != OrderingKey::Max))
      throw InvalidArgumentError("power iteration only retrieves the single largest entry (k=1, key max)");

  const std::size_t total = cfg.dists.size() * cfg.trials;
  std::vector<std::vector<BenchRow>> per_trial(total);
  std::vector<char> slot_labeled(total, 0);

  parallel_for(total, worker_count(cfg.threads), [&](std::size_t slot) {
    const Distribution dist = cfg.dists[slot / cfg.trials];
    const std::size_t trial = slot % cfg.trials;
    RandomSpec spec = cfg.shape;
    spec.dist = dist;
    spec.seed = trial_seed(cfg.seed, dist, trial);
    const CpTensor<Real> a = gen_random_cp(spec);

    std::optional<TopKResult<Real>> oracle;
    double oracle_ms = 0.0;
    if (saturating_volume(a.dims()) <= cfg.oracle_cap) {
      const auto start = Clock::now();
      oracle = oracle_topk(a, std::min(cfg.k, a.volume()), cfg.key, cfg.oracle_cap);
      oracle_ms = elapsed_ms(start);
      slot_labeled[slot] = 1;
    }

    auto& rows = per_trial[slot];
    for (const Method& m : methods) {
      BenchRow row;
      row.dist = dist;
      row.trial = trial;
      row.tensor_seed = spec.seed;
      row.method = m.name();
      row.k = cfg.k;
      row.extra = m.extra;
      row.block_size = m.block_size;
      row.dims = a.dims();
      row.rank = a.rank();
      row.labeled = oracle.has_value();
      const auto start = Clock::now();
      try {
        switch (m.kind) {
          case Method::Kind::Oracle:
            if (!oracle) continue;
            row.values = oracle->values;
            row.indices = oracle->indices;
            break;
          case Method::Kind::Ours: {
            SolverConfig sc;
            sc.k = cfg.k;
            sc.extra = m.extra;
            sc.block_size = m.block_size;
            sc.restarts = cfg.restarts;
            sc.max_sweeps = cfg.max_sweeps;
            sc.key = cfg.key;
            sc.seed = derive_seed(spec.seed, 0x50);
            TopKResult<Real> r = solve(a, sc);
            row.block_size = std::min(m.block_size, a.order());
            row.values = std::move(r.values);
            row.indices = std::move(r.indices);
            row.trace = std::move(r.trace);
            row.sweeps = r.sweeps_used;
            break;
          }
          case Method::Kind::Power: {
            PowerIterResult r = power_iteration_max(a);
            row.values = {r.value};
            row.indices = {r.index};
            row.sweeps = r.iterations;
            break;
          }
        }
      } catch (const Error& e) {
        row.status = code_name(e.code());
      }
      row.wall_ms = m.kind == Method::Kind::Oracle ? oracle_ms : elapsed_ms(start);
      if (!cfg.timing) row.wall_ms = 0.0;
      if (oracle && row.status == "ok") row.matches = oracle_matches(*oracle, row.values, row.indices, cfg.key);
      if (cfg.verify)
        for (std::size_t j = 0; j < row.indices.size(); ++j)
          if (element(a, row.indices[j]) != row.values[j]) row.verified = false;
      rows.push_back(std::move(row));
    }
  });

  BenchReport report;
  for (auto& rows : per_trial)
    for (auto& row : rows) report.rows.push_back(std::move(row));

  for (std::size_t di = 0; di < cfg.dists.size(); ++di) {
    const Distribution dist = cfg.dists[di];
    const auto first = slot_labeled.begin() + static_cast<std::ptrdiff_t>(di * cfg.trials);
    const auto excluded = static_cast<std::size_t>(std::count(first, first + static_cast<std::ptrdiff_t>(cfg.trials), 0));
    for (const Method& m : methods) {
      BenchSummary s;
      s.dist = dist;
      s.method = m.name();
      s.k = cfg.k;
      s.trials = cfg.trials;
      for (const BenchRow& row : report.rows) {
        if (row.dist != dist || row.method != s.method) continue;
        if (!row.labeled) continue;
        ++s.labeled;
        const auto hit = static_cast<std::size_t>(std::count(row.matches.begin(), row.matches.end(), true));
        s.hits += hit;
        if (hit == cfg.k) ++s.set_hits;
      }
      s.excluded = excluded;
      report.summaries.push_back(s);
    }
  }
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::string out = "# schema=1\n";
  out += "row,dist,trial,tensor_seed,method,k,K,s,dims,rank,status,values,indices,oracle_match,wall_ms,sweeps,"
         "labeled,excluded,hits,accuracy,set_accuracy\n";
  for (const BenchRow& r : report.rows) {
    out += "trial," + std::string(to_string(r.dist)) + ',' + std::to_string(r.trial + 1) + ',' +
           std::to_string(r.tensor_seed) + ',' + quoted(r.method) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.extra) + ',' + std::to_string(r.block_size) + ',' + dims_text(r.dims) + ',' +
           std::to_string(r.rank) + ',' + r.status + ',' + joined(r.values, num) + ',' +
           quoted(indices_text(r.indices)) + ',' + matches_text(r.matches) + ',' + num(r.wall_ms) + ',' +
           std::to_string(r.sweeps) + ',' + (r.labeled ? "1" : "0") + ",,,,\n";
  }
  for (const BenchSummary& s : report.summaries) {
    out += "summary," + std::string(to_string(s.dist)) + ",,," + quoted(s.method) + ',' + std::to_string(s.k) +
           ",,,,,,,,,,," + std::to_string(s.labeled) + ',' + std::to_string(s.excluded) + ',' +
           std::to_string(s.hits) + ',' + num(s.accuracy()) + ',' + num(s.set_accuracy()) + '\n';
  }
  return out;
}

std::vector<std::vector<double>> draw_grids(const FuncConfig& cfg, Rng& rng) {
  if (cfg.d == 0) throw InvalidArgumentError("d must be positive");
  if (cfg.n_min == 0 || cfg.n_min > cfg.n_max) throw InvalidArgumentError("bad grid size range");
  const double bound = domain_bound(cfg.function);
  const double optimum = cfg.function == TestFunction::Griewank ? 0.0 : 420.9687;
  std::vector<std::vector<double>> grids;
  for (std::size_t p = 0; p < cfg.d; ++p) {
    const std::size_t n = rng.uniform_int(cfg.n_min, cfg.n_max);
    std::vector<double> g;
    if (cfg.grid == GridKind::Uniform) {
      g = uniform_grid(bound, n);
    } else {
      for (std::size_t i = 0; i < n; ++i) g.push_back(rng.uniform(-bound, bound));
    }
    if (cfg.include_optimum) {
      auto nearest = std::min_element(g.begin(), g.end(), [&](double x, double y) {
        return std::abs(x - optimum) < std::abs(y - optimum);
      });
      *nearest = optimum;
    }
    std::sort(g.begin(), g.end());
    grids.push_back(std::move(g));
  }
  return grids;
}

FuncReport run_func(const FuncConfig& cfg) {
  if (cfg.runs == 0) throw InvalidArgumentError("func needs at least one run");
  std::vector<std::vector<FuncRow>> per_run(cfg.runs);
  parallel_for(cfg.runs, worker_count(cfg.threads), [&](std::size_t run) {
    const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(cfg.function) + 16), run);
    Rng rng(seed);
    const auto grids = draw_grids(cfg, rng);
    const CpTensor<Real> a = gen_function(cfg.function, grids);
    const auto point_of = [&](const IndexTuple& idx) {
      std::vector<double> z;
      for (std::size_t p = 0; p < idx.size(); ++p) z.push_back(grids[p][idx[p]]);
      return z;
    };

    std::optional<double> best;
    auto& rows = per_run[run];
    if (saturating_volume(a.dims()) <= cfg.oracle_cap) {
      const auto start = Clock::now();
      const TopKResult<Real> o = oracle_topk(a, 1, OrderingKey::Min, cfg.oracle_cap);
      FuncRow row{run, seed, "oracle", a.dims(), o.values[0], o.indices[0], point_of(o.indices[0]),
                  o.values[0], true, cfg.timing ? elapsed_ms(start) : 0.0, {}};
      best = o.values[0];
      rows.push_back(std::move(row));
    }
    for (std::size_t s : cfg.block_sizes) {
      SolverConfig sc;
      sc.k = 1;
      sc.extra = cfg.extra;
      sc.block_size = s;
      sc.restarts = cfg.restarts;
      sc.key = OrderingKey::Min;
      sc.seed = derive_seed(seed, 0x50);
      const auto start = Clock::now();
      TopKResult<Real> r = solve(a, sc);
      FuncRow row{run,
                  seed,
                  Method{Method::Kind::Ours, s, cfg.extra}.name(),
                  a.dims(),
                  r.values[0],
                  r.indices[0],
                  point_of(r.indices[0]),
                  best,
                  best && r.values[0] == *best,
                  cfg.timing ? elapsed_ms(start) : 0.0,
                  std::move(r.trace)};
      rows.push_back(std::move(row));
    }
  });
  FuncReport report;
  for (auto& rows : per_run)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  return report;
}

std::string func_csv(const FuncReport& report, TestFunction fn) {
  std::string out = "# schema=1\n";
  out += "function,run,seed,method,dims,min_value,index,point,oracle_min,oracle_match,wall_ms\n";
  for (const FuncRow& r : report.rows) {
    out += std::string(to_string(fn)) + ',' + std::to_string(r.run + 1) + ',' + std::to_string(r.seed) + ',' +
           quoted(r.method) + ',' + dims_text(r.dims) + ',' + num(r.value) + ',' + quoted(format_index(r.index)) +
           ',' + joined(r.point, num) + ',' + (r.oracle_value ? num(*r.oracle_value) : "") + ',' +
           (r.oracle_value ? (r.match ? "1" : "0") : "") + ',' + num(r.wall_ms) + '\n';
  }
  return out;
}

QftReport run_qft(const QftBenchConfig& cfg) {
  if (cfg.trials == 0) throw InvalidArgumentError("qft needs at least one trial");
  const std::size_t total = cfg.sides.size() * cfg.trials;
  std::vector<std::vector<QftRow>> per_slot(total);
  parallel_for(total, worker_count(cfg.threads), [&](std::size_t slot) {
    const std::size_t l = cfg.sides[slot / cfg.trials];
    const std::size_t trial = slot % cfg.trials;
    const QubitLayout layout = QubitLayout::make(l, l);
    const std::uint64_t init_seed = derive_seed(derive_seed(cfg.seed, 0x9F7 + l), trial);
    const std::optional<std::size_t> cap = cfg.exact ? std::nullopt
                                                     : (cfg.rank_cap ? cfg.rank_cap : default_rank_cap(layout.qubits));
    const auto start = Clock::now();
    const CpTensor<Complex> state =
        run_circuit(qft_initial_state(layout, init_seed), qft_circuit(layout.qubits), layout, cap);
    const double circuit_ms = elapsed_ms(start);

    const std::size_t kmax = *std::max_element(cfg.ks.begin(), cfg.ks.end());
    std::optional<TopKResult<Complex>> oracle;
    if (saturating_volume(state.dims()) <= cfg.oracle_cap)
      oracle = oracle_topk(state, kmax, OrderingKey::MaxAbs, cfg.oracle_cap);

    for (std::size_t k : cfg.ks) {
      SolverConfig sc;
      sc.k = k;
      sc.extra = cfg.extra;
      sc.block_size = cfg.block_size;
      sc.restarts = cfg.restarts;
      sc.key = OrderingKey::MaxAbs;
      sc.seed = derive_seed(init_seed, 0x50 + k);
      const auto solve_start = Clock::now();
      TopKResult<Complex> r = solve(state, sc);
      QftRow row;
      row.qubits = layout.qubits;
      row.trial = trial;
      row.init_seed = init_seed;
      row.k = k;
      row.rank = state.rank();
      row.wall_ms = cfg.timing ? circuit_ms + elapsed_ms(solve_start) : 0.0;
      for (const Complex& v : r.values) row.magnitudes.push_back(std::abs(v));
      for (const IndexTuple& t : r.indices) row.basis_states.push_back(layout.basis_state(t));
      row.amplitudes = std::move(r.values);
      row.indices = std::move(r.indices);
      if (oracle) {
        TopKResult<Complex> top = *oracle;
        top.values.resize(k);
        top.indices.resize(k);
        row.matches = oracle_matches(top, row.amplitudes, row.indices, OrderingKey::MaxAbs);
        row.labeled = true;
      }
      per_slot[slot].push_back(std::move(row));
    }
  });
  QftReport report;
  for (auto& rows : per_slot)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  return report;
}

std::string qft_csv(const QftReport& report) {
  std::string out = "# schema=1\n";
  out += "qubits,trial,init_seed,k,rank,magnitudes,amplitudes,indices,basis_states,oracle_match,wall_ms\n";
  for (const QftRow& r : report.rows) {
    out += std::to_string(r.qubits) + ',' + std::to_string(r.trial + 1) + ',' + std::to_string(r.init_seed) + ',' +
           std::to_string(r.k) + ',' + std::to_string(r.rank) + ',' + joined(r.magnitudes, num) + ',' +
           joined(r.amplitudes, [](const Complex& c) { return num(c.real()) + (c.imag() < 0 ? "" : "+") + num(c.imag()) + "i"; }) +
           ',' + quoted(indices_text(r.indices)) + ',' +
           joined(r.basis_states, [](std::uint64_t b) { return std::to_string(b); }) + ',' +
           matches_text(r.matches) + ',' + num(r.wall_ms) + '\n';
  }
  return out;
}

}  // namespace cptopk
