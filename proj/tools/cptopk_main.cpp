// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cptopk/cptopk.h"

namespace {

struct TensorDeleter {
  void operator()(cptopk_tensor* t) const { cptopk_tensor_free(t); }
};
struct ResultDeleter {
  void operator()(cptopk_result* r) const { cptopk_result_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { cptopk_string_free(s); }
};
using Tensor = std::unique_ptr<cptopk_tensor, TensorDeleter>;
using Result = std::unique_ptr<cptopk_result, ResultDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

struct Failure {
  int status;
};

void check(int status) {
  if (status != CPTOPK_OK) throw Failure{status};
}

int exit_code(int status) {
  switch (status) {
    case CPTOPK_OK: return 0;
    case CPTOPK_ERR_INFEASIBLE_K: return 2;
    case CPTOPK_ERR_CAPACITY: return 3;
    default: return 1;
  }
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string value_text(double re, double im, bool complex) {
  if (!complex) return shortest(re);
  return shortest(re) + (im < 0 || (im == 0 && std::signbit(im)) ? "" : "+") + shortest(im) + "i";
}

std::string index_text(const std::vector<std::size_t>& idx) {
  std::string s = "(";
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (p) s += ',';
    s += std::to_string(idx[p] + 1);
  }
  return s + ')';
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    throw Failure{CPTOPK_ERR_IO};
  }
}

int parse_key(const std::string& name) {
  int key = 0;
  check(cptopk_parse_key(name.c_str(), &key));
  return key;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& x : items) s += (s.empty() ? "" : ",") + x;
  return s;
}

struct TopkArgs {
  std::string input;
  std::size_t k = 1;
  std::size_t extra = 0;
  std::string block = "2";
  std::string key = "max";
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  std::size_t max_sweeps = 50;
  std::size_t cap = std::size_t{1} << 20;
  std::string output = "text";
};

void run_topk(const TopkArgs& a) {
  cptopk_tensor* raw = nullptr;
  check(cptopk_tensor_load(a.input.c_str(), &raw));
  Tensor t(raw);

  cptopk_solver_config cfg;
  cptopk_solver_config_init(&cfg);
  cfg.k = a.k;
  cfg.extra = a.extra;
  if (a.block == "auto") {
    cfg.auto_block = 1;
  } else {
    std::size_t s = 0;
    const char* end = a.block.data() + a.block.size();
    if (std::from_chars(a.block.data(), end, s).ptr != end || s == 0) {
      std::cerr << "error: --block expects a positive integer or 'auto'\n";
      throw Failure{CPTOPK_ERR_INVALID_ARGUMENT};
    }
    cfg.block_size = s;
  }
  cfg.key = parse_key(a.key);
  cfg.seed = a.seed;
  cfg.restarts = a.restarts;
  cfg.max_sweeps = a.max_sweeps;
  cfg.subproblem_cap = a.cap;

  cptopk_result* rraw = nullptr;
  check(cptopk_solve(t.get(), &cfg, &rraw));
  Result r(rraw);

  const bool complex = cptopk_result_field(r.get()) == CPTOPK_COMPLEX;
  const std::size_t order = cptopk_result_order(r.get());
  std::string out;
  nlohmann::ordered_json doc;
  if (a.output == "json") {
    doc["field"] = complex ? "complex" : "real";
    doc["key"] = a.key;
    doc["k"] = a.k;
    doc["values"] = nlohmann::json::array();
    doc["indices"] = nlohmann::json::array();
  } else if (a.output == "csv") {
    out = complex ? "position,re,im,abs,index\n" : "position,value,index\n";
  }
  for (std::size_t j = 0; j < cptopk_result_count(r.get()); ++j) {
    double re = 0.0;
    double im = 0.0;
    std::vector<std::size_t> idx(order);
    check(cptopk_result_value(r.get(), j, &re, &im));
    check(cptopk_result_index(r.get(), j, idx.data()));
    if (a.output == "json") {
      if (complex)
        doc["values"].push_back({re, im});
      else
        doc["values"].push_back(re);
      std::vector<std::size_t> one_based;
      for (std::size_t i : idx) one_based.push_back(i + 1);
      doc["indices"].push_back(one_based);
    } else if (a.output == "csv") {
      out += std::to_string(j + 1) + ',';
      out += complex ? shortest(re) + ',' + shortest(im) + ',' + shortest(std::hypot(re, im)) : shortest(re);
      out += ",\"" + index_text(idx) + "\"\n";
    } else {
      out += value_text(re, im, complex) + " @ " + index_text(idx) + '\n';
    }
  }
  if (a.output == "json") {
    doc["objective"] = cptopk_result_objective(r.get());
    doc["sweeps"] = cptopk_result_sweeps(r.get());
    doc["converged"] = cptopk_result_converged(r.get()) != 0;
    out = doc.dump() + '\n';
  }
  emit(out, "");
}

template <class Config>
void emit_csv(int (*run)(const Config*, char**), const Config& cfg, const std::string& path) {
  char* csv = nullptr;
  check(run(&cfg, &csv));
  CString owned(csv);
  emit(owned.get(), path);
}

void write_tensor(cptopk_tensor* raw, const std::string& path) {
  Tensor t(raw);
  if (path.empty() || path == "-") {
    char* text = nullptr;
    check(cptopk_tensor_to_cpt(t.get(), &text));
    CString owned(text);
    emit(owned.get(), "");
  } else {
    check(cptopk_tensor_save(t.get(), path.c_str()));
  }
}

std::size_t square_root(std::size_t d) {
  std::size_t l = 1;
  while (l * l < d) ++l;
  if (l * l != d) {
    std::cerr << "error: qubit count " << d << " is not a perfect square\n";
    throw Failure{CPTOPK_ERR_INVALID_ARGUMENT};
  }
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-k element retrieval for CP tensors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cptopk_version()));

  TopkArgs topk;
  auto* c_topk = app.add_subcommand("topk", "Retrieve the k top entries of a CPT file");
  c_topk->add_option("--input", topk.input, "CPT file")->required();
  c_topk->add_option("--k", topk.k, "Number of entries")->check(CLI::PositiveNumber);
  c_topk->add_option("--extra", topk.extra, "Additional search candidates (K)");
  c_topk->add_option("--block", topk.block, "Block size s, or 'auto'");
  c_topk->add_option("--key", topk.key, "max|min|maxabs|maxreal|maximag");
  c_topk->add_option("--seed", topk.seed);
  c_topk->add_option("--restarts", topk.restarts)->check(CLI::PositiveNumber);
  c_topk->add_option("--max-sweeps", topk.max_sweeps)->check(CLI::PositiveNumber);
  c_topk->add_option("--subproblem-cap", topk.cap, "Largest block tensor to materialize");
  c_topk->add_option("--output", topk.output)->check(CLI::IsMember({"text", "csv", "json"}));

  cptopk_bench_config bench;
  cptopk_bench_config_init(&bench);
  std::vector<std::string> bench_dists;
  std::vector<std::string> bench_methods;
  std::string bench_key = "max";
  bool bench_no_timing = false;
  bool bench_verify = false;
  std::string bench_out;
  auto* c_bench = app.add_subcommand("bench", "Random-tensor accuracy trials against the dense oracle");
  c_bench->add_option("--trials", bench.trials)->check(CLI::PositiveNumber);
  c_bench->add_option("--dist", bench_dists, "u-11, u0075, u01 (repeatable; default all)")->delimiter(',');
  c_bench->add_option("--methods", bench_methods, "oracle, power, ours(S)+K (repeatable)")->delimiter(',');
  c_bench->add_option("--k", bench.k)->check(CLI::PositiveNumber);
  c_bench->add_option("--key", bench_key);
  c_bench->add_option("--seed", bench.seed);
  c_bench->add_option("--restarts", bench.restarts)->check(CLI::PositiveNumber);
  c_bench->add_option("--max-sweeps", bench.max_sweeps)->check(CLI::PositiveNumber);
  c_bench->add_option("--oracle-cap", bench.oracle_cap);
  c_bench->add_option("--threads", bench.threads);
  c_bench->add_flag("--no-timing", bench_no_timing, "Report wall_ms as 0 (byte-stable output)");
  c_bench->add_flag("--verify", bench_verify, "Re-check every value against its index");
  c_bench->add_option("--out", bench_out, "CSV destination (default stdout)");

  cptopk_func_config func;
  cptopk_func_config_init(&func);
  std::string func_name;
  std::string func_grid = "uniform";
  std::size_t func_n = 0;
  bool func_with_opt = false;
  bool func_no_timing = false;
  std::string func_out;
  auto* c_func = app.add_subcommand("func", "Minimum retrieval on Griewank / Schwefel grid tensors");
  c_func->add_option("function", func_name)->required()->check(CLI::IsMember({"griewank", "schwefel"}));
  c_func->add_option("--d", func.d)->check(CLI::PositiveNumber);
  c_func->add_option("--n", func_n, "Points per grid (sets both bounds)");
  c_func->add_option("--n-min", func.n_min);
  c_func->add_option("--n-max", func.n_max);
  c_func->add_option("--runs", func.runs)->check(CLI::PositiveNumber);
  c_func->add_option("--seed", func.seed);
  c_func->add_option("--grid", func_grid)->check(CLI::IsMember({"random", "uniform"}));
  c_func->add_flag("--with-optimum", func_with_opt, "Move the nearest grid point onto the optimizer");
  c_func->add_option("--extra", func.extra);
  c_func->add_option("--restarts", func.restarts)->check(CLI::PositiveNumber);
  c_func->add_option("--oracle-cap", func.oracle_cap);
  c_func->add_option("--threads", func.threads);
  c_func->add_flag("--no-timing", func_no_timing);
  c_func->add_option("--out", func_out);

  cptopk_qft_config qft;
  cptopk_qft_config_init(&qft);
  std::vector<std::size_t> qft_d{4, 9, 16};
  std::vector<std::size_t> qft_k{1, 5};
  bool qft_exact = false;
  bool qft_no_timing = false;
  std::string qft_out;
  auto* c_qft = app.add_subcommand("qft", "QFT simulation in CP form with top-k measurement");
  c_qft->add_option("--d", qft_d, "Qubit counts, each a perfect square")->delimiter(',');
  c_qft->add_option("--k", qft_k)->delimiter(',');
  c_qft->add_option("--trials", qft.trials)->check(CLI::PositiveNumber);
  c_qft->add_option("--seed", qft.seed);
  c_qft->add_option("--block", qft.block_size)->check(CLI::PositiveNumber);
  c_qft->add_option("--extra", qft.extra);
  c_qft->add_option("--restarts", qft.restarts)->check(CLI::PositiveNumber);
  c_qft->add_flag("--exact", qft_exact, "Never recompress");
  c_qft->add_option("--rank-cap", qft.rank_cap);
  c_qft->add_option("--oracle-cap", qft.oracle_cap);
  c_qft->add_option("--threads", qft.threads);
  c_qft->add_flag("--no-timing", qft_no_timing);
  c_qft->add_option("--out", qft_out);

  auto* c_gen = app.add_subcommand("gen", "Write a generated tensor as a CPT file");
  c_gen->require_subcommand(1);
  c_gen->fallthrough();
  std::string gen_out;
  c_gen->add_option("--out", gen_out, "Destination (default stdout)");
  std::string gen_dist = "u01";
  std::uint64_t gen_seed = 0;
  auto* g_random = c_gen->add_subcommand("random", "Random CP tensor");
  g_random->add_option("--dist", gen_dist);
  g_random->add_option("--seed", gen_seed);
  std::string gen_fn;
  std::vector<std::size_t> gen_sizes;
  auto* g_func = c_gen->add_subcommand("func", "Function tensor on uniform meshes");
  g_func->add_option("function", gen_fn)->required()->check(CLI::IsMember({"griewank", "schwefel"}));
  g_func->add_option("--n", gen_sizes, "Points per mode")->required()->delimiter(',');
  std::size_t gen_d = 4;
  bool gen_exact = false;
  auto* g_qft = c_gen->add_subcommand("qft", "State after the QFT circuit");
  g_qft->add_option("--d", gen_d)->check(CLI::PositiveNumber);
  g_qft->add_option("--seed", gen_seed, "Initial-state seed (the init_seed column of qft output)");
  g_qft->add_flag("--exact", gen_exact);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*c_topk) {
      run_topk(topk);
    } else if (*c_bench) {
      const std::string dists = join(bench_dists);
      const std::string methods = join(bench_methods);
      bench.dists = dists.empty() ? nullptr : dists.c_str();
      bench.methods = methods.empty() ? nullptr : methods.c_str();
      bench.key = parse_key(bench_key);
      bench.timing = bench_no_timing ? 0 : 1;
      bench.verify = bench_verify ? 1 : 0;
      emit_csv(cptopk_bench_csv, bench, bench_out);
    } else if (*c_func) {
      func.fn = func_name.c_str();
      if (func_n) func.n_min = func.n_max = func_n;
      func.uniform_grid = func_grid == "uniform";
      func.include_optimum = func_with_opt ? 1 : 0;
      func.timing = func_no_timing ? 0 : 1;
      emit_csv(cptopk_func_csv, func, func_out);
    } else if (*c_qft) {
      qft.qubits = qft_d.data();
      qft.qubit_count = qft_d.size();
      qft.ks = qft_k.data();
      qft.k_count = qft_k.size();
      qft.exact = qft_exact ? 1 : 0;
      qft.timing = qft_no_timing ? 0 : 1;
      emit_csv(cptopk_qft_csv, qft, qft_out);
    } else if (*c_gen) {
      cptopk_tensor* raw = nullptr;
      if (*g_random) {
        check(cptopk_gen_random(gen_dist.c_str(), gen_seed, &raw));
      } else if (*g_func) {
        check(cptopk_gen_function(gen_fn.c_str(), gen_sizes.size(), gen_sizes.data(), &raw));
      } else {
        const std::size_t l = square_root(gen_d);
        check(cptopk_qft_state(l, l, gen_seed, gen_exact ? 1 : 0, &raw));
      }
      write_tensor(raw, gen_out);
    }
  } catch (const Failure& f) {
    const std::string msg = cptopk_last_error();
    if (!msg.empty()) std::cerr << "error (" << cptopk_status_name(f.status) << "): " << msg << '\n';
    return exit_code(f.status);
  }
  return 0;
}
