// SPDX-License-Identifier: Apache-2.0

#include "cptopk/solver.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_set>

#include "complex_ops.hpp"

namespace cptopk {

namespace {

std::vector<std::size_t> block_dims(const std::vector<std::size_t>& dims, const Block& block) {
  std::vector<std::size_t> out;
  out.reserve(block.size());
  for (std::size_t q : block) out.push_back(dims[q]);
  return out;
}

// Column j of the result is T_j(b) = sum_r alpha(r, j) * kr(b, r), accumulated
// in rank order. Khatri-Rao columns are formed one rank at a time with the same
// left-to-right products as khatri_rao_rows.
template <class T>
Matrix<T> contract_block(const CpTensor<T>& a, const Block& block, const Matrix<T>& alpha) {
  const std::size_t vol = saturating_volume(block_dims(a.dims(), block));
  const Eigen::Index m = alpha.cols();
  Matrix<T> out = Matrix<T>::Zero(static_cast<Eigen::Index>(vol), m);
  std::vector<T> col(vol);
  for (Eigen::Index r = 0; r < alpha.rows(); ++r) {
    std::size_t len = 0;
    for (std::size_t q : block) {
      const Matrix<T>& u = a.factor(q);
      const auto n = static_cast<std::size_t>(u.rows());
      if (len == 0) {
        for (std::size_t i = 0; i < n; ++i) col[i] = u(static_cast<Eigen::Index>(i), r);
        len = n;
        continue;
      }
      for (std::size_t i = n; i-- > 0;) {
        const T f = u(static_cast<Eigen::Index>(i), r);
        for (std::size_t b = len; b-- > 0;) col[b + len * i] = detail::mul(col[b], f);
      }
      len *= n;
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const T w = alpha(r, j);
      T* dst = out.col(j).data();
      for (std::size_t b = 0; b < vol; ++b) dst[b] += detail::mul(w, col[b]);
    }
  }
  return out;
}

template <class T>
double best_score(const CandidateSet<T>& cands, OrderingKey key) {
  double best = -std::numeric_limits<double>::infinity();
  for (const T& v : cands.values) best = std::max(best, key_score(v, key));
  return best;
}

void check_config(const SolverConfig& cfg) {
  if (cfg.k < 1) throw InvalidArgumentError("k must be at least 1");
  if (cfg.restarts < 1) throw InvalidArgumentError("restarts must be at least 1");
  if (cfg.max_sweeps < 1) throw InvalidArgumentError("max_sweeps must be at least 1");
  if (!cfg.auto_block && cfg.block_size < 1) throw InvalidArgumentError("block size must be at least 1");
  if (cfg.subproblem_cap < 1) throw InvalidArgumentError("subproblem cap must be at least 1");
}

void check_block_volumes(const std::vector<std::size_t>& dims, const std::vector<Block>& schedule, std::size_t cap) {
  for (const Block& block : schedule) {
    const std::size_t vol = saturating_volume(block_dims(dims, block));
    if (vol > cap)
      throw CapacityError("block of " + std::to_string(block.size()) + " modes has " + std::to_string(vol) +
                          " entries, subproblem cap is " + std::to_string(cap));
  }
}

}  // namespace

std::vector<Block> block_schedule(std::size_t d, std::size_t s) {
  if (d == 0) return {};
  s = std::clamp<std::size_t>(s, 1, d);
  const std::size_t windows = (d + s - 1) / s;
  std::vector<Block> out(windows);
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t t = 0; t < s; ++t) out[w].push_back((w * s + t) % d);
  return out;
}

std::size_t auto_block_size(const std::vector<std::size_t>& dims, std::size_t cap) {
  for (std::size_t s = dims.size(); s > 1; --s) {
    bool fits = true;
    for (const Block& block : block_schedule(dims.size(), s))
      if (saturating_volume(block_dims(dims, block)) > cap) {
        fits = false;
        break;
      }
    if (fits) return s;
  }
  return 1;
}

std::size_t effective_block_size(const std::vector<std::size_t>& dims, const SolverConfig& cfg) {
  if (cfg.auto_block) return auto_block_size(dims, cfg.subproblem_cap);
  return std::clamp<std::size_t>(cfg.block_size, 1, dims.size());
}

template <class T>
CandidateSet<T> init_candidates(const CpTensor<T>& a, std::size_t count, Rng& rng) {
  const std::size_t total = a.volume();
  if (count > total)
    throw InfeasibleKError("cannot place " + std::to_string(count) + " distinct candidates in a tensor with " +
                           std::to_string(total) + " entries");
  CandidateSet<T> out;
  out.tuples.reserve(count);
  if (total < std::numeric_limits<std::size_t>::max()) {
    // Floyd's sampling of distinct linear indices.
    std::unordered_set<std::size_t> seen;
    for (std::size_t top = total - count; top < total; ++top) {
      std::size_t pick = rng.uniform_int(0, top);
      if (!seen.insert(pick).second) {
        pick = top;
        seen.insert(pick);
      }
      out.tuples.push_back(multi_index(pick, a.dims()));
    }
  } else {
    while (out.tuples.size() < count) {
      IndexTuple t(a.order());
      for (std::size_t p = 0; p < a.order(); ++p) t[p] = rng.uniform_int(0, a.dim(p) - 1);
      if (std::find(out.tuples.begin(), out.tuples.end(), t) == out.tuples.end()) out.tuples.push_back(std::move(t));
    }
  }
  out.values.reserve(count);
  for (const auto& t : out.tuples) out.values.push_back(element(a, t));
  return out;
}

template <class T>
SubproblemCoeffs<T> compute_alpha(const CpTensor<T>& a, const CandidateSet<T>& cands, const Block& block) {
  const std::size_t m = cands.tuples.size();
  const auto rank = static_cast<Eigen::Index>(a.rank());
  std::vector<char> in_block(a.order(), 0);
  for (std::size_t q : block) in_block[q] = 1;

  SubproblemCoeffs<T> out;
  out.count = m;
  out.alpha = Matrix<T>::Ones(rank, static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    for (Eigen::Index r = 0; r < rank; ++r) {
      T prod(1);
      for (std::size_t q = 0; q < a.order(); ++q)
        if (!in_block[q]) prod *= a.factor(q)(static_cast<Eigen::Index>(cands.tuples[j][q]), r);
      out.alpha(r, c) = prod;
    }
  }
  out.beta_mask.assign(m * m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      bool same = true;
      for (std::size_t q = 0; q < a.order() && same; ++q)
        if (!in_block[q] && cands.tuples[i][q] != cands.tuples[j][q]) same = false;
      out.beta_mask[i * m + j] = same ? 1 : 0;
    }
  return out;
}

template <class T>
DenseTensor<T> subproblem_tensor(const CpTensor<T>& a, const Vector<T>& alpha_j, const Block& block,
                                 std::size_t cap) {
  auto dims = block_dims(a.dims(), block);
  const std::size_t vol = saturating_volume(dims);
  if (vol > cap)
    throw CapacityError("subproblem block volume " + std::to_string(vol) + " exceeds cap " + std::to_string(cap));
  if (static_cast<std::size_t>(alpha_j.size()) != a.rank())
    throw ShapeError("alpha column length does not match the CP rank");
  const Matrix<T> t = contract_block(a, block, Matrix<T>(alpha_j));
  return {std::move(dims), std::vector<T>(t.data(), t.data() + t.size())};
}

template <class T>
SubproblemPick<T> solve_subproblem(const DenseTensor<T>& tj, std::size_t j, const CandidateSet<T>& cands,
                                   const SubproblemCoeffs<T>& coeffs, const Block& block, OrderingKey key) {
  if (tj.values.empty()) throw ShapeError("empty subproblem tensor");
  std::vector<std::size_t> taken;
  for (std::size_t i = 0; i < j; ++i) {
    if (!coeffs.beta(i, j)) continue;
    std::size_t lin = 0;
    std::size_t stride = 1;
    for (std::size_t t = 0; t < block.size(); ++t) {
      lin += cands.tuples[i][block[t]] * stride;
      stride *= tj.dims[t];
    }
    taken.push_back(lin);
  }
  std::sort(taken.begin(), taken.end());

  std::size_t best = tj.values.size();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < tj.values.size(); ++b) {
    const double sc = key_score(tj.values[b], key);
    if (best != tj.values.size() && !(sc > best_score)) continue;
    if (std::binary_search(taken.begin(), taken.end(), b)) continue;
    best = b;
    best_score = sc;
  }
  if (best == tj.values.size())
    throw ExhaustionError("all " + std::to_string(tj.values.size()) + " block entries collide for candidate " +
                          std::to_string(j + 1));
  return {tj.values[best], best, multi_index(best, tj.dims)};
}

template <class T>
CandidateSet<T> sweep(const CpTensor<T>& a, const CandidateSet<T>& cands, const SolverConfig& cfg) {
  const std::size_t s = effective_block_size(a.dims(), cfg);
  const auto schedule = block_schedule(a.order(), s);
  check_block_volumes(a.dims(), schedule, cfg.subproblem_cap);

  CandidateSet<T> cur = cands;
  DenseTensor<T> tj;
  for (const Block& block : schedule) {
    const SubproblemCoeffs<T> coeffs = compute_alpha(a, cur, block);
    const Matrix<T> all = contract_block(a, block, coeffs.alpha);
    tj.dims = block_dims(a.dims(), block);
    for (std::size_t j = 0; j < cur.tuples.size(); ++j) {
      const T* col = all.col(static_cast<Eigen::Index>(j)).data();
      tj.values.assign(col, col + all.rows());
      try {
        const SubproblemPick<T> pick = solve_subproblem(tj, j, cur, coeffs, block, cfg.key);
        for (std::size_t t = 0; t < block.size(); ++t) cur.tuples[j][block[t]] = pick.block_index[t];
        cur.values[j] = element(a, cur.tuples[j]);
      } catch (const ExhaustionError&) {
        ++cur.exhausted;
      }
    }
  }
  return cur;
}

template <class T>
TopKResult<T> best_k(const CpTensor<T>& a, const std::vector<IndexTuple>& tuples, std::size_t k, OrderingKey key) {
  struct Entry {
    double score;
    std::size_t lin;
    const IndexTuple* tuple;
    T value;
  };
  std::vector<Entry> entries;
  entries.reserve(tuples.size());
  for (const auto& t : tuples) {
    const T v = element(a, t);
    entries.push_back({key_score(v, key), linear_index(t, a.dims()), &t, v});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.lin < y.lin; });
  entries.erase(std::unique(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.lin == y.lin; }),
                entries.end());
  if (entries.size() < k)
    throw InfeasibleKError("only " + std::to_string(entries.size()) + " distinct tuples for k = " + std::to_string(k));
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.lin < y.lin;
  });
  TopKResult<T> out;
  for (std::size_t j = 0; j < k; ++j) {
    out.values.push_back(entries[j].value);
    out.indices.push_back(*entries[j].tuple);
    out.objective += entries[j].score;
  }
  return out;
}

template <class T>
TopKResult<T> solve(const CpTensor<T>& a, const SolverConfig& cfg) {
  check_config(cfg);
  require_key_for_field<T>(cfg.key);
  const std::size_t total = a.volume();
  if (total < cfg.k)
    throw InfeasibleKError("k = " + std::to_string(cfg.k) + " exceeds the " + std::to_string(total) +
                           " entries of the tensor");
  const std::size_t count = cfg.k + std::min(cfg.extra, total - cfg.k);
  const std::size_t s = effective_block_size(a.dims(), cfg);
  check_block_volumes(a.dims(), block_schedule(a.order(), s), cfg.subproblem_cap);

  std::vector<IndexTuple> pool;
  std::vector<std::vector<double>> trace;
  std::size_t sweeps = 0;
  std::size_t exhausted = 0;
  bool converged = false;
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(cfg.seed + restart);
    CandidateSet<T> cands = init_candidates(a, count, rng);
    std::vector<double> path{best_score(cands, cfg.key)};
    for (std::size_t it = 0; it < cfg.max_sweeps; ++it) {
      CandidateSet<T> next = sweep(a, cands, cfg);
      ++sweeps;
      const bool fixed = next.tuples == cands.tuples;
      cands = std::move(next);
      path.push_back(best_score(cands, cfg.key));
      if (fixed) {
        converged = true;
        break;
      }
    }
    exhausted += cands.exhausted;
    trace.push_back(std::move(path));
    pool.insert(pool.end(), cands.tuples.begin(), cands.tuples.end());
  }

  TopKResult<T> out = best_k(a, pool, cfg.k, cfg.key);
  out.sweeps_used = sweeps;
  out.converged = converged;
  out.trace = std::move(trace);
  out.exhausted = exhausted;
  return out;
}

#define CPTOPK_INSTANTIATE(T)                                                                                        \
  template CandidateSet<T> init_candidates(const CpTensor<T>&, std::size_t, Rng&);                                   \
  template SubproblemCoeffs<T> compute_alpha(const CpTensor<T>&, const CandidateSet<T>&, const Block&);              \
  template DenseTensor<T> subproblem_tensor(const CpTensor<T>&, const Vector<T>&, const Block&, std::size_t);        \
  template SubproblemPick<T> solve_subproblem(const DenseTensor<T>&, std::size_t, const CandidateSet<T>&,            \
                                              const SubproblemCoeffs<T>&, const Block&, OrderingKey);                \
  template CandidateSet<T> sweep(const CpTensor<T>&, const CandidateSet<T>&, const SolverConfig&);                   \
  template TopKResult<T> best_k(const CpTensor<T>&, const std::vector<IndexTuple>&, std::size_t, OrderingKey);       \
  template TopKResult<T> solve(const CpTensor<T>&, const SolverConfig&);

CPTOPK_INSTANTIATE(Real)
CPTOPK_INSTANTIATE(Complex)

#undef CPTOPK_INSTANTIATE

}  // namespace cptopk
