// SPDX-License-Identifier: Apache-2.0

#include "cptopk/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cptopk {

template <class T>
TopKResult<T> oracle_topk(const CpTensor<T>& a, std::size_t k, OrderingKey key, std::size_t max_elems) {
  require_key_for_field<T>(key);
  if (k < 1) throw InvalidArgumentError("k must be at least 1");
  const std::size_t total = a.volume();
  if (k > total)
    throw InfeasibleKError("k = " + std::to_string(k) + " exceeds the " + std::to_string(total) +
                           " entries of the tensor");
  const DenseTensor<T> dense = materialize(a, max_elems);

  std::vector<double> score(dense.values.size());
  for (std::size_t i = 0; i < score.size(); ++i) score[i] = key_score(dense.values[i], key);
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto kth = order.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(order.begin(), kth, order.end(), [&](std::size_t x, std::size_t y) {
    if (score[x] != score[y]) return score[x] > score[y];
    return x < y;
  });

  TopKResult<T> out;
  for (std::size_t j = 0; j < k; ++j) {
    IndexTuple idx = multi_index(order[j], a.dims());
    const T v = element(a, idx);
    out.objective += key_score(v, key);
    out.values.push_back(v);
    out.indices.push_back(std::move(idx));
  }
  out.converged = true;
  return out;
}

template TopKResult<Real> oracle_topk(const CpTensor<Real>&, std::size_t, OrderingKey, std::size_t);
template TopKResult<Complex> oracle_topk(const CpTensor<Complex>&, std::size_t, OrderingKey, std::size_t);

namespace {

double min_entry(const CpTensor<Real>& a, std::size_t cap) {
  const DenseTensor<Real> dense = materialize(a, cap);
  return *std::min_element(dense.values.begin(), dense.values.end());
}

// Frobenius norm with the Gram products accumulated in long double.
double precise_norm(const CpTensor<Real>& y) {
  const auto rank = static_cast<Eigen::Index>(y.rank());
  using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Wide gram = Wide::Ones(rank, rank);
  for (const auto& f : y.factors()) {
    const Wide w = f.cast<long double>();
    gram = gram.cwiseProduct(w.transpose() * w);
  }
  const long double sq = gram.sum();
  return sq > 0 ? static_cast<double>(std::sqrt(sq)) : 0.0;
}

}  // namespace

PowerIterResult power_iteration_max(const CpTensor<Real>& a, const PowerIterConfig& cfg) {
  if (cfg.rank_cap < 1) throw InvalidArgumentError("rank cap must be at least 1");
  const double norm = frob_norm(a);
  if (norm == 0.0) throw DegenerateInputError("power iteration: tensor is zero");

  PowerIterResult out;
  double s = cfg.shift.value_or(norm);
  CpTensor<Real> b = shift(a, s);
  if (!cfg.shift && a.volume() <= cfg.nonneg_check_cap) {
    for (int attempt = 0; attempt < 3 && min_entry(b, cfg.nonneg_check_cap) < 0.0; ++attempt) {
      s *= 2.0;
      b = shift(a, s);
    }
  }
  out.shift = s;

  CpTensor<Real> y = all_ones<Real>(a.dims());
  y = scale(y, 1.0 / frob_norm(y));
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    CpTensor<Real> next = hadamard(b, y);
    if (next.rank() > cfg.rank_cap) next = recompress(next, cfg.rank_cap, cfg.recompress);
    const double n = precise_norm(next);
    if (n == 0.0) break;
    next = scale(next, 1.0 / n);
    out.norm_drift = std::max(out.norm_drift, std::abs(precise_norm(next) - 1.0));
    out.iterations = it + 1;
    const double overlap = inner(y, next);
    y = std::move(next);
    if (overlap >= 1.0 - cfg.overlap_tol) {
      out.converged = true;
      break;
    }
  }

  out.index = rank_one_argmax(y, cfg.hopm_iters, cfg.recompress.seed);
  out.value = element(a, out.index);
  return out;
}

}  // namespace cptopk
