// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_BASELINES_HPP
#define CPTOPK_BASELINES_HPP

#include <cstddef>
#include <optional>

#include "cptopk/cp_tensor.hpp"
#include "cptopk/solver.hpp"

namespace cptopk {

/// Exhaustive reference: materialize, key-sort, keep the first k entries.
/// Ties resolve to the smallest linear index. Values are re-read through
/// element() so they match the solver bit for bit.
template <class T>
TopKResult<T> oracle_topk(const CpTensor<T>& a, std::size_t k, OrderingKey key, std::size_t max_elems);

struct PowerIterConfig {
  std::size_t max_iters = 200;
  std::size_t rank_cap = 10;  ///< Recompress the iterate back to this rank when it grows past it.
  RecompressOptions recompress{};
  std::optional<double> shift;  ///< Unset: ||A||_F, verified and doubled up to 3 times (see below).
  double overlap_tol = 1e-12;
  std::size_t hopm_iters = 100;
  /// Densely verify the shifted tensor is nonnegative when it has at most this many entries.
  std::size_t nonneg_check_cap = std::size_t{1} << 20;
};

struct PowerIterResult {
  double value = 0.0;  ///< element(A, index), never an eigenvalue estimate.
  IndexTuple index;
  std::size_t iterations = 0;
  bool converged = false;
  double shift = 0.0;
  double norm_drift = 0.0;  ///< Largest | ||y|| - 1 | seen after normalization.
};

/// Hadamard power iteration for the largest entry of a real CP tensor.
///
/// B = A + s*E is iterated as y <- B * y (elementwise), normalized, and
/// recompressed whenever its rank exceeds rank_cap. Starting from the
/// normalized all-ones tensor, y concentrates on the largest entry of B. The
/// location is read off a rank-one approximation of the final iterate.
/// Throws DegenerateInputError on the zero tensor.
PowerIterResult power_iteration_max(const CpTensor<Real>& a, const PowerIterConfig& cfg = {});

}  // namespace cptopk

#endif
