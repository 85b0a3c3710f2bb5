// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_SOLVER_HPP
#define CPTOPK_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cptopk/common.hpp"
#include "cptopk/cp_tensor.hpp"
#include "cptopk/rng.hpp"

namespace cptopk {

/// Block-alternating top-k retrieval.
///
/// The solver state is a set of k+K distinct index tuples (one per eigenvector
/// column; optimal columns are indicator tensors, so the continuous variables
/// reduce to indices). A sweep walks a fixed schedule of mode blocks. For each
/// block every candidate j sees an s-order CP tensor
///
///   T_j = sum_r alpha(r, j) * U_{p1}(:, r) o ... o U_{ps}(:, r),
///   alpha(r, j) = prod_{q not in block} U_q(idx_j[q], r),
///
/// and moves to the key-best entry of T_j whose full tuple is not already held
/// by a candidate processed earlier in the same block step. Extra candidates
/// (K) only widen the search; the best k of all restarts are returned.
struct SolverConfig {
  std::size_t k = 1;
  std::size_t extra = 0;       ///< K: additional candidates carried through the search.
  std::size_t block_size = 2;  ///< s, clamped to the tensor order.
  bool auto_block = false;     ///< Pick the largest s whose blocks fit subproblem_cap.
  std::size_t max_sweeps = 50;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  std::size_t subproblem_cap = std::size_t{1} << 20;
  OrderingKey key = OrderingKey::Max;
};

template <class T>
struct CandidateSet {
  std::vector<IndexTuple> tuples;
  std::vector<T> values;  ///< values[j] == element(A, tuples[j])
  std::size_t exhausted = 0;  ///< candidates kept in place because every block entry collided
};

template <class T>
struct SubproblemCoeffs {
  Matrix<T> alpha;  ///< R x m
  /// beta_mask[i * m + j]: tuples i and j agree on every mode outside the block.
  std::vector<char> beta_mask;
  std::size_t count = 0;

  bool beta(std::size_t i, std::size_t j) const { return beta_mask[i * count + j] != 0; }
};

template <class T>
struct TopKResult {
  std::vector<T> values;
  std::vector<IndexTuple> indices;
  double objective = 0.0;  ///< Sum of key scores of the returned values.
  std::size_t sweeps_used = 0;  ///< Total over restarts.
  bool converged = false;
  /// Per restart: key score of the best candidate before the first sweep and
  /// after every sweep.
  std::vector<std::vector<double>> trace;
  std::size_t exhausted = 0;
};

using Block = std::vector<std::size_t>;

/// Contiguous windows of s modes covering 0..d-1; the last window wraps around
/// to the leading modes so every window has exactly s modes.
std::vector<Block> block_schedule(std::size_t d, std::size_t s);

/// Largest s whose schedule keeps every block volume within `cap` (at least 1).
std::size_t auto_block_size(const std::vector<std::size_t>& dims, std::size_t cap);

/// Block size actually used for `dims` under `cfg`.
std::size_t effective_block_size(const std::vector<std::size_t>& dims, const SolverConfig& cfg);

/// `count` distinct uniformly random tuples. Throws InfeasibleKError when the
/// tensor has fewer than `count` entries.
template <class T>
CandidateSet<T> init_candidates(const CpTensor<T>& a, std::size_t count, Rng& rng);

template <class T>
SubproblemCoeffs<T> compute_alpha(const CpTensor<T>& a, const CandidateSet<T>& cands, const Block& block);

/// Dense T_j over the block modes (mode-1-fastest in block order).
/// Throws CapacityError when the block volume exceeds `cap`.
template <class T>
DenseTensor<T> subproblem_tensor(const CpTensor<T>& a, const Vector<T>& alpha_j, const Block& block,
                                 std::size_t cap);

template <class T>
struct SubproblemPick {
  T value;
  std::size_t linear = 0;  ///< Linear index into the block tensor.
  IndexTuple block_index;  ///< One entry per block mode.
};

/// Key-best entry of T_j that does not reproduce the full tuple of a candidate
/// i < j (already updated in this block step). Ties go to the smallest linear
/// index. Throws ExhaustionError when every entry collides.
template <class T>
SubproblemPick<T> solve_subproblem(const DenseTensor<T>& tj, std::size_t j, const CandidateSet<T>& cands,
                                   const SubproblemCoeffs<T>& coeffs, const Block& block, OrderingKey key);

/// One pass over the block schedule.
template <class T>
CandidateSet<T> sweep(const CpTensor<T>& a, const CandidateSet<T>& cands, const SolverConfig& cfg);

/// Throws InfeasibleKError when k exceeds the number of entries, CapacityError
/// when a block is larger than cfg.subproblem_cap, InvalidArgumentError on a
/// bad configuration.
template <class T>
TopKResult<T> solve(const CpTensor<T>& a, const SolverConfig& cfg);

/// Sorts (value, tuple) pairs by key (best first, ties by linear index),
/// drops duplicate tuples and keeps the first k.
template <class T>
TopKResult<T> best_k(const CpTensor<T>& a, const std::vector<IndexTuple>& tuples, std::size_t k, OrderingKey key);

}  // namespace cptopk

#endif
