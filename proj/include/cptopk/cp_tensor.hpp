// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_CP_TENSOR_HPP
#define CPTOPK_CP_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cptopk/common.hpp"

namespace cptopk {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Order-d tensor stored as the sum of R outer products of factor columns:
///
///   A(i_1, ..., i_d) = sum_r  U_1(i_1, r) * U_2(i_2, r) * ... * U_d(i_d, r)
///
/// Factor p has shape n_p x R. Instances are immutable once built; every
/// operation below returns a new tensor.
template <class T>
class CpTensor {
 public:
  using Scalar = T;

  /// Throws ShapeError unless there is at least one factor, all factors share
  /// a positive column count and every factor has at least one row.
  explicit CpTensor(std::vector<Matrix<T>> factors);

  std::size_t order() const noexcept { return factors_.size(); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(factors_.front().cols()); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  const Matrix<T>& factor(std::size_t mode) const { return factors_.at(mode); }
  const std::vector<Matrix<T>>& factors() const noexcept { return factors_; }

  /// Total entry count, saturating at SIZE_MAX.
  std::size_t volume() const noexcept { return saturating_volume(dims_); }

 private:
  std::vector<Matrix<T>> factors_;
  std::vector<std::size_t> dims_;
};

/// Dense tensor in mode-1-fastest order.
template <class T>
struct DenseTensor {
  std::vector<std::size_t> dims;
  std::vector<T> values;

  const T& at(const IndexTuple& idx) const { return values[linear_index(idx, dims)]; }
};

// Constructors.

/// Outer product of one vector per mode.
template <class T>
CpTensor<T> rank_one(const std::vector<Vector<T>>& vectors);

template <class T>
CpTensor<T> all_ones(const std::vector<std::size_t>& dims);

/// Rank-one tensor equal to 1 at `idx` and 0 elsewhere.
template <class T>
CpTensor<T> indicator(const std::vector<std::size_t>& dims, const IndexTuple& idx);

// Element access.

/// Sum over ranks (outermost) of per-mode products; the accumulation order is
/// fixed so repeated calls return bit-identical values.
template <class T>
T element(const CpTensor<T>& a, const IndexTuple& idx);

/// Throws CapacityError when the tensor has more than `max_elems` entries.
template <class T>
DenseTensor<T> materialize(const CpTensor<T>& a, std::size_t max_elems);

// Factorized algebra.

/// Elementwise product. Column (r, s) of the result sits at r * R_b + s.
template <class T>
CpTensor<T> hadamard(const CpTensor<T>& a, const CpTensor<T>& b);

/// <a, b> = sum_i conj(a_i) * b_i.
template <class T>
T inner(const CpTensor<T>& a, const CpTensor<T>& b);

template <class T>
double frob_norm(const CpTensor<T>& a);

/// Mode-p product with an m x n_p matrix.
template <class T>
CpTensor<T> ttm(const CpTensor<T>& a, const Matrix<T>& m, std::size_t mode);

/// a + s * (all-ones tensor). The extra column carries `s` on mode 0.
template <class T>
CpTensor<T> shift(const CpTensor<T>& a, T s);

/// c * a, applied to the mode-0 factor.
template <class T>
CpTensor<T> scale(const CpTensor<T>& a, T c);

/// -a, exact: only the mode-0 factor changes sign.
template <class T>
CpTensor<T> negate(const CpTensor<T>& a);

/// a + b by column concatenation.
template <class T>
CpTensor<T> add(const CpTensor<T>& a, const CpTensor<T>& b);

/// Drops rank-one terms that have an identically zero factor column. Keeps
/// one zero column when everything vanishes.
template <class T>
CpTensor<T> drop_zero_columns(const CpTensor<T>& a);

struct RecompressOptions {
  std::size_t iters = 50;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

/// CP-ALS approximation with at most `target_rank` terms, using only Gram
/// matrices of the factors. When target_rank >= rank(a) the input is returned
/// unchanged.
template <class T>
CpTensor<T> recompress(const CpTensor<T>& a, std::size_t target_rank, const RecompressOptions& opts = {});

/// Relative Frobenius error ||a - b|| / ||a|| computed in factorized form.
template <class T>
double relative_error(const CpTensor<T>& a, const CpTensor<T>& b);

/// Higher-order power method for the best rank-one approximation, then the
/// per-mode argmax of |x_p| (smallest index on ties).
/// Throws DegenerateInputError on the zero tensor.
template <class T>
IndexTuple rank_one_argmax(const CpTensor<T>& a, std::size_t iters = 100, std::uint64_t seed = 0);

/// Khatri-Rao product of the listed modes' factors: row b, in mode-1-fastest
/// order over `modes`, holds prod_{q in modes} U_q(i_q, :).
template <class T>
Matrix<T> khatri_rao_rows(const CpTensor<T>& a, const std::vector<std::size_t>& modes);

}  // namespace cptopk

#endif
