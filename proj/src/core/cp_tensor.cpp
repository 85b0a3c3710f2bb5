// SPDX-License-Identifier: Apache-2.0

#include "cptopk/cp_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "complex_ops.hpp"
#include "cptopk/rng.hpp"

namespace cptopk {

namespace {

template <class T>
T conj_if(const T& v) {
  if constexpr (is_complex_v<T>)
    return std::conj(v);
  else
    return v;
}

template <class T>
T random_scalar(Rng& rng) {
  if constexpr (is_complex_v<T>) {
    const double re = rng.uniform(-1.0, 1.0);
    return T(re, rng.uniform(-1.0, 1.0));
  } else {
    return rng.uniform(-1.0, 1.0);
  }
}

template <class T>
void require_same_dims(const CpTensor<T>& a, const CpTensor<T>& b, const char* op) {
  if (a.dims() != b.dims())
    throw ShapeError(std::string(op) + ": operand dimensions differ");
}

// Gram-type matrix prod_{q != skip} U_q^T conj(V_q), Hadamard over modes.
template <class T>
Matrix<T> hadamard_gram(const std::vector<Matrix<T>>& u, const std::vector<Matrix<T>>& v, std::size_t skip) {
  Matrix<T> g = Matrix<T>::Ones(u.front().cols(), v.front().cols());
  for (std::size_t q = 0; q < u.size(); ++q) {
    if (q == skip) continue;
    g = g.cwiseProduct(u[q].transpose() * v[q].conjugate());
  }
  return g;
}

}  // namespace

template <class T>
CpTensor<T>::CpTensor(std::vector<Matrix<T>> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw ShapeError("CP tensor needs at least one mode");
  const auto rank = factors_.front().cols();
  if (rank < 1) throw ShapeError("CP rank must be positive");
  dims_.reserve(factors_.size());
  for (std::size_t p = 0; p < factors_.size(); ++p) {
    if (factors_[p].cols() != rank)
      throw ShapeError("factor " + std::to_string(p + 1) + " has " + std::to_string(factors_[p].cols()) +
                       " columns, expected " + std::to_string(rank));
    if (factors_[p].rows() < 1) throw ShapeError("factor " + std::to_string(p + 1) + " has no rows");
    dims_.push_back(static_cast<std::size_t>(factors_[p].rows()));
  }
}

template <class T>
CpTensor<T> rank_one(const std::vector<Vector<T>>& vectors) {
  std::vector<Matrix<T>> factors;
  factors.reserve(vectors.size());
  for (const auto& v : vectors) factors.emplace_back(v);
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> all_ones(const std::vector<std::size_t>& dims) {
  std::vector<Matrix<T>> factors;
  for (std::size_t n : dims) factors.push_back(Matrix<T>::Ones(static_cast<Eigen::Index>(n), 1));
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> indicator(const std::vector<std::size_t>& dims, const IndexTuple& idx) {
  if (idx.size() != dims.size()) throw BoundsError("indicator: index length does not match order");
  std::vector<Matrix<T>> factors;
  for (std::size_t p = 0; p < dims.size(); ++p) {
    if (idx[p] >= dims[p]) throw BoundsError("indicator: index out of range");
    Matrix<T> f = Matrix<T>::Zero(static_cast<Eigen::Index>(dims[p]), 1);
    f(static_cast<Eigen::Index>(idx[p]), 0) = T(1);
    factors.push_back(std::move(f));
  }
  return CpTensor<T>(std::move(factors));
}

template <class T>
T element(const CpTensor<T>& a, const IndexTuple& idx) {
  const std::size_t d = a.order();
  if (idx.size() != d)
    throw BoundsError("index has " + std::to_string(idx.size()) + " components, tensor order is " + std::to_string(d));
  for (std::size_t p = 0; p < d; ++p)
    if (idx[p] >= a.dim(p))
      throw BoundsError("index component " + std::to_string(p + 1) + " = " + std::to_string(idx[p] + 1) +
                        " exceeds dimension " + std::to_string(a.dim(p)));
  T sum(0);
  for (std::size_t r = 0; r < a.rank(); ++r) {
    const auto c = static_cast<Eigen::Index>(r);
    T prod = a.factor(0)(static_cast<Eigen::Index>(idx[0]), c);
    for (std::size_t p = 1; p < d; ++p) prod *= a.factor(p)(static_cast<Eigen::Index>(idx[p]), c);
    sum += prod;
  }
  return sum;
}

template <class T>
Matrix<T> khatri_rao_rows(const CpTensor<T>& a, const std::vector<std::size_t>& modes) {
  const auto rank = static_cast<Eigen::Index>(a.rank());
  Matrix<T> kr = Matrix<T>::Ones(1, rank);
  bool first = true;
  for (std::size_t q : modes) {
    const Matrix<T>& u = a.factor(q);
    if (first) {
      kr = u;
      first = false;
      continue;
    }
    const Eigen::Index prev = kr.rows();
    Matrix<T> next(prev * u.rows(), rank);
    // Left-to-right products so entries match element() bit for bit.
    for (Eigen::Index r = 0; r < rank; ++r)
      for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index b = 0; b < prev; ++b) next(b + prev * i, r) = kr(b, r) * u(i, r);
    kr = std::move(next);
  }
  return kr;
}

template <class T>
DenseTensor<T> materialize(const CpTensor<T>& a, std::size_t max_elems) {
  const std::size_t vol = a.volume();
  if (vol > max_elems)
    throw CapacityError("materialize: tensor has " + std::to_string(vol) + " entries, cap is " +
                        std::to_string(max_elems));
  const std::size_t d = a.order();
  const auto rank = static_cast<Eigen::Index>(a.rank());

  // Leading modes go into one Khatri-Rao block; trailing modes are walked one
  // combination at a time, continuing the same left-to-right product.
  std::size_t split = 0;
  std::size_t front = 1;
  const std::size_t budget = std::max<std::size_t>(1, (std::size_t{1} << 20) / a.rank());
  while (split < d && front * a.dim(split) <= budget) front *= a.dim(split++);
  if (split == 0) front = a.dim(split++);
  std::vector<std::size_t> lead(split);
  std::iota(lead.begin(), lead.end(), std::size_t{0});
  const Matrix<T> kr = khatri_rao_rows(a, lead);

  std::vector<std::size_t> tail_dims(a.dims().begin() + static_cast<std::ptrdiff_t>(split), a.dims().end());
  const std::size_t tail_vol = saturating_volume(tail_dims);

  DenseTensor<T> out{a.dims(), std::vector<T>(vol, T(0))};
  IndexTuple tail(tail_dims.size(), 0);
  std::vector<T> scratch(front);
  for (std::size_t t = 0; t < tail_vol; ++t) {
    T* dst = out.values.data() + t * front;
    for (Eigen::Index r = 0; r < rank; ++r) {
      for (std::size_t b = 0; b < front; ++b) scratch[b] = kr(static_cast<Eigen::Index>(b), r);
      for (std::size_t q = 0; q < tail_dims.size(); ++q) {
        const T w = a.factor(split + q)(static_cast<Eigen::Index>(tail[q]), r);
        for (std::size_t b = 0; b < front; ++b) scratch[b] = detail::mul(scratch[b], w);
      }
      for (std::size_t b = 0; b < front; ++b) dst[b] += scratch[b];
    }
    for (std::size_t q = 0; q < tail.size(); ++q) {
      if (++tail[q] < tail_dims[q]) break;
      tail[q] = 0;
    }
  }
  return out;
}

template <class T>
CpTensor<T> hadamard(const CpTensor<T>& a, const CpTensor<T>& b) {
  require_same_dims(a, b, "hadamard");
  const auto ra = static_cast<Eigen::Index>(a.rank());
  const auto rb = static_cast<Eigen::Index>(b.rank());
  std::vector<Matrix<T>> factors;
  factors.reserve(a.order());
  for (std::size_t p = 0; p < a.order(); ++p) {
    const Matrix<T>& u = a.factor(p);
    const Matrix<T>& v = b.factor(p);
    Matrix<T> c(u.rows(), ra * rb);
    for (Eigen::Index r = 0; r < ra; ++r)
      for (Eigen::Index s = 0; s < rb; ++s) c.col(r * rb + s) = u.col(r).cwiseProduct(v.col(s));
    factors.push_back(std::move(c));
  }
  return CpTensor<T>(std::move(factors));
}

template <class T>
T inner(const CpTensor<T>& a, const CpTensor<T>& b) {
  require_same_dims(a, b, "inner");
  Matrix<T> g = Matrix<T>::Ones(static_cast<Eigen::Index>(a.rank()), static_cast<Eigen::Index>(b.rank()));
  for (std::size_t p = 0; p < a.order(); ++p) g = g.cwiseProduct(a.factor(p).adjoint() * b.factor(p));
  return g.sum();
}

template <class T>
double frob_norm(const CpTensor<T>& a) {
  const double sq = std::real(inner(a, a));
  return sq > 0 ? std::sqrt(sq) : 0.0;
}

template <class T>
CpTensor<T> ttm(const CpTensor<T>& a, const Matrix<T>& m, std::size_t mode) {
  if (mode >= a.order()) throw ShapeError("ttm: mode " + std::to_string(mode + 1) + " out of range");
  if (static_cast<std::size_t>(m.cols()) != a.dim(mode))
    throw ShapeError("ttm: matrix has " + std::to_string(m.cols()) + " columns, mode dimension is " +
                     std::to_string(a.dim(mode)));
  std::vector<Matrix<T>> factors = a.factors();
  factors[mode] = m * a.factor(mode);
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> shift(const CpTensor<T>& a, T s) {
  std::vector<Matrix<T>> factors;
  factors.reserve(a.order());
  const auto rank = static_cast<Eigen::Index>(a.rank());
  for (std::size_t p = 0; p < a.order(); ++p) {
    Matrix<T> f(a.factor(p).rows(), rank + 1);
    f.leftCols(rank) = a.factor(p);
    f.col(rank).setConstant(p == 0 ? s : T(1));
    factors.push_back(std::move(f));
  }
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> scale(const CpTensor<T>& a, T c) {
  std::vector<Matrix<T>> factors = a.factors();
  factors[0] *= c;
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> negate(const CpTensor<T>& a) {
  std::vector<Matrix<T>> factors = a.factors();
  factors[0] = -factors[0];
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> add(const CpTensor<T>& a, const CpTensor<T>& b) {
  require_same_dims(a, b, "add");
  std::vector<Matrix<T>> factors;
  for (std::size_t p = 0; p < a.order(); ++p) {
    Matrix<T> f(a.factor(p).rows(), a.factor(p).cols() + b.factor(p).cols());
    f << a.factor(p), b.factor(p);
    factors.push_back(std::move(f));
  }
  return CpTensor<T>(std::move(factors));
}

template <class T>
CpTensor<T> drop_zero_columns(const CpTensor<T>& a) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(a.rank()); ++r) {
    bool zero = false;
    for (const auto& f : a.factors())
      if ((f.col(r).array() == T(0)).all()) {
        zero = true;
        break;
      }
    if (!zero) keep.push_back(r);
  }
  if (keep.size() == a.rank()) return a;
  if (keep.empty()) return scale(all_ones<T>(a.dims()), T(0));
  std::vector<Matrix<T>> factors;
  for (const auto& f : a.factors()) {
    Matrix<T> g(f.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) g.col(static_cast<Eigen::Index>(c)) = f.col(keep[c]);
    factors.push_back(std::move(g));
  }
  return CpTensor<T>(std::move(factors));
}

template <class T>
double relative_error(const CpTensor<T>& a, const CpTensor<T>& b) {
  const double na2 = std::real(inner(a, a));
  const double nb2 = std::real(inner(b, b));
  const double cross = std::real(inner(a, b));
  const double err2 = std::max(0.0, na2 + nb2 - 2.0 * cross);
  if (na2 <= 0) return std::sqrt(err2);
  return std::sqrt(err2 / na2);
}

template <class T>
CpTensor<T> recompress(const CpTensor<T>& a, std::size_t target_rank, const RecompressOptions& opts) {
  if (target_rank < 1) throw InvalidArgumentError("recompress: target rank must be at least 1");
  if (target_rank >= a.rank()) return a;

  const std::size_t d = a.order();
  const auto target = static_cast<Eigen::Index>(target_rank);

  // Start from the heaviest rank-one terms of the input.
  std::vector<double> weight(a.rank(), 1.0);
  for (std::size_t r = 0; r < a.rank(); ++r)
    for (std::size_t p = 0; p < d; ++p) weight[r] *= a.factor(p).col(static_cast<Eigen::Index>(r)).norm();
  std::vector<std::size_t> order(a.rank());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return weight[x] > weight[y]; });

  Rng rng(opts.seed);
  std::vector<Matrix<T>> v(d);
  for (std::size_t p = 0; p < d; ++p) {
    v[p].resize(a.factor(p).rows(), target);
    for (Eigen::Index c = 0; c < target; ++c) {
      v[p].col(c) = a.factor(p).col(static_cast<Eigen::Index>(order[static_cast<std::size_t>(c)]));
      if (v[p].col(c).norm() == 0.0)
        for (Eigen::Index i = 0; i < v[p].rows(); ++i) v[p](i, c) = random_scalar<T>(rng);
    }
  }

  const double norm_a2 = std::real(inner(a, a));
  if (norm_a2 <= 0.0) return CpTensor<T>(std::move(v));

  double prev_fit = -1.0;
  for (std::size_t sweep = 0; sweep < opts.iters; ++sweep) {
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = 0; q < d; ++q) {
        if (q == p) continue;
        for (Eigen::Index c = 0; c < target; ++c) {
          const double n = v[q].col(c).norm();
          if (n > 0) v[q].col(c) /= n;
        }
      }
      Matrix<T> gram = hadamard_gram(v, v, p);                  // target x target
      const Matrix<T> rhs = a.factor(p) * hadamard_gram(a.factors(), v, p);  // n_p x target
      double ridge = 0.0;
      for (Eigen::Index c = 0; c < target; ++c) ridge += std::real(gram(c, c));
      ridge = std::max(ridge * 1e-12, 1e-300);
      Matrix<T> lhs = gram.transpose();
      lhs.diagonal().array() += T(ridge);
      v[p] = lhs.ldlt().solve(rhs.transpose()).transpose();
    }
    // Fit from factorized inner products only.
    const CpTensor<T> approx(v);
    const double fit = 1.0 - relative_error(a, approx);
    if (prev_fit >= 0.0 && std::abs(fit - prev_fit) < opts.tol) break;
    prev_fit = fit;
  }

  // Balance column norms across modes.
  for (Eigen::Index c = 0; c < target; ++c) {
    double total = 1.0;
    bool zero = false;
    std::vector<double> norms(d);
    for (std::size_t p = 0; p < d; ++p) {
      norms[p] = v[p].col(c).norm();
      if (norms[p] == 0.0) zero = true;
      total *= norms[p];
    }
    if (zero) continue;
    const double each = std::pow(total, 1.0 / static_cast<double>(d));
    for (std::size_t p = 0; p < d; ++p) v[p].col(c) *= each / norms[p];
  }
  return CpTensor<T>(std::move(v));
}

template <class T>
IndexTuple rank_one_argmax(const CpTensor<T>& a, std::size_t iters, std::uint64_t seed) {
  if (frob_norm(a) == 0.0) throw DegenerateInputError("rank_one_argmax: tensor is zero");
  const std::size_t d = a.order();
  const auto rank = static_cast<Eigen::Index>(a.rank());

  // x_p <- sum_r U_p(:, r) * prod_{q != p} <x_q, U_q(:, r)>
  auto contract = [&](const std::vector<Vector<T>>& x, std::size_t p) {
    Vector<T> w = Vector<T>::Ones(rank);
    for (std::size_t q = 0; q < d; ++q)
      if (q != p) w = w.cwiseProduct((x[q].adjoint() * a.factor(q)).transpose());
    return Vector<T>(a.factor(p) * w);
  };

  std::vector<Vector<T>> x(d);
  for (std::size_t p = 0; p < d; ++p) x[p] = Vector<T>::Ones(static_cast<Eigen::Index>(a.dim(p)));
  std::vector<Vector<T>> init(d);
  for (std::size_t p = 0; p < d; ++p) init[p] = contract(x, p);
  Rng rng(seed);
  for (std::size_t p = 0; p < d; ++p) {
    x[p] = init[p];
    if (x[p].norm() == 0.0)
      for (Eigen::Index i = 0; i < x[p].size(); ++i) x[p](i) = random_scalar<T>(rng);
    x[p].normalize();
  }

  double prev = -1.0;
  for (std::size_t it = 0; it < iters; ++it) {
    double sigma = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      Vector<T> y = contract(x, p);
      sigma = y.norm();
      if (sigma == 0.0) break;
      x[p] = y / sigma;
    }
    if (sigma == 0.0 || std::abs(sigma - prev) <= 1e-14 * sigma) break;
    prev = sigma;
  }

  IndexTuple idx(d, 0);
  for (std::size_t p = 0; p < d; ++p) {
    double best = -1.0;
    for (Eigen::Index i = 0; i < x[p].size(); ++i) {
      const double m = std::abs(x[p](i));
      if (m > best) {
        best = m;
        idx[p] = static_cast<std::size_t>(i);
      }
    }
  }
  return idx;
}

#define CPTOPK_INSTANTIATE(T)                                                                        \
  template class CpTensor<T>;                                                                        \
  template CpTensor<T> rank_one(const std::vector<Vector<T>>&);                                      \
  template CpTensor<T> all_ones(const std::vector<std::size_t>&);                                    \
  template CpTensor<T> indicator(const std::vector<std::size_t>&, const IndexTuple&);                \
  template T element(const CpTensor<T>&, const IndexTuple&);                                         \
  template Matrix<T> khatri_rao_rows(const CpTensor<T>&, const std::vector<std::size_t>&);           \
  template DenseTensor<T> materialize(const CpTensor<T>&, std::size_t);                              \
  template CpTensor<T> hadamard(const CpTensor<T>&, const CpTensor<T>&);                             \
  template T inner(const CpTensor<T>&, const CpTensor<T>&);                                          \
  template double frob_norm(const CpTensor<T>&);                                                     \
  template CpTensor<T> ttm(const CpTensor<T>&, const Matrix<T>&, std::size_t);                       \
  template CpTensor<T> shift(const CpTensor<T>&, T);                                                 \
  template CpTensor<T> scale(const CpTensor<T>&, T);                                                 \
  template CpTensor<T> negate(const CpTensor<T>&);                                                   \
  template CpTensor<T> add(const CpTensor<T>&, const CpTensor<T>&);                                  \
  template CpTensor<T> drop_zero_columns(const CpTensor<T>&);                                        \
  template double relative_error(const CpTensor<T>&, const CpTensor<T>&);                            \
  template CpTensor<T> recompress(const CpTensor<T>&, std::size_t, const RecompressOptions&);        \
  template IndexTuple rank_one_argmax(const CpTensor<T>&, std::size_t, std::uint64_t);

CPTOPK_INSTANTIATE(Real)
CPTOPK_INSTANTIATE(Complex)

#undef CPTOPK_INSTANTIATE

}  // namespace cptopk
