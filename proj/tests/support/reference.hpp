// SPDX-License-Identifier: Apache-2.0

// Dense reference implementations and random instance builders shared by the
// unit and acceptance tests. Everything here is deliberately naive.

#ifndef CPTOPK_TEST_REFERENCE_HPP
#define CPTOPK_TEST_REFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <numbers>
#include <vector>

#include "cptopk/cp_tensor.hpp"
#include "cptopk/qft.hpp"
#include "cptopk/rng.hpp"

namespace ref {

using cptopk::Complex;
using cptopk::CpTensor;
using cptopk::IndexTuple;
using cptopk::Matrix;

template <class T>
T draw(cptopk::Rng& rng, double lo, double hi) {
  if constexpr (cptopk::is_complex_v<T>) {
    const double re = rng.uniform(lo, hi);
    return {re, rng.uniform(lo, hi)};
  } else {
    return rng.uniform(lo, hi);
  }
}

template <class T = double>
CpTensor<T> random_cp(const std::vector<std::size_t>& dims, std::size_t rank, cptopk::Rng& rng, double lo = -1.0,
                      double hi = 1.0) {
  std::vector<Matrix<T>> f;
  for (std::size_t n : dims) {
    Matrix<T> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
    for (Eigen::Index r = 0; r < m.cols(); ++r)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, r) = draw<T>(rng, lo, hi);
    f.push_back(std::move(m));
  }
  return CpTensor<T>(std::move(f));
}

/// Random dims with d in [d_lo, d_hi], n_p in [n_lo, n_hi].
inline std::vector<std::size_t> random_dims(cptopk::Rng& rng, std::size_t d_lo, std::size_t d_hi, std::size_t n_lo,
                                            std::size_t n_hi) {
  std::vector<std::size_t> dims(rng.uniform_int(d_lo, d_hi));
  for (auto& n : dims) n = rng.uniform_int(n_lo, n_hi);
  return dims;
}

inline std::size_t volume(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Every index tuple in mode-1-fastest order.
inline std::vector<IndexTuple> all_indices(const std::vector<std::size_t>& dims) {
  std::vector<IndexTuple> out;
  IndexTuple idx(dims.size(), 0);
  for (std::size_t lin = 0; lin < volume(dims); ++lin) {
    out.push_back(idx);
    for (std::size_t p = 0; p < dims.size(); ++p) {
      if (++idx[p] < dims[p]) break;
      idx[p] = 0;
    }
  }
  return out;
}

/// Entry evaluated with a plain triple loop, in long double.
template <class T>
T naive_element(const CpTensor<T>& a, const IndexTuple& idx) {
  using Wide = std::conditional_t<cptopk::is_complex_v<T>, std::complex<long double>, long double>;
  Wide sum = 0;
  for (std::size_t r = 0; r < a.rank(); ++r) {
    Wide prod = 1;
    for (std::size_t p = 0; p < a.order(); ++p)
      prod *= static_cast<Wide>(a.factor(p)(static_cast<Eigen::Index>(idx[p]), static_cast<Eigen::Index>(r)));
    sum += prod;
  }
  return static_cast<T>(sum);
}

template <class T>
std::vector<T> naive_dense(const CpTensor<T>& a) {
  std::vector<T> out;
  for (const auto& idx : all_indices(a.dims())) out.push_back(naive_element(a, idx));
  return out;
}

template <class T>
double max_abs_diff(const std::vector<T>& x, const std::vector<T>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, static_cast<double>(std::abs(x[i] - y[i])));
  return m;
}

template <class T>
double max_abs(const std::vector<T>& x) {
  double m = 0.0;
  for (const T& v : x) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

// Statevector simulator. Basis state b has qubit a (0-based) as bit d-1-a,
// i.e. qubit 0 is the most significant, matching the big-endian layout.

inline std::size_t bit_of(std::size_t qubits, std::size_t a) { return std::size_t{1} << (qubits - 1 - a); }

inline std::vector<Complex> statevector(const CpTensor<Complex>& state, const cptopk::QubitLayout& layout) {
  std::vector<Complex> psi(std::size_t{1} << layout.qubits);
  for (const auto& idx : all_indices(state.dims()))
    psi[layout.basis_state(idx)] = naive_element(state, idx);
  return psi;
}

inline void apply_dense(std::vector<Complex>& psi, const cptopk::GateOp& g, std::size_t qubits) {
  using K = cptopk::GateOp::Kind;
  const std::size_t n = psi.size();
  if (g.kind == K::Hadamard) {
    const std::size_t w = bit_of(qubits, g.first);
    const double s = 1.0 / std::numbers::sqrt2;
    for (std::size_t b = 0; b < n; ++b)
      if (!(b & w)) {
        const Complex x = psi[b], y = psi[b | w];
        psi[b] = s * (x + y);
        psi[b | w] = s * (x - y);
      }
  } else if (g.kind == K::ControlledPhase) {
    const std::size_t both = bit_of(qubits, g.first) | bit_of(qubits, g.second);
    for (std::size_t b = 0; b < n; ++b)
      if ((b & both) == both) psi[b] *= std::polar(1.0, g.angle);
  } else {
    const std::size_t wa = bit_of(qubits, g.first), wb = bit_of(qubits, g.second);
    for (std::size_t b = 0; b < n; ++b)
      if ((b & wa) && !(b & wb)) std::swap(psi[b], psi[(b & ~wa) | wb]);
  }
}

/// Textbook DFT on the amplitude vector: out[y] = 2^{-d/2} sum_x e^{2 pi i x y / 2^d} in[x].
inline std::vector<Complex> dft(const std::vector<Complex>& in) {
  const std::size_t n = in.size();
  std::vector<Complex> out(n);
  for (std::size_t y = 0; y < n; ++y) {
    Complex acc = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      acc += in[x] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((x * y) % n) / static_cast<double>(n));
    out[y] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

}  // namespace ref

#endif
