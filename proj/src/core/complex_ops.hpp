// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_CORE_COMPLEX_OPS_HPP
#define CPTOPK_CORE_COMPLEX_OPS_HPP

#include "cptopk/common.hpp"

namespace cptopk::detail {

// std::complex operator* without the NaN recovery call.
inline Real mul(Real a, Real b) { return a * b; }
inline Complex mul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace cptopk::detail

#endif
