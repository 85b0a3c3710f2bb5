// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_GENERATORS_HPP
#define CPTOPK_GENERATORS_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cptopk/cp_tensor.hpp"
#include "cptopk/rng.hpp"

namespace cptopk {

enum class Distribution {
  Symmetric,  ///< U(-1, 1)
  Quarter,    ///< U(0, 0.75)
  Unit,       ///< U(0, 1)
};

std::string_view to_string(Distribution dist) noexcept;
Distribution parse_distribution(std::string_view name);

/// Random CP tensor recipe: order in [d_min, d_max], each n_p in
/// [n_min, n_bound - d], rank in [rank_min, rank_max], factors i.i.d. from
/// `dist`.
struct RandomSpec {
  Distribution dist = Distribution::Unit;
  std::size_t d_min = 3;
  std::size_t d_max = 10;
  std::size_t n_min = 2;
  std::size_t n_bound = 15;
  std::size_t rank_min = 2;
  std::size_t rank_max = 10;
  std::uint64_t seed = 0;
};

CpTensor<Real> gen_random_cp(const RandomSpec& spec, Rng& rng);
inline CpTensor<Real> gen_random_cp(const RandomSpec& spec) {
  Rng rng(spec.seed);
  return gen_random_cp(spec, rng);
}

enum class TestFunction { Griewank, Schwefel };

std::string_view to_string(TestFunction fn) noexcept;
TestFunction parse_test_function(std::string_view name);

/// Per-mode grid sizes for a separable test function; grids are uniform
/// inclusive meshes over the function's domain.
struct GridSpec {
  TestFunction function = TestFunction::Griewank;
  std::vector<std::size_t> sizes;  ///< One entry per dimension, each >= 1.
};

/// Domain half-width: 600 for Griewank, 500 for Schwefel.
double domain_bound(TestFunction fn) noexcept;

/// Uniform inclusive mesh with `n` points over [-bound, bound]. A single point
/// sits at 0; odd n always contains 0 exactly.
std::vector<double> uniform_grid(double bound, std::size_t n);
std::vector<std::vector<double>> uniform_grids(const GridSpec& spec);

/// Exact rank-(d+2) CP form of
///   f(z) = sum_p z_p^2 / 4000 - prod_p cos(z_p / sqrt(p)) + 1
/// on the tensor grid (p is 1-based). The product term's sign sits on mode 1.
CpTensor<Real> gen_griewank(const std::vector<std::vector<double>>& grids);

/// Exact rank-(d+1) CP form of
///   f(z) = 418.9829 d - sum_p z_p sin(sqrt|z_p|)
/// on the tensor grid.
CpTensor<Real> gen_schwefel(const std::vector<std::vector<double>>& grids);

CpTensor<Real> gen_function(TestFunction fn, const std::vector<std::vector<double>>& grids);

}  // namespace cptopk

#endif
