// SPDX-License-Identifier: Apache-2.0

#include "cptopk/generators.hpp"

#include <cmath>
#include <string>

namespace cptopk {

std::string_view to_string(Distribution dist) noexcept {
  switch (dist) {
    case Distribution::Symmetric: return "u-11";
    case Distribution::Quarter: return "u0075";
    case Distribution::Unit: return "u01";
  }
  return "u01";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "u-11" || name == "u11" || name == "symmetric") return Distribution::Symmetric;
  if (name == "u0075" || name == "quarter") return Distribution::Quarter;
  if (name == "u01" || name == "unit") return Distribution::Unit;
  throw InvalidArgumentError("unknown distribution '" + std::string(name) + "' (expected u-11, u0075 or u01)");
}

CpTensor<Real> gen_random_cp(const RandomSpec& spec, Rng& rng) {
  if (spec.d_min < 1 || spec.d_min > spec.d_max) throw InvalidArgumentError("bad order range");
  if (spec.rank_min < 1 || spec.rank_min > spec.rank_max) throw InvalidArgumentError("bad rank range");
  if (spec.n_min < 1 || spec.n_bound < spec.d_max + spec.n_min)
    throw InvalidArgumentError("dimension bound leaves no room for the largest order");

  double lo = 0.0;
  double hi = 1.0;
  if (spec.dist == Distribution::Symmetric) lo = -1.0;
  if (spec.dist == Distribution::Quarter) hi = 0.75;

  const std::size_t d = rng.uniform_int(spec.d_min, spec.d_max);
  std::vector<std::size_t> dims(d);
  for (auto& n : dims) n = rng.uniform_int(spec.n_min, spec.n_bound - d);
  const auto rank = static_cast<Eigen::Index>(rng.uniform_int(spec.rank_min, spec.rank_max));

  std::vector<Matrix<Real>> factors;
  factors.reserve(d);
  for (std::size_t n : dims) {
    Matrix<Real> f(static_cast<Eigen::Index>(n), rank);
    for (Eigen::Index r = 0; r < rank; ++r)
      for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, r) = rng.uniform(lo, hi);
    factors.push_back(std::move(f));
  }
  return CpTensor<Real>(std::move(factors));
}

std::string_view to_string(TestFunction fn) noexcept {
  return fn == TestFunction::Griewank ? "griewank" : "schwefel";
}

TestFunction parse_test_function(std::string_view name) {
  if (name == "griewank") return TestFunction::Griewank;
  if (name == "schwefel") return TestFunction::Schwefel;
  throw InvalidArgumentError("unknown function '" + std::string(name) + "' (expected griewank or schwefel)");
}

double domain_bound(TestFunction fn) noexcept { return fn == TestFunction::Griewank ? 600.0 : 500.0; }

std::vector<double> uniform_grid(double bound, std::size_t n) {
  if (n < 1) throw InvalidArgumentError("grid needs at least one point");
  if (n == 1) return {0.0};
  std::vector<double> g(n);
  const double width = 2.0 * bound;
  for (std::size_t i = 0; i < n; ++i) {
    // Mirror the upper half so the mesh is exactly symmetric and hits 0.
    if (2 * i < n - 1)
      g[i] = -bound + width * static_cast<double>(i) / static_cast<double>(n - 1);
    else if (2 * i == n - 1)
      g[i] = 0.0;
    else
      g[i] = bound - width * static_cast<double>(n - 1 - i) / static_cast<double>(n - 1);
  }
  return g;
}

std::vector<std::vector<double>> uniform_grids(const GridSpec& spec) {
  std::vector<std::vector<double>> grids;
  for (std::size_t n : spec.sizes) grids.push_back(uniform_grid(domain_bound(spec.function), n));
  return grids;
}

namespace {

void require_grids(const std::vector<std::vector<double>>& grids) {
  if (grids.empty()) throw InvalidArgumentError("function tensor needs d >= 1");
  for (const auto& g : grids)
    if (g.empty()) throw InvalidArgumentError("empty grid");
}

}  // namespace

CpTensor<Real> gen_griewank(const std::vector<std::vector<double>>& grids) {
  require_grids(grids);
  const std::size_t d = grids.size();
  const auto rank = static_cast<Eigen::Index>(d + 2);
  std::vector<Matrix<Real>> factors;
  for (std::size_t p = 0; p < d; ++p) {
    const auto& g = grids[p];
    Matrix<Real> f = Matrix<Real>::Ones(static_cast<Eigen::Index>(g.size()), rank);
    const double root = std::sqrt(static_cast<double>(p + 1));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      f(row, static_cast<Eigen::Index>(p)) = g[i] * g[i] / 4000.0;
      const double c = std::cos(g[i] / root);
      f(row, static_cast<Eigen::Index>(d)) = p == 0 ? -c : c;
    }
    factors.push_back(std::move(f));
  }
  return CpTensor<Real>(std::move(factors));
}

CpTensor<Real> gen_schwefel(const std::vector<std::vector<double>>& grids) {
  require_grids(grids);
  const std::size_t d = grids.size();
  const auto rank = static_cast<Eigen::Index>(d + 1);
  std::vector<Matrix<Real>> factors;
  for (std::size_t p = 0; p < d; ++p) {
    const auto& g = grids[p];
    Matrix<Real> f = Matrix<Real>::Ones(static_cast<Eigen::Index>(g.size()), rank);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      f(row, static_cast<Eigen::Index>(p)) = -g[i] * std::sin(std::sqrt(std::abs(g[i])));
      if (p == 0) f(row, static_cast<Eigen::Index>(d)) = 418.9829 * static_cast<double>(d);
    }
    factors.push_back(std::move(f));
  }
  return CpTensor<Real>(std::move(factors));
}

CpTensor<Real> gen_function(TestFunction fn, const std::vector<std::vector<double>>& grids) {
  return fn == TestFunction::Griewank ? gen_griewank(grids) : gen_schwefel(grids);
}

}  // namespace cptopk
