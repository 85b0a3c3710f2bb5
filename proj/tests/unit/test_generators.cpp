// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "cptopk/baselines.hpp"
#include "cptopk/generators.hpp"
#include "reference.hpp"

using namespace cptopk;

namespace {

double griewank(const std::vector<double>& z) {
  double sum = 0.0, prod = 1.0;
  for (std::size_t p = 0; p < z.size(); ++p) {
    sum += z[p] * z[p] / 4000.0;
    prod *= std::cos(z[p] / std::sqrt(static_cast<double>(p + 1)));
  }
  return sum - prod + 1.0;
}

double schwefel(const std::vector<double>& z) {
  double s = 418.9829 * static_cast<double>(z.size());
  for (double x : z) s -= x * std::sin(std::sqrt(std::abs(x)));
  return s;
}

std::vector<double> point(const std::vector<std::vector<double>>& grids, const IndexTuple& idx) {
  std::vector<double> z;
  for (std::size_t p = 0; p < idx.size(); ++p) z.push_back(grids[p][idx[p]]);
  return z;
}

}  // namespace

TEST(RandomCp, Deterministic) {
  RandomSpec spec;
  spec.seed = 77;
  const auto a = gen_random_cp(spec), b = gen_random_cp(spec);
  ASSERT_EQ(a.dims(), b.dims());
  for (std::size_t p = 0; p < a.order(); ++p) EXPECT_EQ(a.factor(p), b.factor(p));
}

TEST(RandomCp, RangesOverManyDraws) {
  for (auto dist : {Distribution::Symmetric, Distribution::Quarter, Distribution::Unit}) {
    const double lo = dist == Distribution::Symmetric ? -1.0 : 0.0;
    const double hi = dist == Distribution::Quarter ? 0.75 : 1.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      RandomSpec spec;
      spec.dist = dist;
      spec.seed = seed;
      const auto a = gen_random_cp(spec);
      ASSERT_GE(a.order(), 3u);
      ASSERT_LE(a.order(), 10u);
      ASSERT_GE(a.rank(), 2u);
      ASSERT_LE(a.rank(), 10u);
      for (std::size_t p = 0; p < a.order(); ++p) {
        ASSERT_GE(a.dim(p), 2u);
        ASSERT_LE(a.dim(p), 15u - a.order());
        ASSERT_GE(a.factor(p).minCoeff(), lo);
        ASSERT_LT(a.factor(p).maxCoeff(), hi);
      }
    }
  }
}

TEST(RandomCp, DistributionNames) {
  for (auto dist : {Distribution::Symmetric, Distribution::Quarter, Distribution::Unit})
    EXPECT_EQ(parse_distribution(to_string(dist)), dist);
  EXPECT_THROW(parse_distribution("normal"), InvalidArgumentError);
}

TEST(Grid, UniformMeshes) {
  EXPECT_EQ(uniform_grid(600, 3), (std::vector<double>{-600, 0, 600}));
  EXPECT_EQ(uniform_grid(500, 1), (std::vector<double>{0}));
  const auto g = uniform_grid(600, 6);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(g[i], -g[5 - i]);
  EXPECT_EQ(g.front(), -600.0);
  EXPECT_EQ(g.back(), 600.0);
}

TEST(Griewank, ZeroGridHasExactZeroMinimum) {
  const auto grids = uniform_grids({TestFunction::Griewank, {3, 5, 3, 7}});
  const auto a = gen_griewank(grids);
  const auto o = oracle_topk(a, 1, OrderingKey::Min, 1u << 20);
  EXPECT_EQ(o.values[0], 0.0);
  EXPECT_EQ(point(grids, o.indices[0]), (std::vector<double>{0, 0, 0, 0}));
}

TEST(Griewank, MatchesDirectEvaluation) {
  const auto grids = uniform_grids({TestFunction::Griewank, {3, 3}});
  const auto a = gen_griewank(grids);
  for (const auto& idx : ref::all_indices(a.dims())) {
    const double f = griewank(point(grids, idx));
    EXPECT_LE(std::abs(element(a, idx) - f), 1e-12 * std::max(1.0, std::abs(f)));
  }
}

TEST(Griewank, RankIsDPlus2) {
  EXPECT_EQ(gen_griewank(uniform_grids({TestFunction::Griewank, {2, 3, 4, 2, 2}})).rank(), 7u);
}

TEST(Schwefel, MatchesDirectEvaluation) {
  Rng rng(3);
  std::vector<std::vector<double>> grids(4);
  for (auto& g : grids)
    for (int i = 0; i < 3; ++i) g.push_back(rng.uniform(-500, 500));
  const auto a = gen_schwefel(grids);
  for (const auto& idx : ref::all_indices(a.dims())) {
    const double f = schwefel(point(grids, idx));
    EXPECT_LE(std::abs(element(a, idx) - f), 1e-12 * std::max(1.0, std::abs(f)));
  }
}

TEST(Schwefel, OptimumOnGridIsNearZero) {
  const std::size_t d = 6;
  std::vector<std::vector<double>> grids(d, std::vector<double>{-300.0, 420.9687, 100.0});
  const auto a = gen_schwefel(grids);
  const auto o = oracle_topk(a, 1, OrderingKey::Min, 1u << 20);
  EXPECT_LE(o.values[0], 1e-3 * d);
}

TEST(Schwefel, RankIsDPlus1) {
  EXPECT_EQ(gen_schwefel(uniform_grids({TestFunction::Schwefel, {2, 3, 4}})).rank(), 4u);
}

TEST(FunctionTensors, DenseEqualsPointwiseUpToOrder10) {
  Rng rng(5);
  for (std::size_t d = 1; d <= 10; ++d) {
    std::vector<std::size_t> sizes(d);
    for (auto& n : sizes) n = rng.uniform_int(1, d > 7 ? 2 : 4);
    for (auto fn : {TestFunction::Griewank, TestFunction::Schwefel}) {
      const auto grids = uniform_grids({fn, sizes});
      const auto dense = materialize(gen_function(fn, grids), 1u << 20);
      const auto all = ref::all_indices(dense.dims);
      for (std::size_t lin = 0; lin < all.size(); ++lin) {
        const auto z = point(grids, all[lin]);
        const double f = fn == TestFunction::Griewank ? griewank(z) : schwefel(z);
        ASSERT_LE(std::abs(dense.values[lin] - f), 1e-12 * std::max(1.0, std::abs(f)));
      }
    }
  }
}

TEST(FunctionTensors, Names) {
  EXPECT_EQ(parse_test_function("griewank"), TestFunction::Griewank);
  EXPECT_EQ(parse_test_function("schwefel"), TestFunction::Schwefel);
  EXPECT_THROW(parse_test_function("rosenbrock"), InvalidArgumentError);
  EXPECT_THROW(gen_griewank({}), InvalidArgumentError);
}
