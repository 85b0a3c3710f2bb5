// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <queue>

#include "cptopk/baselines.hpp"
#include "reference.hpp"

using namespace cptopk;

namespace {

CpTensor<Real> rank1_2x2() {
  Vector<Real> u(2), v(2);
  u << 1, 2;
  v << 3, 4;
  return rank_one<Real>({u, v});
}

}  // namespace

TEST(Oracle, MaxAndMinOrder) {
  EXPECT_EQ(oracle_topk(rank1_2x2(), 4, OrderingKey::Max, 4).values, (std::vector<double>{8, 6, 4, 3}));
  EXPECT_EQ(oracle_topk(rank1_2x2(), 4, OrderingKey::Min, 4).values, (std::vector<double>{3, 4, 6, 8}));
}

TEST(Oracle, CapacityAndInfeasible) {
  EXPECT_THROW(oracle_topk(rank1_2x2(), 1, OrderingKey::Max, 3), CapacityError);
  EXPECT_THROW(oracle_topk(rank1_2x2(), 5, OrderingKey::Max, 100), InfeasibleKError);
}

TEST(Oracle, AgreesWithHeapScan) {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto a = ref::random_cp({4, 3, 5, 2, 3}, 4, rng);
    const std::size_t k = 7;
    // Independent scan: min-heap of the k best (value, -linear) pairs.
    using Item = std::pair<double, long>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const auto all = ref::all_indices(a.dims());
    for (std::size_t lin = 0; lin < all.size(); ++lin) {
      heap.push({element(a, all[lin]), -static_cast<long>(lin)});
      if (heap.size() > k) heap.pop();
    }
    std::vector<Item> best;
    while (!heap.empty()) best.push_back(heap.top()), heap.pop();
    std::reverse(best.begin(), best.end());
    const auto o = oracle_topk(a, k, OrderingKey::Max, 1u << 20);
    for (std::size_t j = 0; j < k; ++j) {
      EXPECT_EQ(o.values[j], best[j].first);
      EXPECT_EQ(o.indices[j], all[static_cast<std::size_t>(-best[j].second)]);
    }
  }
}

TEST(Oracle, Invariants) {
  Rng rng(2);
  const auto a = ref::random_cp<Complex>({4, 3, 5}, 3, rng);
  const auto o = oracle_topk(a, 10, OrderingKey::MaxAbs, 1000);
  for (std::size_t j = 0; j < 10; ++j) {
    EXPECT_EQ(o.values[j], element(a, o.indices[j]));
    if (j) {
      EXPECT_GE(std::abs(o.values[j - 1]), std::abs(o.values[j]));
    }
  }
  std::vector<IndexTuple> idx = o.indices;
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(std::unique(idx.begin(), idx.end()), idx.end());
}

TEST(PowerIteration, ScaledIndicator) {
  const auto a = scale(indicator<Real>({3, 4, 5}, {1, 2, 3}), 2.0);
  const auto r = power_iteration_max(a);
  EXPECT_EQ(r.index, (IndexTuple{1, 2, 3}));
  EXPECT_EQ(r.value, 2.0);
}

TEST(PowerIteration, SeparablePositive) {
  Vector<Real> u(3), v(4), w(2);
  u << 0.2, 0.9, 0.5;
  v << 0.3, 0.1, 0.7, 0.2;
  w << 0.4, 0.6;
  const auto a = rank_one<Real>({u, v, w});
  const auto r = power_iteration_max(a);
  EXPECT_EQ(r.index, (IndexTuple{1, 2, 1}));
  EXPECT_EQ(r.value, element(a, r.index));
}

TEST(PowerIteration, ValueIsAlwaysARealEntry) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 2, 4, 2, 6), 4, rng);
    const auto r = power_iteration_max(a);
    EXPECT_EQ(r.value, element(a, r.index));
    EXPECT_GT(r.shift, 0.0);
  }
}

TEST(PowerIteration, NonnegativeSeparatedMaxima) {
  Rng rng(4);
  int trials = 0, hits = 0;
  while (trials < 50) {
    const auto a = ref::random_cp({5, 4, 6, 3}, 3, rng, 0.0, 1.0);
    auto dense = materialize(a, 1u << 20).values;
    std::vector<double> sorted = dense;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted[0] < 1.5 * sorted[1]) continue;
    ++trials;
    const auto o = oracle_topk(a, 1, OrderingKey::Max, 1u << 20);
    if (power_iteration_max(a).index == o.indices[0]) ++hits;
  }
  EXPECT_GE(hits, 45);
}

TEST(PowerIteration, IterateNormStaysUnit) {
  Rng rng(5);
  const auto a = ref::random_cp({4, 5, 3}, 4, rng);
  PowerIterConfig cfg;
  cfg.max_iters = 5;
  EXPECT_LE(power_iteration_max(a, cfg).norm_drift, 1e-12);
  EXPECT_LE(power_iteration_max(a).norm_drift, 1e-12);
}

TEST(PowerIteration, ZeroTensorIsDegenerate) {
  EXPECT_THROW(power_iteration_max(scale(rank1_2x2(), 0.0)), DegenerateInputError);
}
