// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cptopk/baselines.hpp"
#include "cptopk/generators.hpp"
#include "cptopk/solver.hpp"
#include "reference.hpp"

using namespace cptopk;

namespace {

CpTensor<Real> rank1_2x2() {
  Vector<Real> u(2), v(2);
  u << 1, 2;
  v << 3, 4;
  return rank_one<Real>({u, v});
}

template <class T>
CandidateSet<T> make_cands(const CpTensor<T>& a, std::vector<IndexTuple> tuples) {
  CandidateSet<T> c;
  c.tuples = std::move(tuples);
  for (const auto& t : c.tuples) c.values.push_back(element(a, t));
  return c;
}

std::set<IndexTuple> as_set(const std::vector<IndexTuple>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(InitCandidates, ExhaustiveOn2x2) {
  Rng rng(1);
  const auto c = init_candidates(rank1_2x2(), 4, rng);
  EXPECT_EQ(as_set(c.tuples).size(), 4u);
}

TEST(InitCandidates, Deterministic) {
  Rng a(42), b(42);
  const auto t = all_ones<Real>({5, 6, 7});
  EXPECT_EQ(init_candidates(t, 6, a).tuples, init_candidates(t, 6, b).tuples);
}

TEST(InitCandidates, NeverDuplicates) {
  const auto t = all_ones<Real>({4, 4, 4});
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    ASSERT_EQ(as_set(init_candidates(t, 3, rng).tuples).size(), 3u);
  }
}

TEST(InitCandidates, Infeasible) {
  Rng rng(1);
  EXPECT_THROW(init_candidates(rank1_2x2(), 5, rng), InfeasibleKError);
}

TEST(BlockSchedule, Examples) {
  EXPECT_EQ(block_schedule(4, 2), (std::vector<Block>{{0, 1}, {2, 3}}));
  EXPECT_EQ(block_schedule(5, 2), (std::vector<Block>{{0, 1}, {2, 3}, {4, 0}}));
  EXPECT_EQ(block_schedule(3, 3), (std::vector<Block>{{0, 1, 2}}));
  EXPECT_EQ(block_schedule(3, 7), (std::vector<Block>{{0, 1, 2}}));
}

TEST(BlockSchedule, CoversEveryModeWithFullWindows) {
  for (std::size_t d = 1; d <= 9; ++d)
    for (std::size_t s = 1; s <= d; ++s) {
      std::set<std::size_t> seen;
      for (const auto& b : block_schedule(d, s)) {
        EXPECT_EQ(b.size(), s);
        EXPECT_EQ(std::set<std::size_t>(b.begin(), b.end()).size(), s);
        seen.insert(b.begin(), b.end());
      }
      EXPECT_EQ(seen.size(), d);
    }
}

TEST(BlockSize, AutoKeepsVolumeUnderCap) {
  EXPECT_EQ(auto_block_size({10, 10, 10, 10}, 1000), 3u);
  EXPECT_EQ(auto_block_size({10, 10, 10, 10}, 99), 1u);
  EXPECT_EQ(auto_block_size({10, 10, 10, 10}, 5), 1u);
  SolverConfig cfg;
  cfg.block_size = 9;
  EXPECT_EQ(effective_block_size({3, 3, 3}, cfg), 3u);
}

TEST(ComputeAlpha, FullBlockGivesOnes) {
  Rng rng(3);
  const auto a = ref::random_cp({3, 4, 2}, 3, rng);
  const auto c = make_cands(a, {{0, 1, 1}, {2, 3, 0}});
  const auto co = compute_alpha(a, c, {0, 1, 2});
  EXPECT_TRUE(co.alpha.isOnes());
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_TRUE(co.beta(i, j));
}

TEST(ComputeAlpha, DirectProduct) {
  Matrix<Real> u1(2, 1), u2(2, 1), u3(2, 1);
  u1 << 1, 1;
  u2 << 3, 4;
  u3 << 5, 6;
  const CpTensor<Real> a({u1, u2, u3});
  const auto co = compute_alpha(a, make_cands(a, {{0, 1, 0}}), {0});
  EXPECT_EQ(co.alpha(0, 0), 20.0);
}

TEST(ComputeAlpha, ConsistencyWithElement) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 2, 5, 2, 5), 4, rng);
    Rng r2(t);
    const auto c = init_candidates(a, 3, r2);
    const Block block = block_schedule(a.order(), 2).front();
    const auto co = compute_alpha(a, c, block);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto tj = subproblem_tensor(a, Vector<Real>(co.alpha.col(static_cast<Eigen::Index>(j))), block, 1u << 20);
      IndexTuple own;
      for (std::size_t q : block) own.push_back(c.tuples[j][q]);
      EXPECT_NEAR(tj.at(own), element(a, c.tuples[j]), 1e-14);
    }
  }
}

TEST(ComputeAlpha, BetaMaskMeansAgreementOutsideBlock) {
  const auto a = all_ones<Real>({3, 3, 3});
  const auto c = make_cands(a, {{0, 0, 0}, {1, 2, 0}, {1, 2, 1}});
  const auto co = compute_alpha(a, c, {0, 1});
  EXPECT_TRUE(co.beta(0, 1));
  EXPECT_FALSE(co.beta(0, 2));
  EXPECT_FALSE(co.beta(1, 2));
  EXPECT_TRUE(co.beta(2, 2));
}

TEST(SubproblemTensor, ZeroAlpha) {
  Rng rng(5);
  const auto a = ref::random_cp({3, 4, 2}, 3, rng);
  const auto tj = subproblem_tensor(a, Vector<Real>(Vector<Real>::Zero(3)), {0, 1}, 100);
  for (double v : tj.values) EXPECT_EQ(v, 0.0);
}

TEST(SubproblemTensor, WholeTensorEqualsMaterialize) {
  Rng rng(6);
  const auto a = ref::random_cp({3, 4, 2}, 3, rng);
  EXPECT_EQ(subproblem_tensor(a, Vector<Real>(Vector<Real>::Ones(3)), {0, 1, 2}, 100).values, materialize(a, 100).values);
}

TEST(SubproblemTensor, MatchesElementAcrossBlock) {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto a = ref::random_cp<Complex>(ref::random_dims(rng, 3, 5, 2, 4), 3, rng);
    Rng r2(t);
    const auto c = init_candidates(a, 1, r2);
    const Block block{1, 2};
    const auto co = compute_alpha(a, c, block);
    const auto tj = subproblem_tensor(a, Vector<Complex>(co.alpha.col(0)), block, 1000);
    for (std::size_t i1 = 0; i1 < a.dim(1); ++i1)
      for (std::size_t i2 = 0; i2 < a.dim(2); ++i2) {
        IndexTuple full = c.tuples[0];
        full[1] = i1;
        full[2] = i2;
        EXPECT_LT(std::abs(tj.at({i1, i2}) - element(a, full)), 1e-14);
      }
  }
}

TEST(SubproblemTensor, CapacityError) {
  const auto a = all_ones<Real>({10, 10, 10});
  EXPECT_THROW(subproblem_tensor(a, Vector<Real>(Vector<Real>::Ones(1)), {0, 1}, 99), CapacityError);
}

TEST(SolveSubproblem, SingleCandidateIsArgmax) {
  const auto a = rank1_2x2();
  const auto c = make_cands(a, {{0, 0}});
  const auto co = compute_alpha(a, c, {0, 1});
  const auto tj = subproblem_tensor(a, Vector<Real>(co.alpha.col(0)), {0, 1}, 4);
  const auto pick = solve_subproblem(tj, 0, c, co, {0, 1}, OrderingKey::Max);
  EXPECT_EQ(pick.value, 8.0);
  EXPECT_EQ(pick.block_index, (IndexTuple{1, 1}));
}

TEST(SolveSubproblem, SkipsOccupiedMax) {
  const auto a = rank1_2x2();
  const auto c = make_cands(a, {{1, 1}, {0, 0}});
  const auto co = compute_alpha(a, c, {0, 1});
  const DenseTensor<Real> tj{{2, 2}, {3, 6, 4, 8}};
  const auto pick = solve_subproblem(tj, 1, c, co, {0, 1}, OrderingKey::Max);
  EXPECT_EQ(pick.value, 6.0);
  EXPECT_EQ(pick.block_index, (IndexTuple{1, 0}));
}

TEST(SolveSubproblem, TiesGoToSmallestLinearIndex) {
  const auto a = all_ones<Real>({2, 2});
  const auto c = make_cands(a, {{1, 1}});
  const auto co = compute_alpha(a, c, {0, 1});
  const DenseTensor<Real> tj{{2, 2}, {5, 7, 7, 7}};
  EXPECT_EQ(solve_subproblem(tj, 0, c, co, {0, 1}, OrderingKey::Max).linear, 1u);
}

TEST(SolveSubproblem, ExhaustionWhenAllCollide) {
  // Mid-sweep state: candidate 1 just moved onto candidate 2's cell, and the
  // only other cell of the block is held by candidate 0.
  const auto a = all_ones<Real>({2, 3});
  const auto c = make_cands(a, {{0, 0}, {1, 0}, {1, 0}});
  const auto co = compute_alpha(a, c, {0});
  const DenseTensor<Real> tj{{2}, {1, 2}};
  EXPECT_THROW(solve_subproblem(tj, 2, c, co, {0}, OrderingKey::Max), ExhaustionError);
  EXPECT_NO_THROW(solve_subproblem(tj, 1, c, co, {0}, OrderingKey::Max));
}

TEST(SolveSubproblem, MatchesBruteForceSelectionRule) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    const auto a = ref::random_cp({4, 4, 3}, 2, rng);
    Rng r2(t);
    auto c = init_candidates(a, 3, r2);
    // Force shared non-block coordinates so collisions actually happen.
    for (auto& tup : c.tuples) tup[2] = 0;
    std::sort(c.tuples.begin(), c.tuples.end());
    c.tuples.erase(std::unique(c.tuples.begin(), c.tuples.end()), c.tuples.end());
    c.values.clear();
    for (const auto& tup : c.tuples) c.values.push_back(element(a, tup));
    const Block block{0, 1};
    const auto co = compute_alpha(a, c, block);
    const std::size_t j = c.tuples.size() - 1;
    const auto tj = subproblem_tensor(a, Vector<Real>(co.alpha.col(static_cast<Eigen::Index>(j))), block, 100);

    std::size_t best = SIZE_MAX;
    for (std::size_t b = 0; b < tj.values.size(); ++b) {
      IndexTuple full = c.tuples[j];
      full[0] = b % 4;
      full[1] = b / 4;
      bool clash = false;
      for (std::size_t i = 0; i < j; ++i) clash = clash || c.tuples[i] == full;
      if (clash) continue;
      if (best == SIZE_MAX || tj.values[b] > tj.values[best]) best = b;
    }
    EXPECT_EQ(solve_subproblem(tj, j, c, co, block, OrderingKey::Max).linear, best);
  }
}

TEST(Sweep, Rank1ConvergesInOneSweep) {
  const auto a = rank1_2x2();
  SolverConfig cfg;
  cfg.block_size = 1;
  for (const IndexTuple& start : ref::all_indices({2, 2})) {
    const auto next = sweep(a, make_cands(a, {start}), cfg);
    EXPECT_EQ(next.values[0], 8.0);
    EXPECT_EQ(next.tuples[0], (IndexTuple{1, 1}));
  }
}

TEST(Sweep, KeepsCandidatesDistinctAndValuesFresh) {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 2, 5, 2, 4), 3, rng);
    SolverConfig cfg;
    cfg.block_size = rng.uniform_int(1, 2);
    Rng r2(t);
    auto c = init_candidates(a, std::min<std::size_t>(6, a.volume()), r2);
    for (int s = 0; s < 3; ++s) {
      c = sweep(a, c, cfg);
      ASSERT_EQ(as_set(c.tuples).size(), c.tuples.size());
      for (std::size_t j = 0; j < c.tuples.size(); ++j) ASSERT_EQ(c.values[j], element(a, c.tuples[j]));
    }
  }
}

TEST(Solve, Rank1TopTwo) {
  const auto a = rank1_2x2();
  SolverConfig cfg;
  cfg.k = 2;
  cfg.restarts = 1;
  const auto r = solve(a, cfg);
  EXPECT_EQ(r.values[0], 8.0);
  EXPECT_TRUE(r.values[1] == 6.0 || r.values[1] == 4.0);
  cfg.extra = 2;
  const auto full = solve(a, cfg);
  EXPECT_EQ(full.values, (std::vector<double>{8, 6}));
  EXPECT_EQ(full.indices, (std::vector<IndexTuple>{{1, 1}, {1, 0}}));
}

TEST(Solve, MinKey) {
  SolverConfig cfg;
  cfg.key = OrderingKey::Min;
  const auto r = solve(rank1_2x2(), cfg);
  EXPECT_EQ(r.values[0], 3.0);
  EXPECT_EQ(r.indices[0], (IndexTuple{0, 0}));
}

TEST(Solve, InfeasibleK) {
  SolverConfig cfg;
  cfg.k = 5;
  EXPECT_THROW(solve(rank1_2x2(), cfg), InfeasibleKError);
}

TEST(Solve, ExtraIsReducedToFit) {
  SolverConfig cfg;
  cfg.k = 3;
  cfg.extra = 10;
  EXPECT_EQ(solve(rank1_2x2(), cfg).values, (std::vector<double>{8, 6, 4}));
}

TEST(Solve, CapacityError) {
  SolverConfig cfg;
  cfg.block_size = 2;
  cfg.subproblem_cap = 50;
  EXPECT_THROW(solve(all_ones<Real>({10, 10, 10}), cfg), CapacityError);
  cfg.auto_block = true;
  EXPECT_NO_THROW(solve(all_ones<Real>({10, 10, 10}), cfg));
}

TEST(Solve, ComplexRejectsMaxMin) {
  Rng rng(10);
  const auto a = ref::random_cp<Complex>({3, 3}, 2, rng);
  SolverConfig cfg;
  EXPECT_THROW(solve(a, cfg), InvalidArgumentError);
  cfg.key = OrderingKey::MaxAbs;
  EXPECT_NO_THROW(solve(a, cfg));
}

TEST(Solve, OutputInvariants) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 2, 5, 2, 5), 4, rng);
    SolverConfig cfg;
    cfg.k = std::min<std::size_t>(4, a.volume());
    cfg.extra = 2;
    cfg.seed = t;
    const auto r = solve(a, cfg);
    ASSERT_EQ(r.indices.size(), cfg.k);
    EXPECT_EQ(as_set(r.indices).size(), cfg.k);
    for (std::size_t j = 0; j < cfg.k; ++j) {
      EXPECT_EQ(r.values[j], element(a, r.indices[j]));
      if (j) {
        EXPECT_GE(r.values[j - 1], r.values[j]);
      }
    }
  }
}

TEST(Solve, Deterministic) {
  Rng rng(12);
  const auto a = ref::random_cp({5, 4, 6, 3}, 5, rng);
  SolverConfig cfg;
  cfg.k = 3;
  cfg.extra = 2;
  cfg.seed = 99;
  const auto x = solve(a, cfg), y = solve(a, cfg);
  EXPECT_EQ(x.values, y.values);
  EXPECT_EQ(x.indices, y.indices);
  EXPECT_EQ(x.trace, y.trace);
}

TEST(Solve, FullBlockMatchesOracle) {
  Rng rng(13);
  for (int t = 0; t < 60; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 1, 4, 1, 6), rng.uniform_int(1, 5), rng);
    for (std::size_t k : {1, 5}) {
      if (k > a.volume()) continue;
      SolverConfig cfg;
      cfg.k = k;
      cfg.block_size = a.order();
      cfg.restarts = 1;
      cfg.seed = t;
      for (auto key : {OrderingKey::Max, OrderingKey::Min}) {
        cfg.key = key;
        const auto r = solve(a, cfg);
        const auto o = oracle_topk(a, k, key, 1u << 20);
        EXPECT_EQ(r.indices, o.indices);
        EXPECT_EQ(r.values, o.values);
      }
    }
  }
}

TEST(Solve, FullBlockShiftInvariance) {
  Rng rng(14);
  for (int t = 0; t < 20; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 2, 4, 2, 5), 3, rng);
    SolverConfig cfg;
    cfg.k = 3;
    cfg.block_size = a.order();
    cfg.restarts = 1;
    const double c = rng.uniform(-5.0, 5.0);
    EXPECT_EQ(solve(a, cfg).indices, solve(shift(a, c), cfg).indices);
  }
}

TEST(Solve, MinMaxDuality) {
  Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 2, 5, 2, 6), 4, rng);
    SolverConfig cfg;
    cfg.k = 3;
    cfg.extra = 1;
    cfg.seed = t;
    cfg.key = OrderingKey::Min;
    const auto lo = solve(a, cfg);
    cfg.key = OrderingKey::Max;
    const auto hi = solve(negate(a), cfg);
    ASSERT_EQ(lo.indices, hi.indices);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(lo.values[j], -hi.values[j]);
  }
}

TEST(Solve, K1TraceNeverDecreases) {
  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 3, 6, 2, 6), 5, rng);
    SolverConfig cfg;
    cfg.k = 1;
    cfg.extra = t % 2 ? 5 : 0;
    cfg.block_size = 1 + t % 2;
    cfg.seed = t;
    for (const auto& path : solve(a, cfg).trace)
      for (std::size_t i = 1; i < path.size(); ++i) ASSERT_GE(path[i], path[i - 1]);
  }
}

TEST(Solve, PooledRestartsAtLeastAsGoodAsOne) {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const auto a = ref::random_cp(ref::random_dims(rng, 3, 6, 2, 6), 5, rng);
    SolverConfig cfg;
    cfg.k = 2;
    cfg.seed = 100 + t;
    cfg.restarts = 1;
    const auto one = solve(a, cfg);
    cfg.restarts = 4;
    const auto many = solve(a, cfg);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_GE(many.values[j], one.values[j]);
  }
}

TEST(Solve, ConvergesToFixedPoint) {
  Rng rng(18);
  const auto a = ref::random_cp({4, 5, 3}, 3, rng);
  SolverConfig cfg;
  const auto r = solve(a, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.sweeps_used, cfg.restarts * cfg.max_sweeps);
}

TEST(BestK, DeduplicatesAndSorts) {
  const auto a = rank1_2x2();
  const auto r = best_k(a, {{0, 0}, {1, 1}, {0, 0}, {0, 1}}, 3, OrderingKey::Max);
  EXPECT_EQ(r.values, (std::vector<double>{8, 4, 3}));
  EXPECT_DOUBLE_EQ(r.objective, 15.0);
  EXPECT_THROW(best_k(a, {{0, 0}, {0, 0}}, 2, OrderingKey::Max), InfeasibleKError);
}
