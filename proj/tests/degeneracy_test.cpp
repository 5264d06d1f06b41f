//
// Copyright 2026 The dp-hull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "dphull/combinatorics.hpp"
#include "dphull/degeneracy.hpp"
#include "dphull/oracle.hpp"
#include "lemma_util.hpp"
#include "test_util.hpp"

namespace dphull {
namespace {

using testing::gp;
using testing::q;
using testing::degenerate_instance;
using testing::vertex_candidates;

// Integer-only reference for M_i in d = 2 and d = 3.
using P3 = std::array<std::int64_t, 3>;

P3 lift3(const GridPoint& p) {
  P3 out{0, 0, 0};
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p[i];
  return out;
}

P3 sub(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
P3 cross(const P3& a, const P3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
std::int64_t dot(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
bool is_zero(const P3& a) { return a[0] == 0 && a[1] == 0 && a[2] == 0; }

std::vector<std::size_t> reference_maxima(const GridDataset& s) {
  std::vector<P3> pts;
  for (const GridPoint& p : s.points()) pts.push_back(lift3(p));
  const std::size_t n = pts.size();
  std::vector<std::size_t> m(static_cast<std::size_t>(s.dim()), 0);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += pts[i] == pts[a];
    m[0] = std::max(m[0], c);
  }
  if (s.dim() >= 2) {
    m[1] = m[0];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const P3 dir = sub(pts[b], pts[a]);
        if (is_zero(dir)) continue;
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i) c += is_zero(cross(dir, sub(pts[i], pts[a])));
        m[1] = std::max(m[1], c);
      }
    }
  }
  if (s.dim() == 3) {
    m[2] = m[1];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t e = 0; e < n; ++e) {
          const P3 normal = cross(sub(pts[b], pts[a]), sub(pts[e], pts[a]));
          if (is_zero(normal)) continue;
          std::size_t c = 0;
          for (std::size_t i = 0; i < n; ++i) c += dot(normal, sub(pts[i], pts[a])) == 0;
          m[2] = std::max(m[2], c);
        }
      }
    }
  }
  return m;
}

TEST(SubspaceCensus, GenericPositionPlane) {
  const GridDataset s(2, 8, {gp({0, 0}), gp({8, 1}), gp({3, 8}), gp({5, 3})});
  const SubspaceCensus c = subspace_census(s);
  ASSERT_EQ(c.maxima.size(), 2u);
  EXPECT_EQ(c.maxima[0], 1u);
  EXPECT_EQ(c.maxima[1], 2u);
  EXPECT_EQ(c.by_dim[0].size(), 4u);
  EXPECT_EQ(c.by_dim[1].size(), 6u);
}

TEST(SubspaceCensus, FourCollinearAndOneOff) {
  const GridDataset s(2, 8, {gp({0, 0}), gp({2, 2}), gp({4, 4}), gp({7, 7}), gp({1, 6})});
  const SubspaceCensus c = subspace_census(s);
  EXPECT_EQ(c.maxima[1], 4u);
}

TEST(SubspaceCensus, MultiplicityCounts) {
  const GridDataset s(2, 8, {gp({3, 3}), gp({3, 3}), gp({3, 3}), gp({1, 0}), gp({0, 5})});
  const SubspaceCensus c = subspace_census(s);
  EXPECT_EQ(c.maxima[0], 3u);
  EXPECT_EQ(c.maxima[1], 4u);
}

TEST(SubspaceCensus, MatchesIntegerReference) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 2 + trial % 2;
    const GridDataset s = testing::random_dataset(d, 3, 3 + rng() % 6, rng);
    const SubspaceCensus c = subspace_census(s);
    EXPECT_EQ(c.maxima, reference_maxima(s)) << "trial " << trial;
    for (std::size_t i = 1; i < c.maxima.size(); ++i) EXPECT_LE(c.maxima[i - 1], c.maxima[i]);
  }
}

TEST(SubspaceCensus, WitnessesSpanTheirSubspace) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 2;
    const GridDataset s = testing::random_dataset(d, 4, 7, rng);
    const SubspaceCensus c = subspace_census(s);
    for (std::size_t i = 0; i < c.by_dim.size(); ++i) {
      for (const AffineSubspace& f : c.by_dim[i]) {
        ASSERT_EQ(f.witness().size(), i + 1);
        std::vector<RationalPoint> pts;
        for (std::size_t w : f.witness()) pts.push_back(s.rational_point(w));
        EXPECT_TRUE(affine_span(pts) == f);
        std::size_t count = 0;
        for (const GridPoint& p : s.points()) count += f.contains(p, s.denom());
        EXPECT_EQ(count, f.count());
      }
      EXPECT_TRUE(std::is_sorted(c.by_dim[i].begin(), c.by_dim[i].end()));
    }
  }
}

TEST(SubspaceCensus, OneDimensionalData) {
  const GridDataset s(1, 4, {gp({1}), gp({1}), gp({3})});
  const SubspaceCensus c = subspace_census(s);
  ASSERT_EQ(c.maxima.size(), 1u);
  EXPECT_EQ(c.maxima[0], 2u);
}

TEST(Laplace, InverseCdfPoints) {
  EXPECT_EQ(laplace_from_uniform(0.0, 3.0), 0.0);
  const double u = 0.5 - std::exp(-1.0) / 2;
  EXPECT_NEAR(laplace_from_uniform(u, 3.0), 3.0, 1e-12);
  EXPECT_NEAR(laplace_from_uniform(-u, 3.0), -3.0, 1e-12);
}

TEST(Laplace, EmpiricalMeanAndScale) {
  std::mt19937_64 rng(3);
  const double b = 2.0;
  const int n = 100000;
  double sum = 0, abs_sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = laplace_noise(b, rng);
    sum += x;
    abs_sum += std::abs(x);
  }
  EXPECT_LE(std::abs(sum / n), 3 * b / std::sqrt(static_cast<double>(n)));
  // E|X| = b with standard deviation b / sqrt(n).
  EXPECT_NEAR(abs_sum / n, b, 4 * b / std::sqrt(static_cast<double>(n)));
}

TEST(ChooseDimension, BaseCaseWhenAllLow) {
  const DimensionChoice c = choose_dimension({-1e9, -1e9}, 100, 12.5, 2, 0.1, 0.1);
  EXPECT_TRUE(c.base_case);
  EXPECT_EQ(c.j, -1);
  ASSERT_EQ(c.thresholds.size(), 2u);
}

TEST(ChooseDimension, RecurseOnFirstViolation) {
  const DimensionChoice c = choose_dimension({1e9, 1e9}, 100, 12.5, 2, 0.1, 0.1);
  EXPECT_FALSE(c.base_case);
  EXPECT_EQ(c.j, 0);
}

TEST(ChooseDimension, TinyExcessAtOneOnly) {
  const std::size_t n = 100;
  const double k = 12.5, eps = 0.1, beta = 0.1;
  const double slack = std::log(2 / beta) / eps;
  const double t0 = n - 3 * k - slack;
  const double t1 = n - 2 * k - slack;
  const DimensionChoice c = choose_dimension({t0, t1 + 1e-9}, n, k, 2, eps, beta);
  EXPECT_NEAR(c.thresholds[0], t0, 1e-12);
  EXPECT_NEAR(c.thresholds[1], t1, 1e-12);
  EXPECT_FALSE(c.base_case);
  EXPECT_EQ(c.j, 1);
}

TEST(SubspaceScores, PointMultiplicity) {
  std::vector<GridPoint> pts(5, gp({2, 2}));
  pts.push_back(gp({0, 1}));
  const SubspaceCensus c = subspace_census(GridDataset(2, 4, pts));
  std::size_t best = 0;
  for (const ScoredSubspace& s : subspace_scores(c, 0)) best = std::max(best, s.score);
  EXPECT_EQ(best, 5u);
}

TEST(SubspaceScores, LineNoBetterThanPointScoresZero) {
  const GridDataset s(2, 4, {gp({2, 2}), gp({2, 2}), gp({2, 2}), gp({0, 1}), gp({4, 0})});
  const SubspaceCensus c = subspace_census(s);
  ASSERT_EQ(c.maxima[0], 3u);
  for (const ScoredSubspace& sc : subspace_scores(c, 1)) {
    EXPECT_EQ(sc.score, sc.subspace->count() > 3 ? sc.subspace->count() - 3 : 0);
  }
  const AffineSubspace line = affine_span({testing::rp({q(0), q(1, 4)}), testing::rp({q(1), q(0)})});
  EXPECT_EQ(subspace_score(c, line), 0u);
}

TEST(SubspaceScores, CollinearHeavyTopLine) {
  std::vector<GridPoint> pts;
  for (int i = 0; i <= 8; ++i) pts.push_back(gp({i, i}));
  pts.push_back(gp({0, 8}));
  pts.push_back(gp({0, 8}));
  const GridDataset s(2, 8, pts);
  const SubspaceCensus c = subspace_census(s);
  const AffineSubspace diag = affine_span({testing::rp({q(0), q(0)}), testing::rp({q(1), q(1)})});
  EXPECT_EQ(c.maxima[0], 2u);
  EXPECT_EQ(subspace_score(c, diag), 9u - 2u);
}

TEST(SelectSubspace, DominantWeightWins) {
  std::vector<GridPoint> pts(400, gp({1, 1}));
  const SubspaceCensus c = subspace_census(GridDataset(2, 2, pts));
  std::mt19937_64 rng(4);
  const Selection sel = select_subspace(subspace_scores(c, 0), 0, 2, 2, 1.0, rng);
  ASSERT_TRUE(sel.subspace.has_value());
  EXPECT_EQ(sel.score, 400u);
  EXPECT_EQ(sel.subspace->base(), testing::rp({q(1, 2), q(1, 2)}));
  EXPECT_LT(sel.failure_probability, 1e-40);
}

TEST(SelectSubspace, AllZeroScoresFail) {
  // One location spans no line; explicit zero scores behave the same.
  const GridDataset s(2, 4, {gp({1, 1}), gp({1, 1}), gp({1, 1})});
  const SubspaceCensus c = subspace_census(s);
  ASSERT_TRUE(subspace_scores(c, 1).empty());
  std::mt19937_64 rng(5);
  const AffineSubspace line = affine_span({testing::rp({q(0), q(0)}), testing::rp({q(1), q(0)})});
  for (const std::vector<ScoredSubspace>& scores :
       {subspace_scores(c, 1), std::vector<ScoredSubspace>{{&line, 0}}}) {
    const Selection sel = select_subspace(scores, 1, 4, 2, 1.0, rng);
    EXPECT_FALSE(sel.subspace.has_value());
    EXPECT_EQ(sel.failure_probability, 1);
  }
}

TEST(SelectSubspace, FailureProbabilityFormula) {
  AffineSubspace line = affine_span({testing::rp({q(0), q(0)}), testing::rp({q(1), q(1)})});
  const std::vector<ScoredSubspace> scores = {{&line, 8}};
  const double n0 = std::pow(4.0, 4) - 1;
  const double expected = n0 / (n0 + std::exp(2.0));
  std::mt19937_64 rng(6);
  const int draws = 10000;
  int failures = 0;
  for (int i = 0; i < draws; ++i) {
    const Selection sel = select_subspace(scores, 1, 4, 2, 1.0, rng);
    EXPECT_NEAR(sel.failure_probability.convert_to<double>(), expected, 1e-15);
    failures += !sel.subspace.has_value();
  }
  const double sigma = std::sqrt(expected * (1 - expected) / draws);
  EXPECT_NEAR(static_cast<double>(failures) / draws, expected, 3 * sigma);
}

TEST(Sensitivity, NoisyCountsAndScores) {
  std::mt19937_64 rng(7);
  int count_violations = 0, score_violations = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const int d = 2 + pair % 2;
    const std::int64_t x = 2 + static_cast<std::int64_t>(rng() % 3);
    const GridDataset s = testing::random_dataset(d, x, 3 + rng() % 6, rng);
    GridPoint p(d);
    for (int i = 0; i < d; ++i) p[i] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(x + 1));
    const GridDataset t = s.with_replaced(rng() % s.size(), p);
    const SubspaceCensus cs = subspace_census(s);
    const SubspaceCensus ct = subspace_census(t);
    for (int i = 0; i < d; ++i) {
      const auto a = static_cast<long>(cs.maxima[static_cast<std::size_t>(i)]);
      const auto b = static_cast<long>(ct.maxima[static_cast<std::size_t>(i)]);
      count_violations += std::abs(a - b) > 1;
    }
    for (const SubspaceCensus* c : {&cs, &ct}) {
      for (const auto& list : c->by_dim) {
        for (const AffineSubspace& f : list) {
          const auto a = static_cast<long>(subspace_score(cs, f));
          const auto b = static_cast<long>(subspace_score(ct, f));
          score_violations += std::abs(a - b) > 2;
        }
      }
    }
  }
  EXPECT_EQ(count_violations, 0);
  EXPECT_EQ(score_violations, 0);
}

// A confining family needs up to 2(d - j) halfspaces (Steinitz), so the
// guaranteed count is n - 2(d - j)(k - 1) for j < d; the d - j + 1 version
// is checked separately in the acceptance suite.
TEST(LemmaFour, FlatRegionsHoldMostPoints) {
  std::mt19937_64 rng(8);
  int checked = 0, flat = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int d = inst < 70 ? 2 : 3;
    const GridDataset s = degenerate_instance(d, d == 2 ? 0 : inst % 2, rng);
    const std::vector<oracle::Point> opts = testing::to_oracle(s);
    const std::vector<RationalPoint> cands = vertex_candidates(s);
    std::vector<std::size_t> depth;
    for (const RationalPoint& c : cands) depth.push_back(oracle::depth_bruteforce(testing::to_oracle(c), opts));
    const long n = static_cast<long>(s.size());
    for (std::size_t k = 1; k <= s.size(); ++k) {
      std::vector<RationalPoint> region;
      for (std::size_t i = 0; i < cands.size(); ++i) {
        if (depth[i] >= k) region.push_back(cands[i]);
      }
      if (region.empty()) break;
      const AffineSubspace f = affine_span(region);
      const long j = f.dim();
      long on = 0;
      for (const GridPoint& p : s.points()) on += f.contains(p, s.denom());
      const long halfspaces = j < d ? 2 * (d - j) : 1;
      EXPECT_GE(on, n - halfspaces * (static_cast<long>(k) - 1))
          << "instance " << inst << " k " << k << " j " << j;
      ++checked;
      flat += j < d;
    }
  }
  EXPECT_GT(checked, 100);
  EXPECT_GT(flat, 50);
}

// Five points in R^3 whose depth-2 region is one point off the data: five
// halfspaces, each missing one point, are needed to pin it.
TEST(LemmaFour, PinnedPointNeedsMoreThanDPlusOneHalfspaces) {
  const GridDataset s(3, 6, {gp({1, 0, 5}), gp({4, 1, 5}), gp({1, 1, 5}), gp({6, 5, 1}), gp({1, 6, 6})});
  const RationalPoint p = testing::rp({q(17, 87), q(1, 6), q(5, 6)});
  const std::vector<oracle::Point> pts = testing::to_oracle(s);
  EXPECT_EQ(oracle::depth_bruteforce(testing::to_oracle(p), pts), 2u);
  std::size_t region = 0;
  for (const RationalPoint& c : vertex_candidates(s)) {
    if (oracle::depth_bruteforce(testing::to_oracle(c), pts) >= 2) {
      EXPECT_EQ(c, p);
      ++region;
    }
  }
  EXPECT_EQ(region, 1u);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NE(s.rational_point(i), p);
}

TEST(BudgetSplit, StandardSplitComposes) {
  const BudgetSplit b = BudgetSplit::standard(1.0, 0.0, 0.1, 2);
  EXPECT_DOUBLE_EQ(b.epsilon_noise, 1.0 / 16);
  EXPECT_DOUBLE_EQ(b.epsilon_select, 1.0 / 8);
  EXPECT_DOUBLE_EQ(b.epsilon_base, 0.5);
  EXPECT_TRUE(b.composes(2));
  BudgetSplit over = b;
  over.epsilon_base = 0.9;
  EXPECT_FALSE(over.composes(2));
}

MechanismConfig config(int d, double beta = 0.5) {
  MechanismConfig c;
  c.budget = BudgetSplit::standard(1.0, 0.0, beta, d);
  return c;
}

TEST(DpConvexHullPoint, GenericDataStaysAtTopLevel) {
  std::mt19937_64 data_rng(9);
  const GridDataset s = testing::random_dataset(2, 16, 128, data_rng);
  std::mt19937_64 rng(10);
  const RunResult r = dp_convex_hull_point(s, config(2, 0.9), rng);
  ASSERT_TRUE(r.point.has_value());
  ASSERT_EQ(r.transcript.levels.size(), 1u);
  EXPECT_TRUE(r.transcript.levels[0].base_case);
  EXPECT_EQ(r.transcript.final_dim, 2);
  ASSERT_TRUE(r.transcript.base.has_value());
  EXPECT_EQ(r.transcript.base->mode, Mode::kExact);
}

TEST(DpConvexHullPoint, CollinearDataRecursesToTheLine) {
  std::vector<GridPoint> pts;
  std::mt19937_64 data_rng(11);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t t = static_cast<std::int64_t>(1 + data_rng() % 3);
    pts.push_back(gp({t, 4 - t}));
  }
  const GridDataset s(2, 4, pts);
  AnalysisCache cache;
  int on_hull = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const RunResult r = dp_convex_hull_point(s, config(2), rng, &cache);
    ASSERT_TRUE(r.point.has_value()) << r.transcript.failure_reason;
    ASSERT_GE(r.transcript.levels.size(), 2u);
    ASSERT_TRUE(r.transcript.levels[0].selection.has_value());
    EXPECT_EQ(r.transcript.levels[0].selection->j, 1);
    EXPECT_EQ(r.transcript.levels[0].selection->count, 1000u);
    EXPECT_EQ(r.transcript.final_dim, 1);
    const RationalPoint& p = *r.point;
    EXPECT_EQ(p[0] + p[1], q(1));
    on_hull += p[0] >= q(1, 4) && p[0] <= q(3, 4);
  }
  EXPECT_GE(on_hull, 9);
  EXPECT_GE(cache.size(), 2u);
}

TEST(DpConvexHullPoint, CopiesOfOnePointReturnIt) {
  const GridDataset s(2, 4, std::vector<GridPoint>(1000, gp({1, 3})));
  std::mt19937_64 rng(12);
  const RunResult r = dp_convex_hull_point(s, config(2), rng);
  ASSERT_TRUE(r.point.has_value());
  EXPECT_EQ(*r.point, testing::rp({q(1, 4), q(3, 4)}));
  EXPECT_EQ(r.transcript.final_dim, 0);
  EXPECT_FALSE(r.transcript.base.has_value());
}

TEST(DpConvexHullPoint, SelectionFailureIsReported) {
  // Forty collinear points on a fine grid: recursion fires, selection has
  // weight e^{(40 - M_0)/32} against 16^4 dummies.
  std::vector<GridPoint> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(gp({i % 17, i % 17}));
  const GridDataset s(2, 16, pts);
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const RunResult r = dp_convex_hull_point(s, config(2, 1.5), rng);
    if (r.transcript.status == RunStatus::kFailure) {
      ++failures;
      EXPECT_FALSE(r.point.has_value());
      EXPECT_FALSE(r.transcript.failure_reason.empty());
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(DpConvexHullPoint, FixedSeedIsDeterministic) {
  std::mt19937_64 data_rng(13);
  const GridDataset s = testing::random_dataset(2, 8, 30, data_rng);
  auto run = [&] {
    std::mt19937_64 rng(14);
    return dp_convex_hull_point(s, config(2), rng);
  };
  const RunResult a = run(), b = run();
  EXPECT_EQ(a.point, b.point);
  ASSERT_EQ(a.transcript.levels.size(), b.transcript.levels.size());
  for (std::size_t i = 0; i < a.transcript.levels.size(); ++i) {
    EXPECT_EQ(a.transcript.levels[i].noisy_maxima, b.transcript.levels[i].noisy_maxima);
  }
}

TEST(DpConvexHullPoint, RejectsTooFewPoints) {
  const GridDataset s(2, 4, {gp({1, 1})});
  MechanismConfig c = config(2);
  c.min_n = 10;
  std::mt19937_64 rng(15);
  EXPECT_THROW(dp_convex_hull_point(s, c, rng), InfeasibleParams);
}

TEST(DpConvexHullPoint, ApproximateModeRuns) {
  std::mt19937_64 data_rng(16);
  const GridDataset s = testing::random_dataset(2, 8, 30, data_rng);
  MechanismConfig c;
  c.budget = BudgetSplit::standard(1.0, 0.01, 1.9, 2, Mode::kApprox);
  std::mt19937_64 rng(17);
  const RunResult r = dp_convex_hull_point(s, c, rng);
  ASSERT_TRUE(r.transcript.base.has_value());
  ASSERT_TRUE(r.transcript.base->approx.has_value());
  ASSERT_TRUE(r.point.has_value());
  EXPECT_TRUE(r.transcript.levels[0].base_case);
  EXPECT_DOUBLE_EQ(r.transcript.base->approx->alpha, 0.25 * 0.5);
  EXPECT_FALSE(r.transcript.base->fallback_used);
}

}  // namespace
}  // namespace dphull
