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

#include <gtest/gtest.h>

#include "dphull/approx_volume.hpp"
#include "dphull/polytope.hpp"
#include "test_util.hpp"

namespace dphull {
namespace {

using testing::gp;
using testing::q;

Halfspace halfspace(std::initializer_list<long> coeffs, Sense sense) {
  IntegerVector c(static_cast<Eigen::Index>(coeffs.size()));
  Eigen::Index i = 0;
  for (long v : coeffs) c[i++] = v;
  return {Hyperplane(c), sense};
}

std::vector<Halfspace> standard_simplex(int d) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < d; ++i) {
    IntegerVector c = IntegerVector::Zero(d + 1);
    c[i + 1] = 1;
    hs.push_back({Hyperplane(c), Sense::kGreaterEq});
  }
  IntegerVector c = IntegerVector::Ones(d + 1);
  c[0] = -1;
  hs.push_back({Hyperplane(c), Sense::kLessEq});
  return hs;
}

// [0,1] x [0,1/100].
std::vector<Halfspace> thin_box() {
  return {halfspace({0, 1, 0}, Sense::kGreaterEq), halfspace({-1, 1, 0}, Sense::kLessEq),
          halfspace({0, 0, 1}, Sense::kGreaterEq), halfspace({-1, 0, 100}, Sense::kLessEq)};
}

GridDataset fuzz_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    GridDataset s = testing::random_dataset(2, 4, 8, rng);
    const TukeyRegionH region = prune_halfspaces(critical_halfspaces(s, 1));
    try {
      if (vertex_enumeration(region).full_dimensional()) return s;
    } catch (const EmptyRegion&) {
    }
  }
}

double eigen_ratio(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double stat = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    stat = std::max({stat, (i + 1) / n - xs[i], xs[i] - i / n});
  }
  return stat;
}

TEST(MembershipOracle, CenterOfVerticesIsInside) {
  const GridDataset s = fuzz_dataset(1);
  const MembershipOracle o = build_oracle(s, 1);
  const VPolytope poly = vertex_enumeration(prune_halfspaces(critical_halfspaces(s, 1)));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  for (const RationalPoint& v : poly.rational_vertices()) c += to_double(v);
  c /= static_cast<double>(poly.vertices.size());
  EXPECT_TRUE(o.query(c));
  EXPECT_EQ(o.queries(), 1u);
}

TEST(MembershipOracle, OutsideCubeIsRejected) {
  const MembershipOracle o = build_oracle(fuzz_dataset(2), 1);
  EXPECT_FALSE(o.query(Eigen::Vector2d(1.5, 0.5)));
  EXPECT_FALSE(o.query(Eigen::Vector2d(0.5, -0.01)));
  const MembershipOracle cube(cube_facets(3), 3);
  EXPECT_TRUE(cube.query(Eigen::Vector3d(0.2, 0.9, 0.5)));
  EXPECT_FALSE(cube.query(Eigen::Vector3d(0.2, 1.1, 0.5)));
}

TEST(MembershipOracle, AgreesWithExactMembership) {
  std::mt19937_64 rng(3);
  int disagreements = 0;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const GridDataset s = fuzz_dataset(seed);
    for (std::size_t level = 1; level <= 3; ++level) {
      const TukeyRegionH region = prune_halfspaces(critical_halfspaces(s, level));
      const MembershipOracle o(region.halfspaces, 2, level);
      for (int i = 0; i < 200; ++i) {
        // Points on a 1/1000 grid, checked exactly against the full region.
        const RationalPoint p = testing::rp({q(static_cast<long>(rng() % 1001), 1000),
                                             q(static_cast<long>(rng() % 1001), 1000)});
        const TukeyRegionH full = critical_halfspaces(s, level);
        disagreements += o.query(to_double(p)) != full.contains(p);
      }
    }
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(InnerBall, UnitCube) {
  const InnerBall b = inner_ball(cube_facets(3), 3);
  EXPECT_EQ(b.center, testing::rp({q(1, 2), q(1, 2), q(1, 2)}));
  EXPECT_EQ(b.radius_squared, q(1, 4));
  EXPECT_NEAR(b.radius, 0.5, 1e-12);
  EXPECT_LE(b.radius, 0.5);
  EXPECT_NEAR(b.outer_radius, std::sqrt(3.0), 1e-12);
}

TEST(InnerBall, Interval) {
  const std::vector<Halfspace> hs = {halfspace({-1, 4}, Sense::kGreaterEq),
                                     halfspace({-3, 4}, Sense::kLessEq)};
  const InnerBall b = inner_ball(hs, 1);
  EXPECT_EQ(b.center, testing::rp({q(1, 2)}));
  EXPECT_EQ(b.radius_squared, q(1, 16));
}

TEST(InnerBall, RejectsFlatRegion) {
  const GridDataset s(2, 4, {gp({0, 0}), gp({2, 2}), gp({4, 4})});
  EXPECT_THROW(inner_ball(s, 1), NotFullDimensional);
}

// Squared distance from the vertex average to every edge line of the hull
// of the vertices, minimized; the lower bound on the radius is checked too.
TEST(InnerBall, FuzzRadiusMatchesEdgeDistance) {
  for (std::uint64_t seed = 20; seed < 40; ++seed) {
    const GridDataset s = fuzz_dataset(seed);
    const VPolytope poly = vertex_enumeration(prune_halfspaces(critical_halfspaces(s, 1)));
    const std::vector<RationalPoint> v = poly.rational_vertices();
    RationalPoint c = RationalPoint::Zero(2);
    for (const RationalPoint& p : v) c += p;
    c /= Rational(static_cast<long>(v.size()));
    Rational best = -1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        const Rational nx = v[j][1] - v[i][1];
        const Rational ny = v[i][0] - v[j][0];
        bool pos = false, neg = false;
        for (const RationalPoint& p : v) {
          const Rational e = nx * (p[0] - v[i][0]) + ny * (p[1] - v[i][1]);
          pos |= e > 0;
          neg |= e < 0;
        }
        if (pos && neg) continue;
        const Rational e = nx * (c[0] - v[i][0]) + ny * (c[1] - v[i][1]);
        const Rational dist = e * e / (nx * nx + ny * ny);
        if (best < 0 || dist < best) best = dist;
      }
    }
    const InnerBall b = inner_ball(s, 1);
    EXPECT_EQ(b.radius_squared, best) << "seed " << seed;
    const double bound = 1.0 / (3.0 * std::pow(2.0 * std::sqrt(2.0) * 16.0, 7.0));
    EXPECT_GE(b.radius, bound);
  }
}

TEST(RoundBody, IsotropicBodyKeepsIdentityShape) {
  const MembershipOracle o(cube_facets(2), 2);
  const InnerBall b = inner_ball(cube_facets(2), 2);
  std::mt19937_64 rng(4);
  RoundingOptions opts;
  opts.samples = 20000;
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.01, rng, opts);
  const Eigen::MatrixXd gram = m.t.transpose() * m.t;
  EXPECT_LE(eigen_ratio(gram), 1.1 * 1.1);
}

TEST(RoundBody, ThinBoxBecomesNearlyIsotropic) {
  const std::vector<Halfspace> hs = thin_box();
  const MembershipOracle o(hs, 2);
  const InnerBall b = inner_ball(hs, 2);
  std::mt19937_64 rng(5);
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.01, rng);
  // Uniform covariance diag(1/12, 1e-4/12) maps to about the identity.
  const Eigen::Matrix2d box = Eigen::Vector2d(1.0 / 12, 1e-4 / 12).asDiagonal();
  const Eigen::MatrixXd exact = m.t * box * m.t.transpose();
  EXPECT_LE(eigen_ratio(exact), 4.0);
  const Eigen::MatrixXd sampled = rounded_covariance(o, m, 20000, rng);
  EXPECT_LE(eigen_ratio(sampled), 4.0);
}

TEST(RoundBody, MapInvertsExactly) {
  const std::vector<Halfspace> hs = thin_box();
  const MembershipOracle o(hs, 2);
  const InnerBall b = inner_ball(hs, 2);
  std::mt19937_64 rng(6);
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.01, rng);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector2d x(uniform_double(rng), uniform_double(rng));
    worst = std::max(worst, (m.from_rounded(m.to_rounded(x)) - x).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-9);
  EXPECT_NEAR(std::exp(m.log_abs_det), std::abs(m.t.determinant()), 1e-9 * std::abs(m.t.determinant()));
}

TEST(RoundBody, SingularCovarianceFails) {
  // [0,1] x {0}: every chord is one-dimensional.
  const std::vector<Halfspace> hs = {halfspace({0, 1, 0}, Sense::kGreaterEq),
                                     halfspace({-1, 1, 0}, Sense::kLessEq),
                                     halfspace({0, 0, 1}, Sense::kGreaterEq),
                                     halfspace({0, 0, 1}, Sense::kLessEq)};
  const MembershipOracle o(hs, 2);
  std::mt19937_64 rng(7);
  EXPECT_THROW(round_body(o, Eigen::Vector2d(0.5, 0.0), 0.25, 1.0, 0.1, rng), RoundingFailed);
}

double estimate_once(const std::vector<Halfspace>& hs, int d, double alpha, double beta,
                     std::uint64_t seed) {
  const MembershipOracle o(hs, d);
  const InnerBall b = inner_ball(hs, d);
  std::mt19937_64 rng(seed);
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, beta, rng);
  return estimate_volume(o, m, b, alpha, beta, rng).value;
}

TEST(EstimateVolume, UnitCube) {
  const double v = estimate_once(cube_facets(3), 3, 0.1, 0.1, 8);
  EXPECT_NEAR(v, 1.0, 0.1);
}

TEST(EstimateVolume, StandardSimplex) {
  const std::vector<Halfspace> hs = standard_simplex(3);
  const double exact = to_double(volume(vertex_enumeration(hs, 3)));
  EXPECT_DOUBLE_EQ(exact, 1.0 / 6);
  const double v = estimate_once(hs, 3, 0.1, 0.1, 9);
  EXPECT_NEAR(v / exact, 1.0, 0.1);
}

TEST(EstimateVolume, FuzzRegionWithinAlpha) {
  int within = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GridDataset s = fuzz_dataset(100 + seed);
    const TukeyRegionH region = prune_halfspaces(critical_halfspaces(s, 1));
    const double exact = to_double(volume(region));
    const double v = estimate_once(region.halfspaces, 2, 0.1, 0.1, seed);
    within += std::abs(v / exact - 1.0) <= 0.1;
  }
  EXPECT_GE(within, 45);
}

TEST(EstimateVolume, ReportsStatistics) {
  const MembershipOracle o(cube_facets(2), 2);
  const InnerBall b = inner_ball(cube_facets(2), 2);
  std::mt19937_64 rng(10);
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.1, rng);
  const VolumeEstimate e = estimate_volume(o, m, b, 0.2, 0.1, rng);
  EXPECT_GT(e.value, 0);
  EXPECT_EQ(e.ratios.size(), e.phases);
  EXPECT_GT(e.queries, 0u);
  EXPECT_DOUBLE_EQ(e.alpha, 0.2);
  EXPECT_DOUBLE_EQ(e.beta, 0.1);
}

TEST(ApproxSample, CubeMarginalsPassKs) {
  const MembershipOracle o(cube_facets(2), 2);
  const InnerBall b = inner_ball(cube_facets(2), 2);
  std::mt19937_64 rng(11);
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.01, rng);
  const std::size_t n = 10000;
  std::vector<double> xs, ys;
  int violations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd p = approx_uniform_sample(o, m, 0.01, rng);
    violations += !o.query(p);
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  EXPECT_EQ(violations, 0);
  // Asymptotic 0.01 critical value of the one-sample KS statistic.
  const double critical = 1.6276 / std::sqrt(static_cast<double>(n));
  EXPECT_LT(ks_uniform(xs), critical);
  EXPECT_LT(ks_uniform(ys), critical);
}

TEST(ApproxSample, SamplesStayInFuzzRegion) {
  const GridDataset s = fuzz_dataset(12);
  const TukeyRegionH region = prune_halfspaces(critical_halfspaces(s, 1));
  const MembershipOracle o(region.halfspaces, 2, 1);
  const InnerBall b = inner_ball(region.halfspaces, 2);
  std::mt19937_64 rng(12);
  const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.01, rng);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) violations += !o.query(approx_uniform_sample(o, m, 0.5, rng));
  EXPECT_EQ(violations, 0);
}

TEST(ApproxSample, FixedSeedReproduces) {
  const MembershipOracle o(standard_simplex(3), 3);
  const InnerBall b = inner_ball(standard_simplex(3), 3);
  auto draw = [&] {
    std::mt19937_64 rng(13);
    const RoundingMap m = round_body(o, to_double(b.center), b.radius, b.outer_radius, 0.1, rng);
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < 20; ++i) out.push_back(approx_uniform_sample(o, m, 0.1, rng));
    return out;
  };
  EXPECT_EQ(draw(), draw());
}

TEST(ApproxSample, StepBudgetGrowsWithLogInverseEta) {
  const SampleOptions opts;
  EXPECT_LT(sampler_steps(3, 0.1, opts), sampler_steps(3, 0.001, opts));
  EXPECT_EQ(sampler_steps(3, 0.5, SampleOptions{.fixed_steps = 7}), 7u);
}

// Perturbing every V by a factor in [1 - a, 1 + a] keeps each lambda within
// the ratio bracket.
TEST(LambdaPrime, BracketsExactWeights) {
  std::mt19937_64 rng(14);
  const double alpha = 0.1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 data_rng(200 + seed);
    const GridDataset s = testing::random_dataset(2, 8, 12, data_rng);
    const RegionLadder ladder = build_ladder(s);
    const LambdaWeights exact = lambda_weights(ladder.volumes, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Rational> perturbed = ladder.volumes;
      for (std::size_t l = 1; l < perturbed.size(); ++l) {
        const long u = static_cast<long>(rng() % 2001) - 1000;
        perturbed[l] *= Rational(1) + Rational(u, 1000) * from_double(alpha);
      }
      const LambdaWeights approx = lambda_weights(perturbed, 1.0);
      for (std::size_t l = 0; l < exact.lambda.size(); ++l) {
        const double e = exact.lambda[l].convert_to<double>();
        const double a = approx.lambda[l].convert_to<double>();
        if (e == 0) {
          EXPECT_EQ(a, 0);
          continue;
        }
        EXPECT_GE(a, (1 - alpha) / (1 + alpha) * e * (1 - 1e-12));
        EXPECT_LE(a, (1 + alpha) / (1 - alpha) * e * (1 + 1e-12));
      }
    }
  }
}

TEST(BaseCaseApprox, NoDepthGivesCubePoint) {
  const GridDataset s(2, 4, {gp({1, 1}), gp({1, 1})});
  std::mt19937_64 rng(15);
  const ApproxBaseResult r = run_base_case_approx(s, 1.0, 0.01, rng);
  EXPECT_EQ(r.level, 0u);
  ASSERT_EQ(r.lambda.size(), 1u);
  EXPECT_EQ(r.point.size(), 2);
  for (int i = 0; i < 2; ++i) {
    EXPECT_GE(r.point[i], 0);
    EXPECT_LE(r.point[i], 1);
  }
}

TEST(BaseCaseApprox, EchoesConstants) {
  const GridDataset s = testing::square_corners();
  std::mt19937_64 rng(16);
  const ApproxBaseResult r = run_base_case_approx(s, 1.0, 0.01, rng);
  EXPECT_DOUBLE_EQ(r.alpha, 0.25);
  EXPECT_DOUBLE_EQ(r.beta, 0.25 * 0.01 / 4);
  EXPECT_DOUBLE_EQ(r.beta_rounding + r.beta_volume, r.beta);
  EXPECT_DOUBLE_EQ(r.eta, 0.01);
  ASSERT_GE(r.levels.size(), 1u);
  EXPECT_NEAR(r.levels[0].volume, 1.0, 0.25);
}

TEST(BaseCaseApprox, LevelDistributionMatchesExact) {
  std::mt19937_64 data_rng(17);
  GridDataset s;
  RegionLadder ladder;
  do {
    s = testing::random_dataset(2, 4, 6, data_rng);
    ladder = build_ladder(s);
  } while (ladder.volumes.size() < 3 || ladder.volumes[2] == 0);
  const LambdaWeights exact = lambda_weights(ladder.volumes, 1.0);
  const HyperplaneTable table = build_hyperplane_table(s);
  std::vector<double> freq(exact.lambda.size(), 0.0);
  std::mt19937_64 rng(18);
  const int runs = 1000;
  for (int i = 0; i < runs; ++i) {
    const ApproxBaseResult r = run_base_case_approx(s, table, 1.0, 0.01, rng);
    if (r.level >= freq.size()) freq.resize(r.level + 1, 0.0);
    freq[r.level] += 1.0 / runs;
  }
  double tv = 0;
  for (std::size_t l = 0; l < freq.size(); ++l) {
    const double e = l < exact.lambda.size() ? exact.lambda[l].convert_to<double>() : 0.0;
    tv += 0.5 * std::abs(freq[l] - e);
  }
  EXPECT_LE(tv, 0.05);
}

}  // namespace
}  // namespace dphull
