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


#include <random>

#include <gtest/gtest.h>

#include "dphull/oracle.hpp"
#include "test_util.hpp"

namespace dphull {
namespace {

using testing::gp;
using testing::q;

oracle::Point pt(std::initializer_list<Rational> v) { return oracle::Point(v); }

TEST(DepthBruteforce, FarOutsideIsZero) {
  std::vector<oracle::Point> s = {pt({q(0), q(0)}), pt({q(1), q(0)}), pt({q(0), q(1)})};
  EXPECT_EQ(oracle::depth_bruteforce(pt({q(5), q(5)}), s), 0u);
}

TEST(DepthBruteforce, OneDimensionCountsRays) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<oracle::Point> s;
    const int n = 1 + static_cast<int>(rng() % 9);
    for (int i = 0; i < n; ++i) s.push_back(pt({q(static_cast<long>(rng() % 9), 8)}));
    const Rational x = q(static_cast<long>(rng() % 17), 16);
    std::size_t le = 0, ge = 0;
    for (const auto& p : s) {
      le += p[0] <= x;
      ge += p[0] >= x;
    }
    EXPECT_EQ(oracle::depth_bruteforce(pt({x}), s), std::min(le, ge));
  }
}

TEST(DepthBruteforce, SquareCenter) {
  std::vector<oracle::Point> s = {pt({q(0), q(0)}), pt({q(0), q(1)}), pt({q(1), q(0)}),
                                  pt({q(1), q(1)})};
  EXPECT_EQ(oracle::depth_bruteforce(pt({q(1, 2), q(1, 2)}), s), 2u);
  EXPECT_EQ(oracle::depth_bruteforce(pt({q(0), q(0)}), s), 1u);
  // A slightly tilted line through the edge midpoint isolates one corner.
  EXPECT_EQ(oracle::depth_bruteforce(pt({q(1, 2), q(0)}), s), 1u);
}

TEST(DepthBruteforce, DuplicatesCountWithMultiplicity) {
  std::vector<oracle::Point> s(5, pt({q(1, 3), q(2, 3)}));
  EXPECT_EQ(oracle::depth_bruteforce(pt({q(1, 3), q(2, 3)}), s), 5u);
}

TEST(VolumeMonteCarlo, UnitCube) {
  std::mt19937_64 rng(1);
  auto est = oracle::volume_montecarlo([](const std::vector<double>&) { return true; },
                                       {0, 0, 0}, {1, 1, 1}, 10000, rng);
  EXPECT_DOUBLE_EQ(est.estimate, 1.0);
  EXPECT_LE(est.lower, 1.0);
  EXPECT_DOUBLE_EQ(est.upper, 1.0);
}

TEST(VolumeMonteCarlo, HalfCube) {
  std::mt19937_64 rng(2);
  auto est = oracle::volume_montecarlo(
      [](const std::vector<double>& x) { return x[0] <= 0.5; }, {0, 0}, {1, 1}, 1000000, rng);
  EXPECT_LE(est.lower, 0.5);
  EXPECT_GE(est.upper, 0.5);
  EXPECT_NEAR(est.estimate, 0.5, 0.005);
}

TEST(DepthField, SquareCornersCenter) {
  std::vector<std::vector<std::int64_t>> s = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto field = oracle::depth_field(s, 1, 2, 8);
  EXPECT_EQ(field.size(), 81u);
  EXPECT_EQ(field.at({4, 4}), 2u);
  EXPECT_EQ(field.at({0, 0}), 1u);
}

TEST(DepthField, CollinearIsZeroOffTheLine) {
  std::vector<std::vector<std::int64_t>> s = {{0, 0}, {1, 1}, {2, 2}, {4, 4}};
  auto field = oracle::depth_field(s, 4, 2, 2);
  for (const auto& [cell, depth] : field) {
    if (cell[0] != cell[1]) EXPECT_EQ(depth, 0u);
  }
  EXPECT_EQ(field.at({4, 4}), 2u);
}

TEST(DepthField, NestedLevels) {
  std::mt19937_64 rng(3);
  auto s = testing::random_dataset(2, 4, 7, rng);
  auto field = oracle::depth_field(testing::raw(s), 4, 2, 2);
  // Depth is a function, so {depth >= k+1} is contained in {depth >= k};
  // check the superlevel sets shrink and the top one is nonempty.
  std::size_t top = 0;
  for (const auto& [cell, depth] : field) top = std::max(top, depth);
  EXPECT_GE(top, 1u);
  std::size_t prev = field.size();
  for (std::size_t k = 1; k <= top; ++k) {
    std::size_t count = 0;
    for (const auto& [cell, depth] : field) count += depth >= k;
    EXPECT_LE(count, prev);
    prev = count;
  }
}

}  // namespace
}  // namespace dphull
