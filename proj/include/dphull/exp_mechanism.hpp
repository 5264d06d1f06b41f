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


// Exponential mechanism over depth regions, sampled in two stages: a level l
// with probability lambda_l, then a uniform point of D_{>=l}.

#ifndef DPHULL_EXP_MECHANISM_HPP_
#define DPHULL_EXP_MECHANISM_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "dphull/geometry.hpp"
#include "dphull/polytope.hpp"
#include "dphull/tukey.hpp"

namespace dphull {

struct RegionLadder {
  int dim = 0;
  std::size_t n = 0;
  std::size_t td_max = 0;
  // volumes[l] = Vol(D_{>=l}) for l = 0..td_max; volumes[0] = 1.
  std::vector<Rational> volumes;
  // Pruned H-representation per level (empty for levels above the last
  // full-dimensional one when the data do not span the space).
  std::vector<TukeyRegionH> regions;
  // Triangulation per level; null when the volume is zero.
  std::vector<std::shared_ptr<const Triangulation>> triangulations;
  std::shared_ptr<const HyperplaneTable> table;
};

// Levels 0..k_max (default: td_max).
RegionLadder build_ladder(const GridDataset& s, std::optional<std::size_t> k_max = std::nullopt);
RegionLadder build_ladder(const GridDataset& s, std::shared_ptr<const HyperplaneTable> table,
                          std::optional<std::size_t> k_max = std::nullopt);

struct LambdaWeights {
  double epsilon = 0.0;
  HighFloat c;                    // normalizer C
  std::vector<HighFloat> lambda;  // sums to 1
};

LambdaWeights lambda_weights(const std::vector<Rational>& volumes, double epsilon);

// sum_{l<=m} lambda_l / V_l; equals C e^{eps m / 2} whenever V_m > 0.
HighFloat lambda_partial_sum(const LambdaWeights& w, const std::vector<Rational>& volumes,
                             std::size_t m);

// mu_k proportional to e^{eps k / 2} (V_k - V_{k+1}).
std::vector<HighFloat> mu_weights(const std::vector<Rational>& volumes, double epsilon);

// Index drawn with probability proportional to weights (which sum to 1).
std::size_t sample_index(const std::vector<HighFloat>& weights, std::mt19937_64& rng);

// Depth class of a point, i.e. the largest l with the point in D_{>=l}.
std::size_t depth_class(const RegionLadder& ladder, const RationalPoint& p);

struct BaseCaseResult {
  RationalPoint point;
  std::size_t level = 0;
  std::vector<double> lambda;
};

// Uniform point of the cube when the data determine no levels.
RationalPoint sample_cube(int dim, std::mt19937_64& rng);

BaseCaseResult run_base_case_exact(const RegionLadder& ladder, double epsilon,
                                   std::mt19937_64& rng);
// Same draw with the weights precomputed (lambda_weights(ladder.volumes, eps)).
BaseCaseResult run_base_case_exact(const RegionLadder& ladder, const LambdaWeights& weights,
                                   std::mt19937_64& rng);
BaseCaseResult run_base_case_exact(const GridDataset& s, double epsilon, std::mt19937_64& rng);

}  // namespace dphull

#endif  // DPHULL_EXP_MECHANISM_HPP_
