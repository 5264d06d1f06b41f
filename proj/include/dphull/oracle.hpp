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


// Brute-force references. Nothing in here calls the geometry, tukey or
// polytope code; only the scalar types are shared.

#ifndef DPHULL_ORACLE_HPP_
#define DPHULL_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "dphull/numeric.hpp"

namespace dphull::oracle {

using Point = std::vector<Rational>;

// Tukey depth of q in the multiset pts, via td(q) = min |R| such that q is
// not in conv(pts \ R). Containment is decided through every affinely
// independent subset of at most d+1 points.
std::size_t depth_bruteforce(const Point& q, const std::vector<Point>& pts);

// Convenience overload on grid numerators over a common denominator.
std::size_t depth_bruteforce_grid(const std::vector<std::int64_t>& q_num, std::int64_t q_den,
                                  const std::vector<std::vector<std::int64_t>>& pts,
                                  std::int64_t denom);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double lower = 0.0;  // 99% Clopper-Pearson interval
  double upper = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

using Membership = std::function<bool(const std::vector<double>&)>;

MonteCarloEstimate volume_montecarlo(const Membership& member, const std::vector<double>& lo,
                                     const std::vector<double>& hi, std::size_t samples,
                                     std::mt19937_64& rng, double confidence = 0.99);

// Depth of every point of the grid with denominator denom * refinement in
// [0,1]^d. Keys are numerators over that finer denominator.
std::map<std::vector<std::int64_t>, std::size_t> depth_field(
    const std::vector<std::vector<std::int64_t>>& pts, std::int64_t denom, int dim,
    int refinement);

}  // namespace dphull::oracle

#endif  // DPHULL_ORACLE_HPP_
