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


// Exact polytopes given by halfspaces: vertices, triangulation, volume and
// uniform sampling.

#ifndef DPHULL_POLYTOPE_HPP_
#define DPHULL_POLYTOPE_HPP_

#include <cstddef>
#include <random>
#include <vector>

#include "dphull/geometry.hpp"
#include "dphull/tukey.hpp"

namespace dphull {

struct VPolytope {
  int dim = 0;
  int affine_dim = -1;  // -1 for the empty polytope
  std::vector<HomogeneousPoint> vertices;  // lexicographic by rational value
  // Defining (or facet) halfspaces; used to find faces.
  std::vector<Halfspace> halfspaces;

  std::vector<RationalPoint> rational_vertices() const;
  bool full_dimensional() const { return affine_dim == dim; }
};

// Exhaustive over d-subsets of bounding hyperplanes. Throws EmptyRegion when
// no feasible vertex exists. The halfspaces must bound a polytope.
VPolytope vertex_enumeration(const std::vector<Halfspace>& halfspaces, int dim);
VPolytope vertex_enumeration(const TukeyRegionH& region);

// Convex hull of a point set, with its facet halfspaces computed by brute
// force. Intended for small inputs.
VPolytope polytope_from_points(const std::vector<RationalPoint>& pts);

struct Simplex {
  std::vector<std::size_t> vertices;  // d+1 indices into Triangulation::points
  Rational volume;
};

struct Triangulation {
  int dim = 0;
  std::vector<HomogeneousPoint> points;
  std::vector<Simplex> simplices;
  Rational total_volume;
};

// Recursive fan triangulation from the lexicographically smallest vertex of
// every face. Throws NotFullDimensional.
Triangulation triangulate(const VPolytope& poly);

Rational simplex_volume(const std::vector<HomogeneousPoint>& simplex);

// Zero for lower-dimensional input.
Rational volume(const VPolytope& poly);
Rational volume(const TukeyRegionH& region);

// Point sum_i lambda_i v_i where lambda are the gaps of the sorted uniforms
// u (d values in [0,1]) including the two ends.
RationalPoint simplex_point(const std::vector<RationalPoint>& simplex,
                            std::vector<Rational> uniforms);

// Uniform point of the triangulated polytope. Throws ZeroVolume.
RationalPoint sample_uniform(const Triangulation& tri, std::mt19937_64& rng);

// Uniform double in [0,1) with 53 random bits, used wherever a sampler needs
// an exactly representable uniform.
double uniform_double(std::mt19937_64& rng);

}  // namespace dphull

#endif  // DPHULL_POLYTOPE_HPP_
