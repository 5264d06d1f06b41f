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


// Tukey depth and the halfspace description of the depth regions D_{>=k}.

#ifndef DPHULL_TUKEY_HPP_
#define DPHULL_TUKEY_HPP_

#include <cstddef>
#include <memory>
#include <vector>

#include "dphull/geometry.hpp"

namespace dphull {

// A hyperplane spanned by d affinely independent points of S.
struct SpannedHyperplane {
  Hyperplane plane;
  SideCounts counts;               // with multiplicity
  std::vector<std::size_t> on;     // indices of distinct locations on the plane
};

// Every spanned hyperplane of a dataset, computed once and shared by all
// levels k. Sorted by canonical coefficients.
struct HyperplaneTable {
  int dim = 0;
  std::int64_t denom = 1;
  std::size_t n = 0;
  std::vector<GridPoint> locations;
  std::vector<std::size_t> multiplicity;
  std::vector<SpannedHyperplane> planes;
};

HyperplaneTable build_hyperplane_table(const GridDataset& s);

struct TukeyRegionH {
  int dim = 0;
  std::size_t k = 0;
  std::size_t n = 0;
  // Data halfspaces first, then the 2d cube facets.
  std::vector<Halfspace> halfspaces;
  // Distinct-location indices on each boundary; empty for cube facets.
  std::vector<std::vector<std::size_t>> sources;
  std::size_t num_cube_facets = 0;
  // Set when k > n: no threshold applies and only the cube remains.
  bool vacuous = false;
  std::shared_ptr<const std::vector<GridPoint>> locations;
  std::int64_t denom = 1;

  std::size_t num_data_halfspaces() const { return halfspaces.size() - num_cube_facets; }
  bool contains(const RationalPoint& p) const;
  bool contains(const Eigen::VectorXd& x) const;
};

// Minimum number of points of s in a closed halfspace containing q.
std::size_t tukey_depth(const RationalPoint& q, const GridDataset& s);

// Closed halfspaces bounded by spanned hyperplanes that contain at least
// n-k+1 points, plus the cube facets.
TukeyRegionH critical_halfspaces(const GridDataset& s, std::size_t k);
TukeyRegionH critical_halfspaces(const HyperplaneTable& table, std::size_t k);

// Keeps, for every (d-1)-tuple of boundary points, only the halfspaces that
// are extreme around the flat the tuple spans. The intersection is unchanged.
TukeyRegionH prune_halfspaces(const TukeyRegionH& region);

// Largest depth attained by any point of [0,1]^d.
std::size_t max_tukey_depth(const GridDataset& s);
std::size_t max_tukey_depth(const GridDataset& s, const HyperplaneTable& table);

}  // namespace dphull

#endif  // DPHULL_TUKEY_HPP_
