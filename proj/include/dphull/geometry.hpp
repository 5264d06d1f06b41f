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

// Exact geometry over grid-quantized point sets.
//
// A GridDataset stores integer numerators m in [0, X]^d; the point it
// represents is m / X. Hyperplanes carry integer coefficients
// (a_0, a_1, ..., a_d) meaning a_0 + sum_i a_i x_i = 0 in real coordinates,
// so evaluating at a grid point is a_0 X + sum_i a_i m_i up to the positive
// factor 1/X.

#ifndef DPHULL_GEOMETRY_HPP_
#define DPHULL_GEOMETRY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dphull/errors.hpp"
#include "dphull/numeric.hpp"

namespace dphull {

using GridPoint = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using RationalPoint = RationalVector;

class GridDataset {
 public:
  GridDataset() = default;
  // Throws InvalidDataset if a coordinate leaves [0, denom] or dimensions
  // disagree.
  GridDataset(int dim, std::int64_t denom, std::vector<GridPoint> points);

  int dim() const { return dim_; }
  std::int64_t denom() const { return denom_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<GridPoint>& points() const { return points_; }
  const GridPoint& point(std::size_t i) const { return points_[i]; }
  RationalPoint rational_point(std::size_t i) const;

  // Neighboring dataset with entry i replaced by p.
  GridDataset with_replaced(std::size_t i, const GridPoint& p) const;

  // Distinct locations in lexicographic order with their multiplicities.
  struct Distinct {
    std::vector<GridPoint> locations;
    std::vector<std::size_t> multiplicity;
  };
  Distinct distinct() const;

  bool operator==(const GridDataset& other) const;

 private:
  int dim_ = 0;
  std::int64_t denom_ = 1;
  std::vector<GridPoint> points_;
};

RationalPoint to_rational(const GridPoint& m, std::int64_t denom);

// Point with integer numerators over a common positive denominator, reduced.
struct HomogeneousPoint {
  IntegerVector num;
  Integer den;

  static HomogeneousPoint from_rational(const RationalPoint& p);
  static HomogeneousPoint from_grid(const GridPoint& m, std::int64_t denom);
  RationalPoint to_rational() const;
  bool operator==(const HomogeneousPoint& o) const {
    return den == o.den && num == o.num;
  }
};

struct SideCounts {
  std::size_t below = 0;  // a_0 + a.x < 0
  std::size_t on = 0;
  std::size_t above = 0;  // a_0 + a.x > 0
  bool operator==(const SideCounts&) const = default;
};

class Hyperplane {
 public:
  // Canonicalizes: divides by the gcd and makes the first nonzero entry of
  // a_1..a_d positive. Throws DegenerateSpan if a_1..a_d are all zero.
  explicit Hyperplane(IntegerVector coeffs);

  int dim() const { return static_cast<int>(coeffs_.size()) - 1; }
  const IntegerVector& coeffs() const { return coeffs_; }
  const Integer& offset() const { return coeffs_[0]; }
  IntegerVector normal() const { return coeffs_.tail(coeffs_.size() - 1); }

  // Signs of a_0 + a.x.
  int side(const RationalPoint& p) const;
  int side(const HomogeneousPoint& p) const;
  int side(const GridPoint& m, std::int64_t denom) const;
  double evaluate(const Eigen::VectorXd& x) const;

  bool operator==(const Hyperplane& o) const { return coeffs_ == o.coeffs_; }
  bool operator<(const Hyperplane& o) const { return lex_less(coeffs_, o.coeffs_); }

 private:
  IntegerVector coeffs_;
  // int64 copies when every coefficient fits; evaluation then runs in 128-bit
  // arithmetic.
  std::vector<std::int64_t> small_;
  Eigen::VectorXd approx_;
};

enum class Sense { kLessEq, kGreaterEq };

struct Halfspace {
  Hyperplane plane;
  Sense sense;

  // Closed membership.
  bool contains(const RationalPoint& p) const;
  bool contains(const HomogeneousPoint& p) const;
  bool contains(const GridPoint& m, std::int64_t denom) const;
  // Floating evaluation (for Monte Carlo and MCMC).
  bool contains(const Eigen::VectorXd& x) const;
  // Outward normal: normal() for kLessEq, -normal() for kGreaterEq.
  IntegerVector outward_normal() const;

  bool operator==(const Halfspace& o) const {
    return sense == o.sense && plane == o.plane;
  }
  bool operator<(const Halfspace& o) const {
    if (plane == o.plane) return sense < o.sense;
    return plane < o.plane;
  }
};

// Hyperplane through d affinely independent points of R^d.
Hyperplane hyperplane_through(const std::vector<RationalPoint>& pts);
// Integer fast path for d grid points; throws DegenerateSpan when dependent.
Hyperplane hyperplane_through_grid(std::span<const GridPoint> pts,
                                   std::int64_t denom);
std::optional<Hyperplane> try_hyperplane_through_grid(std::span<const GridPoint> pts,
                                                      std::int64_t denom);

SideCounts side_counts(const Hyperplane& h, const GridDataset& s);

// The 2d facets of [0,1]^d: x_i >= 0 and x_i <= 1.
std::vector<Halfspace> cube_facets(int dim);

class AffineSubspace {
 public:
  AffineSubspace() = default;

  int ambient_dim() const { return static_cast<int>(base_.size()); }
  int dim() const { return static_cast<int>(pivots_.size()); }
  // Canonical base point: zero at every pivot coordinate.
  const RationalPoint& base() const { return base_; }
  // Direction basis in RREF, one row per direction.
  const RationalMatrix& basis() const { return basis_; }
  const std::vector<int>& pivots() const { return pivots_; }

  std::size_t count() const { return count_; }
  void set_count(std::size_t c) { count_ = c; }
  const std::vector<std::size_t>& witness() const { return witness_; }
  void set_witness(std::vector<std::size_t> w) { witness_ = std::move(w); }

  bool contains(const RationalPoint& p) const;
  bool contains(const GridPoint& m, std::int64_t denom) const;

  // Equality of the point sets (canonical form makes this structural).
  bool operator==(const AffineSubspace& o) const;
  bool operator<(const AffineSubspace& o) const;

  friend AffineSubspace affine_span(const std::vector<RationalPoint>& pts);

 private:
  RationalPoint base_;
  RationalMatrix basis_;
  std::vector<int> pivots_;
  // Integer equations: equations_ * x == rhs_ (one row per normal).
  IntegerMatrix equations_;
  IntegerVector rhs_;
  std::size_t count_ = 0;
  std::vector<std::size_t> witness_;
};

AffineSubspace affine_span(const std::vector<RationalPoint>& pts);
AffineSubspace affine_span_grid(const GridDataset& s,
                                std::span<const std::size_t> indices);

// Pivot columns of the direction basis (increasing index order). The
// projection onto these coordinates is injective on the subspace.
std::vector<int> choose_projection_coords(const AffineSubspace& f);

// Points of s lying on f, with multiplicity.
GridDataset restrict_to(const GridDataset& s, const AffineSubspace& f);

// Projects points (which must all lie on f) onto coords. The result lives on
// the same denominator grid in dimension coords.size().
GridDataset project_points(const GridDataset& on_f, const AffineSubspace& f,
                           const std::vector<int>& coords);

RationalPoint project_point(const RationalPoint& p, const std::vector<int>& coords);

// Inverse of the projection restricted to f. Throws PointOffSubspace when the
// coordinates do not parametrize f.
RationalPoint lift_point(const RationalPoint& projected, const AffineSubspace& f,
                         const std::vector<int>& coords);

}  // namespace dphull

#endif  // DPHULL_GEOMETRY_HPP_
