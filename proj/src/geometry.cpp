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

#include "dphull/geometry.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace dphull {

namespace {

constexpr std::int64_t kSmallLimit = std::int64_t{1} << 62;

bool grid_less(const GridPoint& a, const GridPoint& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

GridDataset::GridDataset(int dim, std::int64_t denom, std::vector<GridPoint> points)
    : dim_(dim), denom_(denom), points_(std::move(points)) {
  if (dim_ < 0) throw InvalidDataset("negative dimension");
  if (denom_ <= 0) throw InvalidDataset("denominator must be positive");
  for (const GridPoint& p : points_) {
    if (p.size() != dim_) {
      throw InvalidDataset("point has " + std::to_string(p.size()) +
                           " coordinates, expected " + std::to_string(dim_));
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] < 0 || p[i] > denom_) {
        throw InvalidDataset("coordinate " + std::to_string(p[i]) +
                             " outside [0, " + std::to_string(denom_) + "]");
      }
    }
  }
}

RationalPoint GridDataset::rational_point(std::size_t i) const {
  return to_rational(points_[i], denom_);
}

GridDataset GridDataset::with_replaced(std::size_t i, const GridPoint& p) const {
  std::vector<GridPoint> pts = points_;
  pts.at(i) = p;
  return GridDataset(dim_, denom_, std::move(pts));
}

GridDataset::Distinct GridDataset::distinct() const {
  std::vector<GridPoint> sorted = points_;
  std::sort(sorted.begin(), sorted.end(), grid_less);
  Distinct out;
  for (const GridPoint& p : sorted) {
    if (!out.locations.empty() && out.locations.back() == p) {
      ++out.multiplicity.back();
    } else {
      out.locations.push_back(p);
      out.multiplicity.push_back(1);
    }
  }
  return out;
}

bool GridDataset::operator==(const GridDataset& other) const {
  return dim_ == other.dim_ && denom_ == other.denom_ && points_ == other.points_;
}

RationalPoint to_rational(const GridPoint& m, std::int64_t denom) {
  RationalPoint p(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = Rational(Integer(m[i]), Integer(denom));
  return p;
}

HomogeneousPoint HomogeneousPoint::from_rational(const RationalPoint& p) {
  Integer l = 1;
  for (Eigen::Index i = 0; i < p.size(); ++i) l = lcm(l, denominator(p[i]));
  HomogeneousPoint h;
  h.den = l;
  h.num.resize(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    h.num[i] = numerator(p[i]) * (l / denominator(p[i]));
  }
  return h;
}

HomogeneousPoint HomogeneousPoint::from_grid(const GridPoint& m, std::int64_t denom) {
  std::int64_t g = denom;
  for (Eigen::Index i = 0; i < m.size(); ++i) g = std::gcd(g, m[i]);
  HomogeneousPoint h;
  h.den = denom / g;
  h.num.resize(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) h.num[i] = m[i] / g;
  return h;
}

RationalPoint HomogeneousPoint::to_rational() const {
  RationalPoint p(num.size());
  for (Eigen::Index i = 0; i < num.size(); ++i) p[i] = Rational(num[i], den);
  return p;
}

Hyperplane::Hyperplane(IntegerVector coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 2) throw DegenerateSpan("hyperplane needs at least one normal coordinate");
  Eigen::Index lead = 1;
  while (lead < coeffs_.size() && coeffs_[lead] == 0) ++lead;
  if (lead == coeffs_.size()) throw DegenerateSpan("zero normal vector");
  coeffs_ = primitive_integer_vector(coeffs_);
  if (coeffs_[lead] < 0) coeffs_ = -coeffs_;

  bool small = coeffs_.size() <= 8;
  for (Eigen::Index i = 0; small && i < coeffs_.size(); ++i) {
    small = coeffs_[i] < kSmallLimit && coeffs_[i] > -kSmallLimit;
  }
  if (small) {
    small_.resize(coeffs_.size());
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
      small_[i] = coeffs_[i].convert_to<std::int64_t>();
    }
  }
  approx_.resize(coeffs_.size());
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) approx_[i] = coeffs_[i].convert_to<double>();
}

int Hyperplane::side(const RationalPoint& p) const {
  Rational acc = Rational(coeffs_[0]);
  for (Eigen::Index i = 0; i < p.size(); ++i) acc += Rational(coeffs_[i + 1]) * p[i];
  return acc.sign();
}

int Hyperplane::side(const HomogeneousPoint& p) const {
  Integer acc = coeffs_[0] * p.den;
  for (Eigen::Index i = 0; i < p.num.size(); ++i) acc += coeffs_[i + 1] * p.num[i];
  return acc.sign();
}

int Hyperplane::side(const GridPoint& m, std::int64_t denom) const {
  if (!small_.empty() && denom < kSmallLimit) {
    __int128 acc = static_cast<__int128>(small_[0]) * denom;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      acc += static_cast<__int128>(small_[i + 1]) * m[i];
    }
    return (acc > 0) - (acc < 0);
  }
  Integer acc = coeffs_[0] * Integer(denom);
  for (Eigen::Index i = 0; i < m.size(); ++i) acc += coeffs_[i + 1] * Integer(m[i]);
  return acc.sign();
}

double Hyperplane::evaluate(const Eigen::VectorXd& x) const {
  return approx_[0] + approx_.tail(approx_.size() - 1).dot(x);
}

bool Halfspace::contains(const RationalPoint& p) const {
  const int s = plane.side(p);
  return sense == Sense::kLessEq ? s <= 0 : s >= 0;
}

bool Halfspace::contains(const HomogeneousPoint& p) const {
  const int s = plane.side(p);
  return sense == Sense::kLessEq ? s <= 0 : s >= 0;
}

bool Halfspace::contains(const GridPoint& m, std::int64_t denom) const {
  const int s = plane.side(m, denom);
  return sense == Sense::kLessEq ? s <= 0 : s >= 0;
}

bool Halfspace::contains(const Eigen::VectorXd& x) const {
  const double v = plane.evaluate(x);
  return sense == Sense::kLessEq ? v <= 0.0 : v >= 0.0;
}

IntegerVector Halfspace::outward_normal() const {
  IntegerVector n = plane.normal();
  return sense == Sense::kLessEq ? n : IntegerVector(-n);
}

Hyperplane hyperplane_through(const std::vector<RationalPoint>& pts) {
  if (pts.empty()) throw DegenerateSpan("no points");
  const Eigen::Index d = pts.front().size();
  if (static_cast<Eigen::Index>(pts.size()) != d) {
    throw DegenerateSpan("need exactly " + std::to_string(d) + " points");
  }
  RationalMatrix m(d, d + 1);
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, 0) = 1;
    m.row(i).tail(d) = pts[i].transpose();
  }
  const RationalMatrix ns = null_space(m);
  if (ns.cols() != 1) throw DegenerateSpan("points are affinely dependent");
  return Hyperplane(primitive_integer_vector(RationalVector(ns.col(0))));
}

Hyperplane hyperplane_through_grid(std::span<const GridPoint> pts, std::int64_t denom) {
  if (pts.empty() || pts.front().size() != static_cast<Eigen::Index>(pts.size())) {
    throw DegenerateSpan("need exactly d points in dimension d");
  }
  auto h = try_hyperplane_through_grid(pts, denom);
  if (!h) throw DegenerateSpan("points are affinely dependent");
  return *std::move(h);
}

std::optional<Hyperplane> try_hyperplane_through_grid(std::span<const GridPoint> pts,
                                                      std::int64_t denom) {
  const Eigen::Index d = static_cast<Eigen::Index>(pts.size());
  if (d == 0 || pts.front().size() != d) return std::nullopt;
  IntegerVector coeffs(d + 1);
  if (d == 1) {
    coeffs << Integer(pts[0][0]), Integer(-denom);
  } else if (d == 2 && denom < (std::int64_t{1} << 30)) {
    const std::int64_t a1 = pts[0][0], a2 = pts[0][1], b1 = pts[1][0], b2 = pts[1][1];
    if (a1 == b1 && a2 == b2) return std::nullopt;
    coeffs << Integer(a1 * b2 - a2 * b1), Integer(denom * (a2 - b2)), Integer(denom * (b1 - a1));
  } else {
    // Rows (X, m_i) are X times (1, a_i); the coefficients are the signed
    // maximal minors.
    IntegerMatrix rows(d, d + 1);
    for (Eigen::Index i = 0; i < d; ++i) {
      rows(i, 0) = denom;
      for (Eigen::Index j = 0; j < d; ++j) rows(i, j + 1) = pts[i][j];
    }
    for (Eigen::Index c = 0; c <= d; ++c) {
      IntegerMatrix minor(d, d);
      for (Eigen::Index j = 0, k = 0; j <= d; ++j) {
        if (j == c) continue;
        minor.col(k++) = rows.col(j);
      }
      const Integer det = bareiss_determinant(minor);
      coeffs[c] = (c % 2) ? Integer(-det) : det;
    }
  }
  bool all_zero = true;
  for (Eigen::Index c = 1; c <= d; ++c) all_zero = all_zero && coeffs[c] == 0;
  if (all_zero) return std::nullopt;
  return Hyperplane(std::move(coeffs));
}

SideCounts side_counts(const Hyperplane& h, const GridDataset& s) {
  SideCounts c;
  for (const GridPoint& p : s.points()) {
    const int v = h.side(p, s.denom());
    if (v < 0) {
      ++c.below;
    } else if (v > 0) {
      ++c.above;
    } else {
      ++c.on;
    }
  }
  return c;
}

std::vector<Halfspace> cube_facets(int dim) {
  std::vector<Halfspace> out;
  for (int i = 0; i < dim; ++i) {
    IntegerVector lo = IntegerVector::Zero(dim + 1);
    lo[i + 1] = 1;
    out.push_back(Halfspace{Hyperplane(lo), Sense::kGreaterEq});
    IntegerVector hi = IntegerVector::Zero(dim + 1);
    hi[0] = -1;
    hi[i + 1] = 1;
    out.push_back(Halfspace{Hyperplane(hi), Sense::kLessEq});
  }
  return out;
}

AffineSubspace affine_span(const std::vector<RationalPoint>& pts) {
  if (pts.empty()) throw DegenerateSpan("affine span of no points");
  const Eigen::Index d = pts.front().size();
  RationalMatrix diffs(static_cast<Eigen::Index>(pts.size()) - 1, d);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    diffs.row(static_cast<Eigen::Index>(i) - 1) = (pts[i] - pts[0]).transpose();
  }
  EchelonForm ef = row_echelon(diffs);

  AffineSubspace f;
  f.basis_ = std::move(ef.reduced);
  if (f.basis_.rows() == 0) f.basis_.resize(0, d);
  f.pivots_ = std::move(ef.pivots);
  f.base_ = pts[0];
  for (int r = 0; r < f.dim(); ++r) {
    const Rational coef = f.base_[f.pivots_[r]];
    if (coef != 0) f.base_ -= coef * f.basis_.row(r).transpose();
  }

  const RationalMatrix normals = null_space(f.basis_.rows() ? f.basis_ : RationalMatrix(RationalMatrix::Zero(1, d)));
  f.equations_.resize(normals.cols(), d);
  f.rhs_.resize(normals.cols());
  for (Eigen::Index c = 0; c < normals.cols(); ++c) {
    RationalVector row(d + 1);
    row.head(d) = normals.col(c);
    Rational rhs = 0;
    for (Eigen::Index i = 0; i < d; ++i) rhs += normals(i, c) * f.base_[i];
    row[d] = rhs;
    const IntegerVector prim = primitive_integer_vector(row);
    f.equations_.row(c) = prim.head(d).transpose();
    f.rhs_[c] = prim[d];
  }
  return f;
}

AffineSubspace affine_span_grid(const GridDataset& s, std::span<const std::size_t> indices) {
  std::vector<RationalPoint> pts;
  pts.reserve(indices.size());
  for (std::size_t i : indices) pts.push_back(s.rational_point(i));
  AffineSubspace f = affine_span(pts);
  f.set_witness(std::vector<std::size_t>(indices.begin(), indices.end()));
  return f;
}

bool AffineSubspace::contains(const RationalPoint& p) const {
  for (Eigen::Index r = 0; r < equations_.rows(); ++r) {
    Rational acc = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) acc += Rational(equations_(r, i)) * p[i];
    if (acc != Rational(rhs_[r])) return false;
  }
  return true;
}

bool AffineSubspace::contains(const GridPoint& m, std::int64_t denom) const {
  for (Eigen::Index r = 0; r < equations_.rows(); ++r) {
    Integer acc = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) acc += equations_(r, i) * Integer(m[i]);
    if (acc != rhs_[r] * Integer(denom)) return false;
  }
  return true;
}

bool AffineSubspace::operator==(const AffineSubspace& o) const {
  return pivots_ == o.pivots_ && base_ == o.base_ && basis_ == o.basis_;
}

bool AffineSubspace::operator<(const AffineSubspace& o) const {
  if (dim() != o.dim()) return dim() < o.dim();
  if (pivots_ != o.pivots_) return pivots_ < o.pivots_;
  for (Eigen::Index r = 0; r < basis_.rows(); ++r) {
    for (Eigen::Index c = 0; c < basis_.cols(); ++c) {
      if (basis_(r, c) != o.basis_(r, c)) return basis_(r, c) < o.basis_(r, c);
    }
  }
  return lex_less(base_, o.base_);
}

std::vector<int> choose_projection_coords(const AffineSubspace& f) { return f.pivots(); }

GridDataset restrict_to(const GridDataset& s, const AffineSubspace& f) {
  std::vector<GridPoint> pts;
  for (const GridPoint& p : s.points()) {
    if (f.contains(p, s.denom())) pts.push_back(p);
  }
  return GridDataset(s.dim(), s.denom(), std::move(pts));
}

GridDataset project_points(const GridDataset& on_f, const AffineSubspace& f,
                           const std::vector<int>& coords) {
  std::vector<GridPoint> pts;
  pts.reserve(on_f.size());
  for (const GridPoint& p : on_f.points()) {
    if (!f.contains(p, on_f.denom())) throw PointOffSubspace("point is not on the subspace");
    GridPoint q(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) q[static_cast<Eigen::Index>(i)] = p[coords[i]];
    pts.push_back(std::move(q));
  }
  return GridDataset(static_cast<int>(coords.size()), on_f.denom(), std::move(pts));
}

RationalPoint project_point(const RationalPoint& p, const std::vector<int>& coords) {
  RationalPoint q(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) q[static_cast<Eigen::Index>(i)] = p[coords[i]];
  return q;
}

RationalPoint lift_point(const RationalPoint& projected, const AffineSubspace& f,
                         const std::vector<int>& coords) {
  const Eigen::Index j = f.dim();
  if (static_cast<Eigen::Index>(coords.size()) != j || projected.size() != j) {
    throw PointOffSubspace("projection coordinates do not match the subspace dimension");
  }
  if (j == 0) return f.base();
  RationalMatrix a(j, j);
  RationalVector rhs(j);
  for (Eigen::Index k = 0; k < j; ++k) {
    for (Eigen::Index i = 0; i < j; ++i) a(k, i) = f.basis()(i, coords[k]);
    rhs[k] = projected[k] - f.base()[coords[k]];
  }
  RationalVector t;
  if (!solve(a, rhs, &t)) throw PointOffSubspace("coordinates do not parametrize the subspace");
  RationalPoint out = f.base();
  for (Eigen::Index i = 0; i < j; ++i) out += t[i] * f.basis().row(i).transpose();
  return out;
}

}  // namespace dphull
