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


#include "dphull/polytope.hpp"

#include <algorithm>
#include <set>

#include "dphull/combinatorics.hpp"

namespace dphull {

namespace {

bool vertex_less(const HomogeneousPoint& a, const HomogeneousPoint& b) {
  // Compare num_a / den_a with num_b / den_b coordinatewise.
  for (Eigen::Index i = 0; i < a.num.size(); ++i) {
    const Integer l = a.num[i] * b.den;
    const Integer r = b.num[i] * a.den;
    if (l != r) return l < r;
  }
  return false;
}

HomogeneousPoint normalize(IntegerVector num, Integer den) {
  if (den < 0) {
    den = -den;
    num = -num;
  }
  Integer g = den;
  for (Eigen::Index i = 0; i < num.size(); ++i) g = gcd(g, num[i]);
  if (g != 1) {
    den /= g;
    for (Eigen::Index i = 0; i < num.size(); ++i) num[i] /= g;
  }
  return HomogeneousPoint{std::move(num), std::move(den)};
}

// Intersection point of d hyperplanes, or nullopt when they are not
// independent.
std::optional<HomogeneousPoint> intersect(const std::vector<const Hyperplane*>& planes, int d) {
  if (d == 1) {
    const IntegerVector& a = planes[0]->coeffs();
    IntegerVector num(1);
    num[0] = -a[0];
    return normalize(std::move(num), a[1]);
  }
  if (d == 2) {
    const IntegerVector& a = planes[0]->coeffs();
    const IntegerVector& b = planes[1]->coeffs();
    Integer det = a[1] * b[2] - a[2] * b[1];
    if (det == 0) return std::nullopt;
    IntegerVector num(2);
    num[0] = a[2] * b[0] - a[0] * b[2];
    num[1] = a[0] * b[1] - a[1] * b[0];
    return normalize(std::move(num), std::move(det));
  }
  IntegerMatrix a(d, d);
  IntegerVector rhs(d);
  for (int i = 0; i < d; ++i) {
    const IntegerVector& c = planes[i]->coeffs();
    rhs[i] = -c[0];
    for (int j = 0; j < d; ++j) a(i, j) = c[j + 1];
  }
  Integer det = bareiss_determinant(a);
  if (det == 0) return std::nullopt;
  IntegerVector num(d);
  for (int j = 0; j < d; ++j) {
    IntegerMatrix aj = a;
    aj.col(j) = rhs;
    num[j] = bareiss_determinant(aj);
  }
  return normalize(std::move(num), std::move(det));
}

int affine_rank(const std::vector<HomogeneousPoint>& pts, const std::vector<std::size_t>& idx,
                int d) {
  if (idx.empty()) return -1;
  RationalMatrix m(static_cast<Eigen::Index>(idx.size()) - 1, d);
  const RationalPoint base = pts[idx[0]].to_rational();
  for (std::size_t i = 1; i < idx.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i) - 1) = (pts[idx[i]].to_rational() - base).transpose();
  }
  return rank(m);
}

Integer factorial(int d) {
  Integer f = 1;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

void fan(const std::vector<HomogeneousPoint>& pts, const std::vector<std::vector<bool>>& tight,
         const std::vector<std::size_t>& face, int j, int d,
         std::vector<std::vector<std::size_t>>& out) {
  if (static_cast<int>(face.size()) == j + 1) {
    out.push_back(face);
    return;
  }
  const std::size_t apex = face.front();
  std::set<std::vector<std::size_t>> facets;
  for (const auto& row : tight) {
    if (row[apex]) continue;
    std::vector<std::size_t> sub;
    for (std::size_t v : face) {
      if (row[v]) sub.push_back(v);
    }
    if (static_cast<int>(sub.size()) < j || sub.size() == face.size()) continue;
    if (facets.count(sub)) continue;
    if (affine_rank(pts, sub, d) != j - 1) continue;
    facets.insert(std::move(sub));
  }
  for (const auto& g : facets) {
    std::vector<std::vector<std::size_t>> cells;
    fan(pts, tight, g, j - 1, d, cells);
    for (auto& c : cells) {
      c.insert(c.begin(), apex);
      out.push_back(std::move(c));
    }
  }
}

}  // namespace

std::vector<RationalPoint> VPolytope::rational_vertices() const {
  std::vector<RationalPoint> out;
  out.reserve(vertices.size());
  for (const HomogeneousPoint& v : vertices) out.push_back(v.to_rational());
  return out;
}

VPolytope vertex_enumeration(const std::vector<Halfspace>& halfspaces, int dim) {
  std::vector<Hyperplane> planes;
  planes.reserve(halfspaces.size());
  for (const Halfspace& h : halfspaces) planes.push_back(h.plane);
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());

  // Constraint order adapts: a violated halfspace moves to the front.
  std::vector<std::size_t> order(halfspaces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<HomogeneousPoint> found;
  std::vector<const Hyperplane*> pick(static_cast<std::size_t>(dim));
  for_each_combination(planes.size(), static_cast<std::size_t>(dim),
                       [&](const std::vector<std::size_t>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) pick[i] = &planes[idx[i]];
    auto v = intersect(pick, dim);
    if (!v) return true;
    for (std::size_t t = 0; t < order.size(); ++t) {
      if (!halfspaces[order[t]].contains(*v)) {
        std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t),
                    order.begin() + static_cast<std::ptrdiff_t>(t) + 1);
        return true;
      }
    }
    found.push_back(*std::move(v));
    return true;
  });
  if (found.empty()) throw EmptyRegion("no feasible vertex");
  std::sort(found.begin(), found.end(), vertex_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());

  VPolytope p;
  p.dim = dim;
  p.vertices = std::move(found);
  std::vector<std::size_t> all(p.vertices.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  p.affine_dim = affine_rank(p.vertices, all, dim);
  p.halfspaces = halfspaces;
  return p;
}

VPolytope vertex_enumeration(const TukeyRegionH& region) {
  return vertex_enumeration(region.halfspaces, region.dim);
}

VPolytope polytope_from_points(const std::vector<RationalPoint>& input) {
  if (input.empty()) throw EmptyRegion("no points");
  const int d = static_cast<int>(input.front().size());
  std::vector<RationalPoint> pts = input;
  std::sort(pts.begin(), pts.end(), LexLess<Rational>());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const AffineSubspace span = affine_span(pts);
  if (span.dim() < d) {
    VPolytope p;
    p.dim = d;
    p.affine_dim = span.dim();
    for (const RationalPoint& x : pts) p.vertices.push_back(HomogeneousPoint::from_rational(x));
    return p;
  }
  std::vector<Halfspace> facets;
  std::vector<RationalPoint> pick(static_cast<std::size_t>(d));
  for_each_combination(pts.size(), static_cast<std::size_t>(d),
                       [&](const std::vector<std::size_t>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) pick[i] = pts[idx[i]];
    std::optional<Hyperplane> h;
    try {
      h = hyperplane_through(pick);
    } catch (const DegenerateSpan&) {
      return true;
    }
    bool below = false, above = false;
    for (const RationalPoint& x : pts) {
      const int s = h->side(x);
      below |= s < 0;
      above |= s > 0;
    }
    if (!above) facets.push_back(Halfspace{*h, Sense::kLessEq});
    if (!below) facets.push_back(Halfspace{*h, Sense::kGreaterEq});
    return true;
  });
  std::sort(facets.begin(), facets.end());
  facets.erase(std::unique(facets.begin(), facets.end()), facets.end());
  return vertex_enumeration(facets, d);
}

Rational simplex_volume(const std::vector<HomogeneousPoint>& simplex) {
  const int d = static_cast<int>(simplex.front().num.size());
  IntegerMatrix m(d + 1, d + 1);
  Integer dens = 1;
  for (int i = 0; i <= d; ++i) {
    m(i, 0) = simplex[i].den;
    for (int j = 0; j < d; ++j) m(i, j + 1) = simplex[i].num[j];
    dens *= simplex[i].den;
  }
  Integer det = bareiss_determinant(m);
  if (det < 0) det = -det;
  return Rational(det, factorial(d) * dens);
}

Triangulation triangulate(const VPolytope& poly) {
  if (!poly.full_dimensional()) throw NotFullDimensional("polytope has lower affine dimension");
  Triangulation tri;
  tri.dim = poly.dim;
  tri.points = poly.vertices;
  std::vector<std::vector<bool>> tight;
  for (const Halfspace& h : poly.halfspaces) {
    std::vector<bool> row(poly.vertices.size());
    bool any = false;
    for (std::size_t v = 0; v < poly.vertices.size(); ++v) {
      row[v] = h.plane.side(poly.vertices[v]) == 0;
      any = any || row[v];
    }
    if (any) tight.push_back(std::move(row));
  }
  std::sort(tight.begin(), tight.end());
  tight.erase(std::unique(tight.begin(), tight.end()), tight.end());

  std::vector<std::size_t> all(poly.vertices.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::vector<std::size_t>> cells;
  fan(poly.vertices, tight, all, poly.dim, poly.dim, cells);

  tri.total_volume = 0;
  for (auto& c : cells) {
    std::vector<HomogeneousPoint> s;
    for (std::size_t v : c) s.push_back(poly.vertices[v]);
    Rational vol = simplex_volume(s);
    if (vol == 0) continue;
    tri.total_volume += vol;
    tri.simplices.push_back(Simplex{std::move(c), std::move(vol)});
  }
  return tri;
}

Rational volume(const VPolytope& poly) {
  if (!poly.full_dimensional()) return Rational(0);
  return triangulate(poly).total_volume;
}

Rational volume(const TukeyRegionH& region) {
  try {
    return volume(vertex_enumeration(region));
  } catch (const EmptyRegion&) {
    return Rational(0);
  }
}

RationalPoint simplex_point(const std::vector<RationalPoint>& simplex,
                            std::vector<Rational> uniforms) {
  std::sort(uniforms.begin(), uniforms.end());
  RationalPoint out = RationalPoint::Zero(simplex.front().size());
  Rational prev = 0;
  for (std::size_t i = 0; i <= uniforms.size(); ++i) {
    const Rational next = i < uniforms.size() ? uniforms[i] : Rational(1);
    const Rational lambda = next - prev;
    if (lambda != 0) out += lambda * simplex[i];
    prev = next;
  }
  return out;
}

double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RationalPoint sample_uniform(const Triangulation& tri, std::mt19937_64& rng) {
  if (tri.simplices.empty() || tri.total_volume <= 0) throw ZeroVolume("empty triangulation");
  const Rational target = from_double(uniform_double(rng)) * tri.total_volume;
  std::size_t chosen = tri.simplices.size() - 1;
  Rational acc = 0;
  for (std::size_t i = 0; i < tri.simplices.size(); ++i) {
    acc += tri.simplices[i].volume;
    if (target < acc) {
      chosen = i;
      break;
    }
  }
  std::vector<RationalPoint> corners;
  for (std::size_t v : tri.simplices[chosen].vertices) corners.push_back(tri.points[v].to_rational());
  std::vector<Rational> u;
  for (int i = 0; i < tri.dim; ++i) u.push_back(from_double(uniform_double(rng)));
  return simplex_point(corners, std::move(u));
}

}  // namespace dphull
