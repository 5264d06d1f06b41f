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


#include "dphull/tukey.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dphull/combinatorics.hpp"
#include "dphull/polytope.hpp"

namespace dphull {

namespace {

using IntVecs = std::vector<IntegerVector>;

Integer dot(const IntegerVector& a, const IntegerVector& b) {
  Integer acc = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Vector orthogonal to the r-1 rows given, by signed maximal minors.
IntegerVector cross_product(const IntVecs& rows, const std::vector<std::size_t>& pick, int r) {
  IntegerVector w(r);
  if (r == 2) {
    const IntegerVector& v = rows[pick[0]];
    w << v[1], Integer(-v[0]);
    return w;
  }
  for (int c = 0; c < r; ++c) {
    IntegerMatrix minor(r - 1, r - 1);
    for (int i = 0; i < r - 1; ++i) {
      for (int j = 0, k = 0; j < r; ++j) {
        if (j != c) minor(i, k++) = rows[pick[i]][j];
      }
    }
    const Integer det = bareiss_determinant(minor);
    w[c] = (c % 2) ? Integer(-det) : det;
  }
  return w;
}

// min over generic directions u of #{v : u.v > 0}. Every vector is nonzero.
std::size_t open_depth(const IntVecs& vs) {
  if (vs.empty()) return 0;
  const Eigen::Index d = vs.front().size();
  RationalMatrix m(static_cast<Eigen::Index>(vs.size()), d);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), j) = Rational(vs[i][j]);
  }
  const EchelonForm ef = row_echelon(m);
  const int r = ef.rank();

  IntVecs proj;
  proj.reserve(vs.size());
  for (const IntegerVector& v : vs) {
    IntegerVector p(r);
    for (int i = 0; i < r; ++i) p[i] = v[ef.pivots[i]];
    proj.push_back(std::move(p));
  }
  if (r == 1) {
    std::size_t pos = 0;
    for (const IntegerVector& v : proj) pos += v[0] > 0;
    return std::min(pos, proj.size() - pos);
  }

  std::size_t best = proj.size();
  std::set<IntegerVector, LexLess<Integer>> seen;
  for_each_combination(proj.size(), static_cast<std::size_t>(r - 1),
                       [&](const std::vector<std::size_t>& pick) {
    IntegerVector w = cross_product(proj, pick, r);
    bool zero = true;
    for (int i = 0; i < r && zero; ++i) zero = w[i] == 0;
    if (zero) return true;
    w = primitive_integer_vector(w);
    int lead = 0;
    while (w[lead] == 0) ++lead;
    if (w[lead] < 0) w = -w;
    if (!seen.insert(w).second) return true;

    std::size_t pos = 0, neg = 0;
    IntVecs flat;
    for (const IntegerVector& v : proj) {
      const int s = dot(w, v).sign();
      if (s > 0) {
        ++pos;
      } else if (s < 0) {
        ++neg;
      } else {
        flat.push_back(v);
      }
    }
    const std::size_t side = std::min(pos, neg);
    if (side < best) best = std::min(best, side + open_depth(flat));
    return best > 0;
  });
  return best;
}

// Position of a 2-vector on the circle, for exact angular sorting.
bool angle_less(const std::pair<Integer, Integer>& a, const std::pair<Integer, Integer>& b) {
  auto half = [](const std::pair<Integer, Integer>& p) {
    return (p.second > 0 || (p.second == 0 && p.first > 0)) ? 0 : 1;
  };
  const int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  return a.first * b.second - a.second * b.first > 0;
}

Integer cross2(const std::pair<Integer, Integer>& a, const std::pair<Integer, Integer>& b) {
  return a.first * b.second - a.second * b.first;
}

}  // namespace

HyperplaneTable build_hyperplane_table(const GridDataset& s) {
  HyperplaneTable t;
  t.dim = s.dim();
  t.denom = s.denom();
  t.n = s.size();
  auto dist = s.distinct();
  t.locations = std::move(dist.locations);
  t.multiplicity = std::move(dist.multiplicity);
  if (t.dim == 0) return t;

  std::vector<Hyperplane> planes;
  std::vector<GridPoint> pick(static_cast<std::size_t>(t.dim));
  for_each_combination(t.locations.size(), static_cast<std::size_t>(t.dim),
                       [&](const std::vector<std::size_t>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) pick[i] = t.locations[idx[i]];
    if (auto h = try_hyperplane_through_grid(pick, t.denom)) planes.push_back(*std::move(h));
    return true;
  });
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());

  t.planes.reserve(planes.size());
  for (Hyperplane& h : planes) {
    SpannedHyperplane sh{std::move(h), {}, {}};
    for (std::size_t i = 0; i < t.locations.size(); ++i) {
      const int side = sh.plane.side(t.locations[i], t.denom);
      const std::size_t mult = t.multiplicity[i];
      if (side < 0) {
        sh.counts.below += mult;
      } else if (side > 0) {
        sh.counts.above += mult;
      } else {
        sh.counts.on += mult;
        sh.on.push_back(i);
      }
    }
    t.planes.push_back(std::move(sh));
  }
  return t;
}

bool TukeyRegionH::contains(const RationalPoint& p) const {
  const HomogeneousPoint h = HomogeneousPoint::from_rational(p);
  for (const Halfspace& hs : halfspaces) {
    if (!hs.contains(h)) return false;
  }
  return true;
}

bool TukeyRegionH::contains(const Eigen::VectorXd& x) const {
  for (const Halfspace& hs : halfspaces) {
    if (!hs.contains(x)) return false;
  }
  return true;
}

std::size_t tukey_depth(const RationalPoint& q, const GridDataset& s) {
  const HomogeneousPoint h = HomogeneousPoint::from_rational(q);
  const Integer x(s.denom());
  std::size_t at_q = 0;
  IntVecs vs;
  for (const GridPoint& m : s.points()) {
    IntegerVector v(s.dim());
    bool zero = true;
    for (int i = 0; i < s.dim(); ++i) {
      v[i] = Integer(m[i]) * h.den - h.num[i] * x;
      zero = zero && v[i] == 0;
    }
    if (zero) {
      ++at_q;
    } else {
      vs.push_back(std::move(v));
    }
  }
  return at_q + open_depth(vs);
}

TukeyRegionH critical_halfspaces(const GridDataset& s, std::size_t k) {
  return critical_halfspaces(build_hyperplane_table(s), k);
}

TukeyRegionH critical_halfspaces(const HyperplaneTable& table, std::size_t k) {
  TukeyRegionH region;
  region.dim = table.dim;
  region.k = k;
  region.n = table.n;
  region.denom = table.denom;
  region.locations = std::make_shared<const std::vector<GridPoint>>(table.locations);
  if (k > table.n) {
    region.vacuous = true;
  } else if (k > 0) {
    const std::size_t need = table.n - k + 1;
    for (const SpannedHyperplane& sh : table.planes) {
      if (sh.counts.below + sh.counts.on >= need) {
        region.halfspaces.push_back(Halfspace{sh.plane, Sense::kLessEq});
        region.sources.push_back(sh.on);
      }
      if (sh.counts.above + sh.counts.on >= need) {
        region.halfspaces.push_back(Halfspace{sh.plane, Sense::kGreaterEq});
        region.sources.push_back(sh.on);
      }
    }
  }
  for (Halfspace& f : cube_facets(table.dim)) {
    region.halfspaces.push_back(std::move(f));
    region.sources.emplace_back();
  }
  region.num_cube_facets = 2 * static_cast<std::size_t>(table.dim);
  return region;
}

TukeyRegionH prune_halfspaces(const TukeyRegionH& region) {
  const int d = region.dim;
  const std::size_t m = region.num_data_halfspaces();
  std::vector<bool> keep(m, false);

  if (d == 1) {
    // x <= -a0/a1 and x >= -a0/a1 with a1 > 0: keep the tightest of each.
    std::optional<std::size_t> lo, hi;
    auto bound = [&](std::size_t i) {
      const IntegerVector& c = region.halfspaces[i].plane.coeffs();
      return Rational(-c[0], c[1]);
    };
    for (std::size_t i = 0; i < m; ++i) {
      if (region.halfspaces[i].sense == Sense::kLessEq) {
        if (!hi || bound(i) < bound(*hi)) hi = i;
      } else if (!lo || bound(i) > bound(*lo)) {
        lo = i;
      }
    }
    if (lo) keep[*lo] = true;
    if (hi) keep[*hi] = true;
  } else {
    const auto& locs = *region.locations;
    std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& on = region.sources[i];
      for_each_combination(on.size(), static_cast<std::size_t>(d - 1),
                           [&](const std::vector<std::size_t>& pick) {
        std::vector<std::size_t> sigma(pick.size());
        for (std::size_t t = 0; t < pick.size(); ++t) sigma[t] = on[pick[t]];
        groups[sigma].push_back(i);
        return true;
      });
    }
    for (const auto& [sigma, members] : groups) {
      if (members.size() <= 2) {
        for (std::size_t i : members) keep[i] = true;
        continue;
      }
      // Outward normals all lie in the 2-dimensional orthogonal complement
      // of the flat through sigma; its free coordinates parametrize it.
      RationalMatrix dirs(static_cast<Eigen::Index>(sigma.size()) - 1, d);
      for (std::size_t t = 1; t < sigma.size(); ++t) {
        for (int c = 0; c < d; ++c) {
          dirs(static_cast<Eigen::Index>(t) - 1, c) = Rational(locs[sigma[t]][c] - locs[sigma[0]][c]);
        }
      }
      const EchelonForm ef = row_echelon(dirs);
      if (ef.rank() != d - 2) {
        for (std::size_t i : members) keep[i] = true;
        continue;
      }
      std::vector<int> free;
      for (int c = 0, p = 0; c < d; ++c) {
        if (p < ef.rank() && ef.pivots[p] == c) {
          ++p;
        } else {
          free.push_back(c);
        }
      }
      std::vector<std::pair<std::pair<Integer, Integer>, std::size_t>> around;
      for (std::size_t i : members) {
        const IntegerVector n = region.halfspaces[i].outward_normal();
        around.push_back({{n[free[0]], n[free[1]]}, i});
      }
      std::sort(around.begin(), around.end(),
                [](const auto& a, const auto& b) { return angle_less(a.first, b.first); });
      bool found = false;
      for (std::size_t t = 0; t < around.size() && !found; ++t) {
        const auto& u = around[t];
        const auto& v = around[(t + 1) % around.size()];
        if (cross2(u.first, v.first) < 0) {
          keep[u.second] = keep[v.second] = true;
          found = true;
        }
      }
      if (!found) {
        for (std::size_t i : members) keep[i] = true;
      }
    }
  }

  TukeyRegionH out = region;
  out.halfspaces.clear();
  out.sources.clear();
  for (std::size_t i = 0; i < region.halfspaces.size(); ++i) {
    if (i >= m || keep[i]) {
      out.halfspaces.push_back(region.halfspaces[i]);
      out.sources.push_back(region.sources[i]);
    }
  }
  return out;
}

std::size_t max_tukey_depth(const GridDataset& s) {
  return max_tukey_depth(s, build_hyperplane_table(s));
}

std::size_t max_tukey_depth(const GridDataset& s, const HyperplaneTable& table) {
  if (s.empty()) return 0;
  std::vector<RationalPoint> locs;
  for (const GridPoint& p : table.locations) locs.push_back(to_rational(p, s.denom()));
  const AffineSubspace f = affine_span(locs);
  if (f.dim() == 0) return s.size();
  if (f.dim() < s.dim()) {
    const GridDataset proj = project_points(s, f, choose_projection_coords(f));
    return max_tukey_depth(proj);
  }

  auto nonempty = [&](std::size_t k) {
    try {
      vertex_enumeration(prune_halfspaces(critical_halfspaces(table, k)));
      return true;
    } catch (const EmptyRegion&) {
      return false;
    }
  };
  std::size_t lo = 1, hi = s.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (nonempty(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const VPolytope top = vertex_enumeration(prune_halfspaces(critical_halfspaces(table, lo)));
  std::size_t best = 0;
  for (const RationalPoint& v : top.rational_vertices()) best = std::max(best, tukey_depth(v, s));
  return best;
}

}  // namespace dphull
