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


#include "dphull/oracle.hpp"

#include <stdexcept>

#include <boost/math/distributions/beta.hpp>

namespace dphull::oracle {

namespace {

// True iff the subset is affinely independent and the unique solution of
// sum_i lambda_i p_i = q, sum_i lambda_i = 1 is nonnegative.
bool contains_simplex(const Point& q, const std::vector<const Point*>& simplex) {
  const std::size_t d = q.size();
  const std::size_t m = simplex.size();
  std::vector<std::vector<Rational>> a(d + 1, std::vector<Rational>(m + 1));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < m; ++c) a[r][c] = (*simplex[c])[r];
    a[r][m] = q[r];
  }
  for (std::size_t c = 0; c < m; ++c) a[d][c] = 1;
  a[d][m] = 1;

  std::size_t row = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c <= m && row <= d; ++c) {
    std::size_t p = row;
    while (p <= d && a[p][c] == 0) ++p;
    if (p > d) continue;
    std::swap(a[p], a[row]);
    for (std::size_t r = 0; r <= d; ++r) {
      if (r == row || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[row][c];
      for (std::size_t k = c; k <= m; ++k) a[r][k] -= f * a[row][k];
    }
    pivot_col.push_back(c);
    ++row;
  }
  if (!pivot_col.empty() && pivot_col.back() == m) return false;  // inconsistent
  if (pivot_col.size() != m) return false;                          // dependent
  for (std::size_t r = 0; r < m; ++r) {
    const Rational lambda = a[r][m] / a[r][r];
    if (lambda < 0) return false;
  }
  return true;
}

void collect(const Point& q, const std::vector<Point>& pts, std::size_t start,
             std::vector<const Point*>& chosen, std::uint64_t mask,
             std::vector<std::uint64_t>& family) {
  if (!chosen.empty() && contains_simplex(q, chosen)) {
    family.push_back(mask);
    return;  // supersets are redundant for hitting
  }
  if (chosen.size() == q.size() + 1) return;
  for (std::size_t i = start; i < pts.size(); ++i) {
    chosen.push_back(&pts[i]);
    collect(q, pts, i + 1, chosen, mask | (std::uint64_t{1} << i), family);
    chosen.pop_back();
  }
}

bool can_hit(const std::vector<std::uint64_t>& family, std::uint64_t removed, std::size_t budget) {
  const std::uint64_t* open = nullptr;
  for (const std::uint64_t& s : family) {
    if ((s & removed) == 0) {
      open = &s;
      break;
    }
  }
  if (open == nullptr) return true;
  if (budget == 0) return false;
  for (std::uint64_t bits = *open; bits; bits &= bits - 1) {
    const std::uint64_t bit = bits & (~bits + 1);
    if (can_hit(family, removed | bit, budget - 1)) return true;
  }
  return false;
}

}  // namespace

std::size_t depth_bruteforce(const Point& q, const std::vector<Point>& pts) {
  if (pts.size() > 64) throw std::invalid_argument("depth_bruteforce: at most 64 points");
  std::vector<std::uint64_t> family;
  std::vector<const Point*> chosen;
  collect(q, pts, 0, chosen, 0, family);
  for (std::size_t r = 0;; ++r) {
    if (can_hit(family, 0, r)) return r;
  }
}

std::size_t depth_bruteforce_grid(const std::vector<std::int64_t>& q_num, std::int64_t q_den,
                                  const std::vector<std::vector<std::int64_t>>& pts,
                                  std::int64_t denom) {
  Point q;
  for (std::int64_t v : q_num) q.emplace_back(Integer(v), Integer(q_den));
  std::vector<Point> rp;
  for (const auto& p : pts) {
    Point r;
    for (std::int64_t v : p) r.emplace_back(Integer(v), Integer(denom));
    rp.push_back(std::move(r));
  }
  return depth_bruteforce(q, rp);
}

MonteCarloEstimate volume_montecarlo(const Membership& member, const std::vector<double>& lo,
                                     const std::vector<double>& hi, std::size_t samples,
                                     std::mt19937_64& rng, double confidence) {
  double box = 1.0;
  std::vector<std::uniform_real_distribution<double>> coord;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    box *= hi[i] - lo[i];
    coord.emplace_back(lo[i], hi[i]);
  }
  MonteCarloEstimate out;
  out.samples = samples;
  std::vector<double> x(lo.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = coord[i](rng);
    if (member(x)) ++out.hits;
  }
  const double k = static_cast<double>(out.hits);
  const double n = static_cast<double>(samples);
  const double tail = (1.0 - confidence) / 2.0;
  double lower = 0.0;
  double upper = 1.0;
  if (out.hits > 0) lower = boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1), tail);
  if (out.hits < samples) {
    upper = boost::math::quantile(boost::math::beta_distribution<>(k + 1, n - k), 1.0 - tail);
  }
  out.estimate = box * k / n;
  out.lower = box * lower;
  out.upper = box * upper;
  return out;
}

std::map<std::vector<std::int64_t>, std::size_t> depth_field(
    const std::vector<std::vector<std::int64_t>>& pts, std::int64_t denom, int dim,
    int refinement) {
  const std::int64_t fine = denom * refinement;
  std::vector<Point> rp;
  for (const auto& p : pts) {
    Point r;
    for (std::int64_t v : p) r.emplace_back(Integer(v), Integer(denom));
    rp.push_back(std::move(r));
  }
  std::map<std::vector<std::int64_t>, std::size_t> field;
  std::vector<std::int64_t> cur(dim, 0);
  while (true) {
    Point q;
    for (std::int64_t v : cur) q.emplace_back(Integer(v), Integer(fine));
    field.emplace(cur, depth_bruteforce(q, rp));
    int i = 0;
    while (i < dim && cur[i] == fine) cur[i++] = 0;
    if (i == dim) break;
    ++cur[i];
  }
  return field;
}

}  // namespace dphull::oracle
