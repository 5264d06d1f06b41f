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


#include "dphull/exp_mechanism.hpp"

#include <algorithm>

namespace dphull {

namespace {

bool spans_space(const HyperplaneTable& t) {
  if (t.locations.empty()) return false;
  std::vector<RationalPoint> pts;
  for (const GridPoint& p : t.locations) pts.push_back(to_rational(p, t.denom));
  return affine_span(pts).dim() == t.dim;
}

std::shared_ptr<const Triangulation> cube_triangulation(int dim) {
  return std::make_shared<const Triangulation>(triangulate(vertex_enumeration(cube_facets(dim), dim)));
}

HighFloat log_sum_exp(const std::vector<HighFloat>& terms, const std::vector<bool>& present) {
  HighFloat top = 0;
  bool any = false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (present[i] && (!any || terms[i] > top)) {
      top = terms[i];
      any = true;
    }
  }
  HighFloat acc = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (present[i]) acc += exp(terms[i] - top);
  }
  return top + log(acc);
}

std::vector<HighFloat> normalize_logs(const std::vector<HighFloat>& terms,
                                      const std::vector<bool>& present, HighFloat* log_total) {
  const HighFloat total = log_sum_exp(terms, present);
  if (log_total) *log_total = total;
  std::vector<HighFloat> out(terms.size(), HighFloat(0));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (present[i]) out[i] = exp(terms[i] - total);
  }
  return out;
}

}  // namespace

RegionLadder build_ladder(const GridDataset& s, std::optional<std::size_t> k_max) {
  return build_ladder(s, std::make_shared<const HyperplaneTable>(build_hyperplane_table(s)), k_max);
}

RegionLadder build_ladder(const GridDataset& s, std::shared_ptr<const HyperplaneTable> table,
                          std::optional<std::size_t> k_max) {
  RegionLadder ladder;
  ladder.dim = s.dim();
  ladder.n = s.size();
  ladder.table = table;
  ladder.volumes.push_back(Rational(1));
  ladder.regions.push_back(critical_halfspaces(*table, 0));
  ladder.triangulations.push_back(cube_triangulation(s.dim()));
  const std::size_t cap = k_max.value_or(s.size());

  if (!spans_space(*table)) {
    // D_{>=l} lies in a proper flat for every l >= 1.
    ladder.td_max = std::min(cap, s.empty() ? std::size_t{0} : max_tukey_depth(s, *table));
    for (std::size_t l = 1; l <= ladder.td_max; ++l) {
      ladder.volumes.push_back(Rational(0));
      ladder.regions.emplace_back();
      ladder.triangulations.push_back(nullptr);
    }
    return ladder;
  }
  for (std::size_t l = 1; l <= cap; ++l) {
    TukeyRegionH region = prune_halfspaces(critical_halfspaces(*table, l));
    VPolytope poly;
    try {
      poly = vertex_enumeration(region);
    } catch (const EmptyRegion&) {
      break;
    }
    ladder.td_max = l;
    if (poly.full_dimensional()) {
      auto tri = std::make_shared<const Triangulation>(triangulate(poly));
      ladder.volumes.push_back(tri->total_volume);
      ladder.triangulations.push_back(std::move(tri));
    } else {
      ladder.volumes.push_back(Rational(0));
      ladder.triangulations.push_back(nullptr);
    }
    ladder.regions.push_back(std::move(region));
  }
  return ladder;
}

LambdaWeights lambda_weights(const std::vector<Rational>& volumes, double epsilon) {
  LambdaWeights w;
  w.epsilon = epsilon;
  const HighFloat eps(epsilon);
  const HighFloat log_gap = log(HighFloat(1) - exp(-eps / 2));
  std::vector<HighFloat> terms(volumes.size(), HighFloat(0));
  std::vector<bool> present(volumes.size(), false);
  for (std::size_t l = 0; l < volumes.size(); ++l) {
    if (volumes[l] <= 0) continue;
    present[l] = true;
    terms[l] = log_rational(volumes[l]);
    if (l > 0) terms[l] += log_gap + eps * HighFloat(l) / 2;
  }
  HighFloat log_total;
  w.lambda = normalize_logs(terms, present, &log_total);
  w.c = exp(-log_total);
  return w;
}

HighFloat lambda_partial_sum(const LambdaWeights& w, const std::vector<Rational>& volumes,
                             std::size_t m) {
  HighFloat acc = 0;
  for (std::size_t l = 0; l <= m && l < volumes.size(); ++l) {
    if (volumes[l] > 0) acc += w.lambda[l] / to_high(volumes[l]);
  }
  return acc;
}

std::vector<HighFloat> mu_weights(const std::vector<Rational>& volumes, double epsilon) {
  const HighFloat eps(epsilon);
  std::vector<HighFloat> terms(volumes.size(), HighFloat(0));
  std::vector<bool> present(volumes.size(), false);
  for (std::size_t k = 0; k < volumes.size(); ++k) {
    const Rational next = k + 1 < volumes.size() ? volumes[k + 1] : Rational(0);
    const Rational v = volumes[k] - next;
    if (v <= 0) continue;
    present[k] = true;
    terms[k] = eps * HighFloat(k) / 2 + log_rational(v);
  }
  return normalize_logs(terms, present, nullptr);
}

std::size_t sample_index(const std::vector<HighFloat>& weights, std::mt19937_64& rng) {
  const HighFloat u(uniform_double(rng));
  HighFloat acc = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::size_t depth_class(const RegionLadder& ladder, const RationalPoint& p) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < ladder.regions.size(); ++l) {
    if (ladder.regions[l].halfspaces.empty() || !ladder.regions[l].contains(p)) break;
    best = l;
  }
  return best;
}

RationalPoint sample_cube(int dim, std::mt19937_64& rng) {
  RationalPoint p(dim);
  for (int i = 0; i < dim; ++i) p[i] = from_double(uniform_double(rng));
  return p;
}

BaseCaseResult run_base_case_exact(const RegionLadder& ladder, double epsilon,
                                   std::mt19937_64& rng) {
  return run_base_case_exact(ladder, lambda_weights(ladder.volumes, epsilon), rng);
}

BaseCaseResult run_base_case_exact(const RegionLadder& ladder, const LambdaWeights& w,
                                   std::mt19937_64& rng) {
  BaseCaseResult out;
  if (ladder.dim == 0) {
    out.point = RationalPoint(0);
    out.lambda = {1.0};
    return out;
  }
  for (const HighFloat& l : w.lambda) out.lambda.push_back(l.convert_to<double>());
  out.level = sample_index(w.lambda, rng);
  const auto& tri = ladder.triangulations[out.level];
  if (!tri) throw ZeroVolume("selected level has zero volume");
  out.point = sample_uniform(*tri, rng);
  return out;
}

BaseCaseResult run_base_case_exact(const GridDataset& s, double epsilon, std::mt19937_64& rng) {
  return run_base_case_exact(build_ladder(s), epsilon, rng);
}

}  // namespace dphull
