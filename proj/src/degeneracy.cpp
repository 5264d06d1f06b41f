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


#include "dphull/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dphull/combinatorics.hpp"

namespace dphull {

namespace {

// Index into s of the first occurrence of every location.
std::vector<std::size_t> first_indices(const GridDataset& s,
                                       const std::vector<GridPoint>& locations) {
  std::vector<std::size_t> out(locations.size(), 0);
  for (std::size_t l = 0; l < locations.size(); ++l) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.point(i) == locations[l]) {
        out[l] = i;
        break;
      }
    }
  }
  return out;
}

// Greedy affinely independent subset of pts, as indices.
std::vector<std::size_t> independent_subset(const std::vector<RationalPoint>& pts) {
  std::vector<std::size_t> chosen;
  std::vector<RationalPoint> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    kept.push_back(pts[i]);
    if (affine_span(kept).dim() + 1 == static_cast<int>(kept.size())) {
      chosen.push_back(i);
    } else {
      kept.pop_back();
    }
  }
  return chosen;
}

HighFloat uniform_high(std::mt19937_64& rng) {
  const HighFloat scale = HighFloat(1) / HighFloat(9007199254740992.0);  // 2^-53
  const HighFloat hi(static_cast<double>(rng() >> 11));
  const HighFloat lo(static_cast<double>(rng() >> 11));
  return (hi + lo * scale) * scale;
}

HighFloat log_integer(const Integer& z) { return log(HighFloat(z.str())); }

}  // namespace

const AffineSubspace* SubspaceCensus::find(const AffineSubspace& f) const {
  if (f.ambient_dim() != dim || f.dim() < 0 || f.dim() >= static_cast<int>(by_dim.size())) {
    return nullptr;
  }
  const std::vector<AffineSubspace>& list = by_dim[static_cast<std::size_t>(f.dim())];
  const auto it = std::lower_bound(list.begin(), list.end(), f);
  if (it == list.end() || !(*it == f)) return nullptr;
  return &*it;
}

SubspaceCensus subspace_census(const GridDataset& s) {
  return subspace_census(s, build_hyperplane_table(s));
}

SubspaceCensus subspace_census(const GridDataset& s, const HyperplaneTable& table) {
  const int d = s.dim();
  SubspaceCensus census;
  census.dim = d;
  census.n = s.size();
  census.by_dim.resize(static_cast<std::size_t>(std::max(d, 0)));
  census.maxima.assign(static_cast<std::size_t>(std::max(d, 0)), 0);
  if (d == 0 || s.empty()) return census;

  const std::vector<GridPoint>& locs = table.locations;
  const std::vector<std::size_t> first = first_indices(s, locs);
  std::vector<RationalPoint> rational;
  for (const GridPoint& p : locs) rational.push_back(to_rational(p, s.denom()));

  for (std::size_t l = 0; l < locs.size(); ++l) {
    AffineSubspace f = affine_span({rational[l]});
    f.set_count(table.multiplicity[l]);
    f.set_witness({first[l]});
    census.by_dim[0].push_back(std::move(f));
  }

  for (int i = 1; i + 1 < d; ++i) {
    std::set<AffineSubspace> seen;
    for_each_combination(locs.size(), static_cast<std::size_t>(i + 1),
                         [&](const std::vector<std::size_t>& idx) {
                           std::vector<RationalPoint> pts;
                           for (std::size_t t : idx) pts.push_back(rational[t]);
                           AffineSubspace f = affine_span(pts);
                           if (f.dim() != i || seen.count(f)) return true;
                           std::size_t count = 0;
                           for (std::size_t l = 0; l < locs.size(); ++l) {
                             if (f.contains(locs[l], s.denom())) count += table.multiplicity[l];
                           }
                           std::vector<std::size_t> witness;
                           for (std::size_t t : idx) witness.push_back(first[t]);
                           f.set_count(count);
                           f.set_witness(std::move(witness));
                           seen.insert(std::move(f));
                           return true;
                         });
    census.by_dim[static_cast<std::size_t>(i)].assign(seen.begin(), seen.end());
  }

  if (d >= 2) {
    std::vector<AffineSubspace>& top = census.by_dim[static_cast<std::size_t>(d - 1)];
    for (const SpannedHyperplane& h : table.planes) {
      std::vector<RationalPoint> pts;
      for (std::size_t l : h.on) pts.push_back(rational[l]);
      AffineSubspace f = affine_span(pts);
      std::vector<std::size_t> witness;
      for (std::size_t t : independent_subset(pts)) witness.push_back(first[h.on[t]]);
      f.set_count(h.counts.on);
      f.set_witness(std::move(witness));
      top.push_back(std::move(f));
    }
  }

  for (auto& list : census.by_dim) std::sort(list.begin(), list.end());
  std::size_t running = 0;
  for (std::size_t i = 0; i < census.by_dim.size(); ++i) {
    for (const AffineSubspace& f : census.by_dim[i]) running = std::max(running, f.count());
    census.maxima[i] = running;
  }
  return census;
}

double laplace_from_uniform(double u, double b) {
  const double sign = u < 0 ? -1.0 : (u > 0 ? 1.0 : 0.0);
  return -b * sign * std::log(1.0 - 2.0 * std::abs(u));
}

double laplace_noise(double b, std::mt19937_64& rng) {
  double u;
  do {
    u = uniform_double(rng) - 0.5;
  } while (u == -0.5);
  return laplace_from_uniform(u, b);
}

DimensionChoice choose_dimension(const std::vector<double>& noisy_maxima, std::size_t n,
                                 double k, int dim, double epsilon_noise, double beta) {
  DimensionChoice choice;
  const double slack = std::log(2.0 / beta) / epsilon_noise;
  for (int j = 0; j < dim; ++j) {
    const double t = static_cast<double>(n) - (dim - j + 1) * k - slack;
    choice.thresholds.push_back(t);
    if (choice.base_case && noisy_maxima[static_cast<std::size_t>(j)] > t) {
      choice.base_case = false;
      choice.j = j;
    }
  }
  return choice;
}

std::vector<ScoredSubspace> subspace_scores(const SubspaceCensus& census, int j) {
  std::vector<ScoredSubspace> out;
  const std::size_t prev = j == 0 ? 0 : census.maxima[static_cast<std::size_t>(j - 1)];
  for (const AffineSubspace& f : census.by_dim[static_cast<std::size_t>(j)]) {
    const std::size_t c = f.count();
    out.push_back({&f, c > prev ? c - prev : 0});
  }
  return out;
}

std::size_t subspace_score(const SubspaceCensus& census, const AffineSubspace& f) {
  const AffineSubspace* match = census.find(f);
  if (!match) return 0;
  const int j = f.dim();
  const std::size_t prev = j == 0 ? 0 : census.maxima[static_cast<std::size_t>(j - 1)];
  return match->count() > prev ? match->count() - prev : 0;
}

Selection select_subspace(const std::vector<ScoredSubspace>& scores, int j, std::int64_t denom,
                          int dim, double epsilon_select, std::mt19937_64& rng) {
  std::map<std::size_t, std::vector<const AffineSubspace*>> classes;
  std::size_t positive = 0;
  for (const ScoredSubspace& s : scores) {
    if (s.score == 0) continue;
    classes[s.score].push_back(s.subspace);
    ++positive;
  }
  Integer candidates = 1;
  for (int i = 0; i < dim * (j + 1); ++i) candidates *= denom;
  Integer dummies = candidates - Integer(static_cast<long>(positive));
  if (dummies < 0) dummies = 0;

  Selection out;
  std::vector<HighFloat> log_w;
  std::vector<std::size_t> class_score;
  const HighFloat eps(epsilon_select);
  if (dummies > 0) {
    out.log_dummies = log_integer(dummies);
    log_w.push_back(out.log_dummies);
    class_score.push_back(0);
  } else {
    out.log_dummies = -std::numeric_limits<HighFloat>::infinity();
  }
  for (const auto& [score, members] : classes) {
    log_w.push_back(log(HighFloat(static_cast<double>(members.size()))) +
                    eps * HighFloat(static_cast<double>(score)) / 4);
    class_score.push_back(score);
  }
  if (log_w.empty()) {
    out.failure_probability = 1;
    return out;
  }
  const HighFloat top = *std::max_element(log_w.begin(), log_w.end());
  HighFloat total = 0;
  for (const HighFloat& w : log_w) total += exp(w - top);
  const HighFloat lse = top + log(total);
  out.failure_probability = dummies > 0 ? exp(log_w[0] - lse) : HighFloat(0);

  const HighFloat u = uniform_high(rng);
  HighFloat acc = 0;
  std::size_t drawn = log_w.size() - 1;
  for (std::size_t c = 0; c < log_w.size(); ++c) {
    acc += exp(log_w[c] - lse);
    if (u < acc) {
      drawn = c;
      break;
    }
  }
  out.score = class_score[drawn];
  if (out.score == 0) return out;
  const std::vector<const AffineSubspace*>& members = classes[out.score];
  out.subspace = *members[static_cast<std::size_t>(rng() % members.size())];
  return out;
}

BudgetSplit BudgetSplit::standard(double epsilon, double delta, double beta, int dim, Mode mode) {
  BudgetSplit b;
  const double d = std::max(dim, 1);
  b.epsilon_total = epsilon;
  b.delta_total = delta;
  b.epsilon_noise = epsilon / (4 * d * d);
  b.epsilon_select = epsilon / (4 * d);
  b.epsilon_base = epsilon / 2;
  b.beta = beta;
  b.mode = mode;
  return b;
}

bool BudgetSplit::composes(int dim) const {
  const double d = dim;
  return d * d * epsilon_noise + d * epsilon_select + epsilon_base <= epsilon_total * (1 + 1e-12);
}

std::string AnalysisCache::key(const GridDataset& s) {
  std::ostringstream out;
  out << s.dim() << '|' << s.denom() << '|';
  for (const GridPoint& p : s.points()) {
    for (Eigen::Index i = 0; i < p.size(); ++i) out << p[i] << ',';
    out << ';';
  }
  return out.str();
}

AnalysisCache::Entry& AnalysisCache::entry(const std::string& k) { return entries_[k]; }

std::shared_ptr<const HyperplaneTable> AnalysisCache::table(const GridDataset& s) {
  std::lock_guard<std::mutex> lock(mu_);
  Entry& e = entry(key(s));
  if (!e.table) e.table = std::make_shared<const HyperplaneTable>(build_hyperplane_table(s));
  return e.table;
}

std::shared_ptr<const SubspaceCensus> AnalysisCache::census(const GridDataset& s) {
  const auto t = table(s);
  std::lock_guard<std::mutex> lock(mu_);
  Entry& e = entry(key(s));
  if (!e.census) e.census = std::make_shared<const SubspaceCensus>(subspace_census(s, *t));
  return e.census;
}

std::shared_ptr<const RegionLadder> AnalysisCache::ladder(const GridDataset& s) {
  const auto t = table(s);
  std::lock_guard<std::mutex> lock(mu_);
  Entry& e = entry(key(s));
  if (!e.ladder) e.ladder = std::make_shared<const RegionLadder>(build_ladder(s, t));
  return e.ladder;
}

std::size_t AnalysisCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

namespace {

void run_exact_base(const GridDataset& cur, double epsilon, std::mt19937_64& rng,
                    AnalysisCache& cache, BaseRecord& record, RationalPoint& point) {
  const std::shared_ptr<const RegionLadder> ladder = cache.ladder(cur);
  const BaseCaseResult r = run_base_case_exact(*ladder, epsilon, rng);
  record.level = r.level;
  record.lambda = r.lambda;
  record.td_max = ladder->td_max;
  record.volumes.clear();
  for (const Rational& v : ladder->volumes) record.volumes.push_back(to_string(v));
  point = r.point;
}

}  // namespace

RunResult dp_convex_hull_point(const GridDataset& s, const MechanismConfig& config,
                               std::mt19937_64& rng, AnalysisCache* cache) {
  if (s.size() < std::max<std::size_t>(config.min_n, 1)) {
    throw InfeasibleParams("dataset has " + std::to_string(s.size()) +
                           " points, configured minimum is " + std::to_string(config.min_n));
  }
  const BudgetSplit& budget = config.budget;
  if (!(budget.epsilon_noise > 0) || !(budget.epsilon_select > 0) || !(budget.epsilon_base > 0) ||
      !(budget.beta > 0 && budget.beta < 2)) {
    throw InfeasibleParams("privacy parameters must be positive and beta in (0, 2)");
  }
  if (!budget.composes(s.dim())) throw InfeasibleParams("budget split exceeds epsilon_total");
  if (budget.mode == Mode::kApprox && !(budget.delta_total > 0 && budget.delta_total < 1)) {
    throw InfeasibleParams("approximate mode needs delta in (0, 1)");
  }
  AnalysisCache local;
  AnalysisCache& shared = cache ? *cache : local;

  RunResult result;
  RunTranscript& tr = result.transcript;
  tr.budget = budget;
  tr.noise_scale_factor = config.noise_scale_factor;
  tr.k = static_cast<double>(s.size()) / (4.0 * std::max(s.dim(), 1));

  struct Step {
    AffineSubspace f;
    std::vector<int> coords;
  };
  std::vector<Step> stack;
  GridDataset cur = s;
  RationalPoint point;
  for (;;) {
    const int d = cur.dim();
    if (d == 0) {
      point = RationalPoint(0);
      break;
    }
    const std::shared_ptr<const SubspaceCensus> census = shared.census(cur);
    LevelRecord level;
    level.dim = d;
    level.n = cur.size();
    level.maxima = census->maxima;
    for (int i = 0; i < d; ++i) {
      level.noisy_maxima.push_back(static_cast<double>(census->maxima[static_cast<std::size_t>(i)]) +
                                   laplace_noise(config.noise_scale_factor / budget.epsilon_noise, rng));
    }
    const DimensionChoice choice =
        choose_dimension(level.noisy_maxima, cur.size(), tr.k, d, budget.epsilon_noise, budget.beta);
    level.thresholds = choice.thresholds;
    level.base_case = choice.base_case;
    if (choice.base_case) {
      tr.levels.push_back(std::move(level));
      BaseRecord base;
      base.mode = budget.mode;
      base.dim = d;
      base.n = cur.size();
      if (budget.mode == Mode::kExact) {
        run_exact_base(cur, budget.epsilon_base, rng, shared, base, point);
      } else {
        try {
          const ApproxBaseResult r = run_base_case_approx(cur, *shared.table(cur), budget.epsilon_base,
                                                          budget.delta_total, rng, config.approx);
          base.level = r.level;
          base.lambda = r.lambda;
          base.td_max = r.lambda.empty() ? 0 : r.lambda.size() - 1;
          base.approx = r;
          point = r.point;
        } catch (const Error& e) {
          if (!config.exact_fallback) {
            tr.base = std::move(base);
            tr.status = RunStatus::kFailure;
            tr.failure_reason = e.what();
            tr.final_dim = d;
            return result;
          }
          base.fallback_used = true;
          run_exact_base(cur, budget.epsilon_base, rng, shared, base, point);
        }
      }
      tr.base = std::move(base);
      break;
    }

    const int j = choice.j;
    const Selection sel = select_subspace(subspace_scores(*census, j), j, cur.denom(), d,
                                          budget.epsilon_select, rng);
    SelectionRecord rec;
    rec.j = j;
    rec.score = sel.score;
    rec.failure_probability = sel.failure_probability.convert_to<double>();
    if (!sel.subspace) {
      level.selection = std::move(rec);
      tr.levels.push_back(std::move(level));
      tr.status = RunStatus::kFailure;
      tr.failure_reason = "subspace selection drew the dummy class";
      tr.final_dim = d;
      return result;
    }
    const AffineSubspace& f = *sel.subspace;
    const GridDataset on_f = restrict_to(cur, f);
    if (on_f.empty()) throw EmptyRestriction("selected subspace holds no points");
    std::vector<int> coords = choose_projection_coords(f);
    rec.count = on_f.size();
    rec.witness = f.witness();
    rec.base = f.base();
    rec.basis = f.basis();
    rec.projection_coords = coords;
    level.selection = std::move(rec);
    tr.levels.push_back(std::move(level));
    GridDataset next = project_points(on_f, f, coords);
    stack.push_back({f, std::move(coords)});
    cur = std::move(next);
  }
  tr.final_dim = cur.dim();
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) point = lift_point(point, it->f, it->coords);
  tr.output = point;
  result.point = point;
  return result;
}

}  // namespace dphull
