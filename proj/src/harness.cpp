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


#include "dphull/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "dphull/exp_mechanism.hpp"
#include "dphull/tukey.hpp"

namespace dphull {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

GridPoint uniform_point(int dim, std::int64_t denom, std::mt19937_64& rng) {
  GridPoint p(dim);
  for (int i = 0; i < dim; ++i) p[i] = uniform_int(rng, 0, denom);
  return p;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

bool in_cube(const GridPoint& p, std::int64_t denom) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || p[i] > denom) return false;
  }
  return true;
}

GridPoint primitive(GridPoint v) {
  std::int64_t g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = std::gcd(g, v[i]);
  if (g > 1) v /= g;
  return v;
}

// Grid points of [0, X]^d on the line through two distinct grid points.
struct GridLine {
  GridPoint a;
  GridPoint v;  // primitive direction
  std::int64_t t_lo = 0;
  std::int64_t t_hi = 0;

  GridPoint at(std::int64_t t) const { return a + t * v; }
};

GridLine random_line(int dim, std::int64_t denom, std::mt19937_64& rng) {
  GridPoint a = uniform_point(dim, denom, rng);
  GridPoint b = uniform_point(dim, denom, rng);
  while (a == b) b = uniform_point(dim, denom, rng);
  GridLine line{a, primitive(b - a)};
  line.t_lo = std::numeric_limits<std::int64_t>::min();
  line.t_hi = std::numeric_limits<std::int64_t>::max();
  for (int i = 0; i < dim; ++i) {
    const std::int64_t vi = line.v[i];
    if (vi == 0) continue;
    std::int64_t lo = vi > 0 ? ceil_div(-a[i], vi) : ceil_div(denom - a[i], vi);
    std::int64_t hi = vi > 0 ? floor_div(denom - a[i], vi) : floor_div(-a[i], vi);
    line.t_lo = std::max(line.t_lo, lo);
    line.t_hi = std::min(line.t_hi, hi);
  }
  return line;
}

std::size_t flat_count(double fraction, std::size_t n) {
  return std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
}

bool affinely_independent(const GridPoint& u, const GridPoint& w) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    for (Eigen::Index j = i + 1; j < u.size(); ++j) {
      if (u[i] * w[j] - u[j] * w[i] != 0) return true;
    }
  }
  return false;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::kUniformGrid: return "uniform-grid";
    case Family::kClustered: return "clustered";
    case Family::kCollinear: return "collinear";
    case Family::kCoplanar: return "coplanar";
    case Family::kDuplicatedPoint: return "duplicated-point";
    case Family::kAdversarialNearDegenerate: return "adversarial-near-degenerate";
  }
  return "unknown";
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::kUniformGrid, Family::kClustered, Family::kCollinear, Family::kCoplanar,
                   Family::kDuplicatedPoint, Family::kAdversarialNearDegenerate}) {
    if (to_string(f) == s) return f;
  }
  throw InfeasibleParams("unknown dataset family '" + s + "'");
}

GridDataset generate_dataset(const DatasetSpec& spec, std::mt19937_64& rng) {
  if (spec.dim < 1) throw InfeasibleParams("dimension must be positive");
  if (spec.denom < 1) throw InfeasibleParams("denominator must be positive");
  if (spec.n < 1) throw InfeasibleParams("n must be positive");
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) throw InfeasibleParams("fraction must lie in [0, 1]");
  const int d = spec.dim;
  const std::int64_t x = spec.denom;
  std::vector<GridPoint> pts;
  pts.reserve(spec.n);

  switch (spec.family) {
    case Family::kUniformGrid:
      for (std::size_t i = 0; i < spec.n; ++i) pts.push_back(uniform_point(d, x, rng));
      break;

    case Family::kClustered: {
      if (spec.clusters < 1) throw InfeasibleParams("clustered family needs at least one cluster");
      if (spec.spread < 0) throw InfeasibleParams("spread must be nonnegative");
      std::vector<GridPoint> centers;
      for (std::size_t c = 0; c < spec.clusters; ++c) centers.push_back(uniform_point(d, x, rng));
      for (std::size_t i = 0; i < spec.n; ++i) {
        GridPoint p = centers[i % centers.size()];
        for (int k = 0; k < d; ++k) {
          p[k] = std::clamp<std::int64_t>(p[k] + uniform_int(rng, -spec.spread, spec.spread), 0, x);
        }
        pts.push_back(p);
      }
      break;
    }

    case Family::kCollinear:
    case Family::kAdversarialNearDegenerate: {
      if (d < 2) throw InfeasibleParams("line families need d >= 2");
      const GridLine line = random_line(d, x, rng);
      const std::size_t m = flat_count(spec.fraction, spec.n);
      for (std::size_t i = 0; i < m; ++i) pts.push_back(line.at(uniform_int(rng, line.t_lo, line.t_hi)));
      for (std::size_t i = m; i < spec.n; ++i) {
        if (spec.family == Family::kCollinear) {
          pts.push_back(uniform_point(d, x, rng));
          continue;
        }
        // One grid step off the line.
        GridPoint p = line.at(uniform_int(rng, line.t_lo, line.t_hi));
        const int k = static_cast<int>(uniform_int(rng, 0, d - 1));
        const std::int64_t step = uniform_int(rng, 0, 1) == 0 ? -1 : 1;
        p[k] = p[k] + step >= 0 && p[k] + step <= x ? p[k] + step : p[k] - step;
        pts.push_back(p);
      }
      break;
    }

    case Family::kCoplanar: {
      if (d < 3) throw InfeasibleParams("coplanar family needs d >= 3");
      GridPoint a = uniform_point(d, x, rng);
      GridPoint u, w;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000) throw InfeasibleParams("no affinely independent triple found");
        u = uniform_point(d, x, rng) - a;
        w = uniform_point(d, x, rng) - a;
        if (affinely_independent(u, w)) break;
      }
      u = primitive(u);
      w = primitive(w);
      const std::size_t m = flat_count(spec.fraction, spec.n);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t attempt = 0;; ++attempt) {
          const GridPoint p = a + uniform_int(rng, -x, x) * u + uniform_int(rng, -x, x) * w;
          if (in_cube(p, x)) {
            pts.push_back(p);
            break;
          }
          if (attempt > 1000000) {
            pts.push_back(a);
            break;
          }
        }
      }
      for (std::size_t i = m; i < spec.n; ++i) pts.push_back(uniform_point(d, x, rng));
      break;
    }

    case Family::kDuplicatedPoint: {
      const std::size_t m = spec.multiplicity;
      if (m < 1 || m > spec.n) throw InfeasibleParams("multiplicity must lie in [1, n]");
      const double cells = std::pow(static_cast<double>(x + 1), d);
      if (cells - 1.0 < static_cast<double>(spec.n - m)) {
        throw InfeasibleParams("grid too small for distinct remaining points");
      }
      const GridPoint z = uniform_point(d, x, rng);
      for (std::size_t i = 0; i < m; ++i) pts.push_back(z);
      auto less = [](const GridPoint& p, const GridPoint& q) {
        return std::lexicographical_compare(p.data(), p.data() + p.size(), q.data(), q.data() + q.size());
      };
      std::set<GridPoint, decltype(less)> used(less);
      used.insert(z);
      while (pts.size() < spec.n) {
        GridPoint p = uniform_point(d, x, rng);
        if (used.insert(p).second) pts.push_back(p);
      }
      break;
    }
  }
  return GridDataset(d, x, std::move(pts));
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32)};
  return std::mt19937_64(seq);
}

std::size_t thread_count() {
  if (const char* env = std::getenv("DPHULL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Json to_json(const ExperimentConfig& c) {
  Json modes = Json::array();
  for (Mode m : c.modes) modes.push_back(to_string(m));
  return {{"dataset",
           {{"family", to_string(c.dataset.family)},
            {"dim", c.dataset.dim},
            {"denom", c.dataset.denom},
            {"n", c.dataset.n},
            {"fraction", c.dataset.fraction},
            {"multiplicity", c.dataset.multiplicity},
            {"clusters", c.dataset.clusters},
            {"spread", c.dataset.spread}}},
          {"epsilon", c.epsilon},
          {"delta", c.delta},
          {"beta", c.beta},
          {"mode", to_string(c.mode)},
          {"noise_scale_factor", c.noise_scale_factor},
          {"alpha_scale", c.alpha_scale},
          {"chain_steps", c.chain_steps},
          {"trials", c.trials},
          {"seed", c.seed},
          {"output", c.output},
          {"sweep", {{"ns", c.ns}, {"epsilons", c.epsilons}, {"denoms", c.denoms}, {"modes", modes}}},
          {"audit", {{"cell_factor", c.cell_factor}, {"confidence", c.confidence}}},
          {"bench", {{"ns", c.bench_ns}, {"repetitions", c.repetitions}}}};
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw InfeasibleParams("experiment config must be a JSON object");
  ExperimentConfig c;
  try {
    if (j.contains("dataset")) {
      const Json& d = j.at("dataset");
      c.dataset.family = parse_family(d.value("family", to_string(c.dataset.family)));
      c.dataset.dim = d.value("dim", c.dataset.dim);
      c.dataset.denom = d.value("denom", c.dataset.denom);
      c.dataset.n = d.value("n", c.dataset.n);
      c.dataset.fraction = d.value("fraction", c.dataset.fraction);
      c.dataset.multiplicity = d.value("multiplicity", c.dataset.multiplicity);
      c.dataset.clusters = d.value("clusters", c.dataset.clusters);
      c.dataset.spread = d.value("spread", c.dataset.spread);
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    c.delta = j.value("delta", c.delta);
    c.beta = j.value("beta", c.beta);
    c.mode = parse_mode(j.value("mode", to_string(c.mode)));
    c.noise_scale_factor = j.value("noise_scale_factor", c.noise_scale_factor);
    c.alpha_scale = j.value("alpha_scale", c.alpha_scale);
    c.chain_steps = j.value("chain_steps", c.chain_steps);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.output = j.value("output", c.output);
    if (j.contains("sweep")) {
      const Json& s = j.at("sweep");
      c.ns = s.value("ns", c.ns);
      c.epsilons = s.value("epsilons", c.epsilons);
      c.denoms = s.value("denoms", c.denoms);
      for (const std::string& m : s.value("modes", std::vector<std::string>{})) c.modes.push_back(parse_mode(m));
    }
    if (j.contains("audit")) {
      c.cell_factor = j.at("audit").value("cell_factor", c.cell_factor);
      c.confidence = j.at("audit").value("confidence", c.confidence);
    }
    if (j.contains("bench")) {
      c.bench_ns = j.at("bench").value("ns", c.bench_ns);
      c.repetitions = j.at("bench").value("repetitions", c.repetitions);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InfeasibleParams(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

MechanismConfig mechanism_config(const ExperimentConfig& c, int dim) {
  MechanismConfig m;
  m.budget = BudgetSplit::standard(c.epsilon, c.delta, c.beta, dim, c.mode);
  m.approx.c_alpha = c.alpha_scale;
  m.approx.chain_steps = c.chain_steps;
  m.noise_scale_factor = c.noise_scale_factor;
  return m;
}

namespace {

std::string flat_key(const SelectionRecord& rec) {
  std::ostringstream os;
  os << "j=" << rec.j << " base=(";
  for (Eigen::Index i = 0; i < rec.base.size(); ++i) os << (i ? "," : "") << to_string(rec.base[i]);
  os << ") basis=(";
  for (Eigen::Index r = 0; r < rec.basis.rows(); ++r) {
    os << (r ? ";" : "");
    for (Eigen::Index c = 0; c < rec.basis.cols(); ++c) os << (c ? "," : "") << to_string(rec.basis(r, c));
  }
  os << ")";
  return os.str();
}

TrialOutcome outcome_from(const GridDataset& s, const RunResult& r) {
  TrialOutcome o;
  const RunTranscript& tr = r.transcript;
  o.failed = tr.status == RunStatus::kFailure;
  o.failure_reason = tr.failure_reason;
  o.final_dim = tr.final_dim;
  if (r.point) {
    o.point = r.point;
    o.depth = tukey_depth(*r.point, s);
    o.inside = o.depth >= 1;
  }
  if (!tr.levels.empty()) {
    const LevelRecord& top = tr.levels.front();
    if (top.base_case) {
      o.dimension_event = "base";
    } else if (top.selection) {
      o.dimension_event = "recurse:" + std::to_string(top.selection->j);
      o.selection_event = top.selection->witness.empty() ? "failure" : flat_key(*top.selection);
    }
  }
  if (tr.base) o.level_event = "dim=" + std::to_string(tr.base->dim) + " level=" + std::to_string(tr.base->level);
  return o;
}

}  // namespace

std::vector<TrialOutcome> run_trials(const GridDataset& s, const MechanismConfig& config,
                                     std::size_t trials, std::uint64_t seed,
                                     std::uint64_t stream, AnalysisCache* cache) {
  AnalysisCache local;
  AnalysisCache* shared = cache ? cache : &local;
  std::vector<TrialOutcome> out(trials);
  parallel_for(trials, [&](std::size_t i) {
    std::mt19937_64 rng = stream_rng(seed, stream, i);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = dp_convex_hull_point(s, config, rng, shared);
    const auto t1 = std::chrono::steady_clock::now();
    out[i] = outcome_from(s, r);
    out[i].seconds = std::chrono::duration<double>(t1 - t0).count();
  });
  return out;
}

std::vector<SweepRow> utility_sweep(const ExperimentConfig& config) {
  const std::vector<std::size_t> ns = config.ns.empty() ? std::vector<std::size_t>{config.dataset.n} : config.ns;
  const std::vector<double> eps = config.epsilons.empty() ? std::vector<double>{config.epsilon} : config.epsilons;
  const std::vector<std::int64_t> denoms =
      config.denoms.empty() ? std::vector<std::int64_t>{config.dataset.denom} : config.denoms;
  const std::vector<Mode> modes = config.modes.empty() ? std::vector<Mode>{config.mode} : config.modes;

  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (std::size_t n : ns) {
    for (std::int64_t denom : denoms) {
      DatasetSpec spec = config.dataset;
      spec.n = n;
      spec.denom = denom;
      std::mt19937_64 data_rng = stream_rng(config.seed, 1, n * 1000003ULL + static_cast<std::uint64_t>(denom));
      const GridDataset s = generate_dataset(spec, data_rng);
      AnalysisCache cache;
      for (double e : eps) {
        for (Mode mode : modes) {
          ExperimentConfig c = config;
          c.epsilon = e;
          c.mode = mode;
          const std::vector<TrialOutcome> runs =
              run_trials(s, mechanism_config(c, s.dim()), config.trials, config.seed, 2 + cell++, &cache);
          SweepRow row;
          row.n = n;
          row.epsilon = e;
          row.denom = denom;
          row.mode = mode;
          row.trials = runs.size();
          std::size_t inside = 0, failed = 0, depth = 0;
          double seconds = 0.0;
          for (const TrialOutcome& o : runs) {
            inside += o.inside ? 1 : 0;
            failed += o.failed ? 1 : 0;
            depth += o.depth;
            seconds += o.seconds;
          }
          const double t = std::max<double>(1.0, static_cast<double>(runs.size()));
          row.success_rate = static_cast<double>(inside) / t;
          row.failure_rate = static_cast<double>(failed) / t;
          row.mean_depth = static_cast<double>(depth) / t;
          row.mean_seconds = seconds / t;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

Json to_json(const std::vector<SweepRow>& rows, const ExperimentConfig& config) {
  Json table = Json::array();
  for (const SweepRow& r : rows) {
    table.push_back({{"n", r.n},
                     {"epsilon", r.epsilon},
                     {"denom", r.denom},
                     {"mode", to_string(r.mode)},
                     {"trials", r.trials},
                     {"success_rate", r.success_rate},
                     {"mean_depth", r.mean_depth},
                     {"failure_rate", r.failure_rate}});
  }
  return {{"kind", "sweep"}, {"build", build_id()}, {"seed", config.seed}, {"config", to_json(config)}, {"rows", table}};
}

namespace {

std::string csv_header(const ExperimentConfig& config) {
  return "# build: " + build_id() + "\n# seed: " + std::to_string(config.seed) +
         "\n# config: " + to_json(config).dump() + "\n";
}

}  // namespace

std::string sweep_timing_csv(const std::vector<SweepRow>& rows, const ExperimentConfig& config) {
  std::ostringstream os;
  os << csv_header(config) << "n,epsilon,denom,mode,trials,mean_seconds\n";
  for (const SweepRow& r : rows) {
    os << r.n << ',' << r.epsilon << ',' << r.denom << ',' << to_string(r.mode) << ',' << r.trials << ','
       << r.mean_seconds << '\n';
  }
  return os.str();
}

ClopperPearson clopper_pearson(std::size_t hits, std::size_t trials, double confidence) {
  ClopperPearson cp;
  if (trials == 0) return cp;
  const double a = 0.5 * (1.0 - confidence);
  const double k = static_cast<double>(hits);
  const double t = static_cast<double>(trials);
  cp.lower = hits == 0 ? 0.0 : boost::math::ibeta_inv(k, t - k + 1.0, a);
  cp.upper = hits == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, t - k, 1.0 - a);
  return cp;
}

AnalyticAudit analytic_audit(const GridDataset& s, const GridDataset& t, double epsilon) {
  AnalyticAudit a;
  a.epsilon = epsilon;
  const RegionLadder ls = build_ladder(s);
  const RegionLadder lt = build_ladder(t);
  const LambdaWeights ws = lambda_weights(ls.volumes, epsilon);
  const LambdaWeights wt = lambda_weights(lt.volumes, epsilon);
  const std::size_t levels = std::max(ws.lambda.size(), wt.lambda.size());
  a.level_max_log_ratio = 0.0;
  for (std::size_t l = 0; l < levels; ++l) {
    const HighFloat ps = l < ws.lambda.size() ? ws.lambda[l] : HighFloat(0);
    const HighFloat pt = l < wt.lambda.size() ? wt.lambda[l] : HighFloat(0);
    a.lambda_s.push_back(ps.convert_to<double>());
    a.lambda_t.push_back(pt.convert_to<double>());
    if (ps == 0 && pt == 0) continue;
    if (ps == 0 || pt == 0) {
      a.level_max_log_ratio = kInf;
      continue;
    }
    const double r = abs(log(ps) - log(pt)).convert_to<double>();
    a.level_max_log_ratio = std::max(a.level_max_log_ratio, r);
  }
  a.level_within = a.level_max_log_ratio <= epsilon * (1.0 + 1e-12);

  auto log_normalizer = [epsilon](const std::vector<Rational>& v) {
    HighFloat z = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Rational next = k + 1 < v.size() ? v[k + 1] : Rational(0);
      z += exp(HighFloat(epsilon * static_cast<double>(k) / 2.0)) * to_high(v[k] - next);
    }
    return log(z);
  };
  a.normalizer_log_ratio = (log_normalizer(ls.volumes) - log_normalizer(lt.volumes)).convert_to<double>();
  a.normalizer_within = std::abs(a.normalizer_log_ratio) <= epsilon / 2.0 * (1.0 + 1e-12);
  return a;
}

namespace {

std::string cell_key(const std::optional<RationalPoint>& p, std::int64_t cells) {
  if (!p) return "failure";
  std::ostringstream os;
  os << "cell=(";
  for (Eigen::Index i = 0; i < p->size(); ++i) {
    const Rational scaled = (*p)[i] * Rational(cells);
    Integer q = numerator(scaled) / denominator(scaled);
    if (numerator(scaled) < 0 && q * denominator(scaled) != numerator(scaled)) q -= 1;
    std::int64_t idx = std::clamp<std::int64_t>(q.convert_to<std::int64_t>(), 0, cells - 1);
    os << (i ? "," : "") << idx;
  }
  os << ")";
  return os.str();
}

// log((p_lo - delta) / p_hi) - eps with the conservative ends of both bands.
double event_slack(const ClopperPearson& a, const ClopperPearson& b, double eps, double delta) {
  const double num = a.lower - delta;
  if (num <= 0.0) return -kInf;
  return std::log(num) - std::log(b.upper) - eps;
}

}  // namespace

AuditReport privacy_audit(const GridDataset& s, const GridDataset& t, const ExperimentConfig& config,
                          const std::string& description) {
  if (s.dim() != t.dim() || s.denom() != t.denom() || s.size() != t.size()) {
    throw InfeasibleParams("audit datasets must share dimension, denominator and size");
  }
  AuditReport report;
  report.description = description;
  report.trials = config.trials;
  report.epsilon = config.epsilon;
  report.delta = config.delta;
  report.confidence = config.confidence;
  const std::int64_t cells =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(config.cell_factor * static_cast<double>(s.denom()))));
  report.cell_size = 1.0 / static_cast<double>(cells);

  const MechanismConfig mech = mechanism_config(config, s.dim());
  const std::vector<TrialOutcome> rs = run_trials(s, mech, config.trials, config.seed, 1);
  const std::vector<TrialOutcome> rt = run_trials(t, mech, config.trials, config.seed, 2);

  const SubspaceCensus cs = subspace_census(s);
  const SubspaceCensus ct = subspace_census(t);
  double census_shift = 0.0;
  for (int i = 0; i < s.dim(); ++i) {
    census_shift += std::abs(static_cast<double>(cs.maxima[static_cast<std::size_t>(i)]) -
                             static_cast<double>(ct.maxima[static_cast<std::size_t>(i)]));
  }
  const double eps_dimension = mech.budget.epsilon_noise * census_shift;

  struct Family {
    std::string name;
    std::function<std::string(const TrialOutcome&)> key;
    double eps;
    double delta;
  };
  const std::vector<Family> families = {
      {"output", [cells](const TrialOutcome& o) { return cell_key(o.point, cells); }, config.epsilon, config.delta},
      {"dimension", [](const TrialOutcome& o) { return o.dimension_event; }, eps_dimension, 0.0},
      {"selection", [](const TrialOutcome& o) { return o.selection_event; },
       eps_dimension + mech.budget.epsilon_select, 0.0},
      {"level", [](const TrialOutcome& o) { return o.level_event; }, config.epsilon, config.delta},
  };

  for (const Family& fam : families) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const TrialOutcome& o : rs) ++counts[fam.key(o)].first;
    for (const TrialOutcome& o : rt) ++counts[fam.key(o)].second;
    double max_slack = -kInf;
    double max_ratio = 0.0;
    for (const auto& [key, c] : counts) {
      if (key.empty()) continue;
      AuditEvent ev;
      ev.family = fam.name;
      ev.key = key;
      ev.count_s = c.first;
      ev.count_t = c.second;
      ev.epsilon_allowed = fam.eps;
      ev.delta_allowed = fam.delta;
      if (c.first == 0 || c.second == 0) {
        ev.log_ratio = c.first == c.second ? 0.0 : (c.first > 0 ? kInf : -kInf);
      } else {
        ev.log_ratio = std::log(static_cast<double>(c.first)) - std::log(static_cast<double>(c.second));
        max_ratio = std::max(max_ratio, std::abs(ev.log_ratio));
      }
      const ClopperPearson bs = clopper_pearson(c.first, rs.size(), config.confidence);
      const ClopperPearson bt = clopper_pearson(c.second, rt.size(), config.confidence);
      ev.slack = std::max(event_slack(bs, bt, fam.eps, fam.delta), event_slack(bt, bs, fam.eps, fam.delta));
      max_slack = std::max(max_slack, ev.slack);
      report.events.push_back(ev);
    }
    report.max_slack[fam.name] = max_slack;
    report.max_log_ratio[fam.name] = max_ratio;
    if ((fam.name == "output" || fam.name == "dimension") && max_slack > 0.0) report.violation = true;
  }

  if (config.mode == Mode::kExact) report.analytic = analytic_audit(s, t, mech.budget.epsilon_base);
  return report;
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const AuditReport& r, const ExperimentConfig& config) {
  Json events = Json::array();
  for (const AuditEvent& e : r.events) {
    events.push_back({{"family", e.family},
                      {"key", e.key},
                      {"count_s", e.count_s},
                      {"count_t", e.count_t},
                      {"epsilon_allowed", e.epsilon_allowed},
                      {"delta_allowed", e.delta_allowed},
                      {"log_ratio", finite_or_null(e.log_ratio)},
                      {"slack", finite_or_null(e.slack)}});
  }
  Json slack = Json::object();
  for (const auto& [k, v] : r.max_slack) slack[k] = finite_or_null(v);
  Json ratio = Json::object();
  for (const auto& [k, v] : r.max_log_ratio) ratio[k] = v;
  Json j = {{"kind", "audit"},
            {"build", build_id()},
            {"seed", config.seed},
            {"config", to_json(config)},
            {"description", r.description},
            {"cell_size", r.cell_size},
            {"trials", r.trials},
            {"epsilon", r.epsilon},
            {"delta", r.delta},
            {"confidence", r.confidence},
            {"events", events},
            {"max_slack", slack},
            {"max_log_ratio", ratio},
            {"violation_flagged", r.violation},
            {"note", "finite trials cannot certify privacy; flags are statistical"}};
  if (r.analytic) {
    const AnalyticAudit& a = *r.analytic;
    j["analytic"] = {{"epsilon", a.epsilon},
                     {"lambda_s", a.lambda_s},
                     {"lambda_t", a.lambda_t},
                     {"level_max_log_ratio", finite_or_null(a.level_max_log_ratio)},
                     {"level_within", a.level_within},
                     {"normalizer_log_ratio", a.normalizer_log_ratio},
                     {"normalizer_within", a.normalizer_within}};
  }
  return j;
}

double loglog_slope(const std::vector<std::size_t>& ns, const std::vector<double>& seconds) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size() && i < seconds.size(); ++i) {
    if (ns[i] == 0 || !(seconds[i] > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(ns[i])));
    ys.push_back(std::log(seconds[i]));
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

BenchResult bench(const ExperimentConfig& config) {
  BenchResult result;
  result.outputs = Json::array();
  const std::size_t reps = std::max<std::size_t>(1, config.repetitions);
  std::map<std::string, std::vector<double>> per_stage;
  const std::vector<std::string> stages = {"hyperplane_table", "census", "max_depth", "ladder", "base_case", "full_run"};

  for (std::size_t n : config.bench_ns) {
    DatasetSpec spec = config.dataset;
    spec.n = n;
    std::mt19937_64 data_rng = stream_rng(config.seed, 1, n);
    const GridDataset s = generate_dataset(spec, data_rng);
    std::map<std::string, double> best;
    for (const std::string& st : stages) best[st] = kInf;
    Json out;
    for (std::size_t r = 0; r < reps; ++r) {
      auto timed = [&](const std::string& stage, auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best[stage] = std::min(best[stage], std::chrono::duration<double>(t1 - t0).count());
      };
      std::shared_ptr<HyperplaneTable> table;
      timed("hyperplane_table", [&] { table = std::make_shared<HyperplaneTable>(build_hyperplane_table(s)); });
      SubspaceCensus census;
      timed("census", [&] { census = subspace_census(s, *table); });
      std::size_t td = 0;
      timed("max_depth", [&] { td = max_tukey_depth(s, *table); });
      RegionLadder ladder;
      timed("ladder", [&] { ladder = build_ladder(s, table); });
      BaseCaseResult base;
      std::mt19937_64 base_rng = stream_rng(config.seed, 2, n);
      timed("base_case", [&] { base = run_base_case_exact(ladder, config.epsilon / 2.0, base_rng); });
      RunResult run;
      std::mt19937_64 run_rng = stream_rng(config.seed, 3, n);
      const MechanismConfig mech = mechanism_config(config, s.dim());
      timed("full_run", [&] { run = dp_convex_hull_point(s, mech, run_rng); });
      if (r == 0) {
        Json vols = Json::array();
        for (const Rational& v : ladder.volumes) vols.push_back(to_string(v));
        out = {{"n", n},
               {"planes", table->planes.size()},
               {"maxima", census.maxima},
               {"td_max", td},
               {"volumes", vols},
               {"base_level", base.level},
               {"base_point", to_json(base.point)},
               {"run", to_json(run.transcript)}};
      }
    }
    result.outputs.push_back(out);
    for (const std::string& st : stages) {
      result.rows.push_back({st, n, best[st]});
      per_stage[st].push_back(best[st]);
    }
  }
  for (const std::string& st : stages) result.slopes[st] = loglog_slope(config.bench_ns, per_stage[st]);
  return result;
}

std::string bench_csv(const BenchResult& r, const ExperimentConfig& config) {
  std::ostringstream os;
  os.precision(9);
  os << csv_header(config) << "stage,n,seconds\n";
  for (const BenchRow& row : r.rows) os << row.stage << ',' << row.n << ',' << row.seconds << '\n';
  for (const auto& [stage, slope] : r.slopes) os << "# slope " << stage << ": " << slope << '\n';
  return os.str();
}

Json to_json(const BenchResult& r, const ExperimentConfig& config) {
  Json stages = Json::array();
  for (const auto& [stage, slope] : r.slopes) stages.push_back(stage);
  return {{"kind", "bench"},
          {"build", build_id()},
          {"seed", config.seed},
          {"config", to_json(config)},
          {"stages", stages},
          {"outputs", r.outputs},
          {"timing", "see CSV"}};
}

}  // namespace dphull
