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


// dp-hull command line: dataset generation, exact geometry queries, the
// private mechanism and the experiment drivers. JSON goes to stdout or --out.
// Exit status: 0 on success, 2 when the mechanism returns Failure, 1 on
// errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dphull/approx_volume.hpp"
#include "dphull/degeneracy.hpp"
#include "dphull/exp_mechanism.hpp"
#include "dphull/harness.hpp"
#include "dphull/io.hpp"
#include "dphull/oracle.hpp"
#include "dphull/polytope.hpp"
#include "dphull/tukey.hpp"

namespace {

using namespace dphull;

constexpr int kExitError = 1;
constexpr int kExitFailure = 2;

// Flags shared by the experiment subcommands. A --config file supplies the
// base values; flags given on the command line override them.
struct Common {
  std::string config_path;
  std::string dataset_path;
  std::string out;
  std::uint64_t seed = 0;
  std::string family;
  int dim = 0;
  std::int64_t denom = 0;
  std::size_t n = 0;
  double fraction = -1.0;
  std::size_t multiplicity = 0;
  double epsilon = 0.0;
  double delta = -1.0;
  double beta = 0.0;
  std::string mode;
  double alpha_scale = 0.0;
  std::size_t chain_steps = 0;
  std::size_t trials = 0;
  double noise_scale_factor = 0.0;
};

struct Options {
  CLI::Option* seed = nullptr;
};

Options add_common(CLI::App* cmd, Common& c, bool seed_required, bool mechanism) {
  Options o;
  cmd->add_option("--config", c.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output path (default stdout)");
  o.seed = cmd->add_option("--seed", c.seed, "Master seed");
  if (seed_required) o.seed->required();
  cmd->add_option("--family", c.family, "Dataset family");
  cmd->add_option("--dim", c.dim, "Dimension d")->check(CLI::PositiveNumber);
  cmd->add_option("--denom", c.denom, "Grid denominator X")->check(CLI::PositiveNumber);
  cmd->add_option("--n", c.n, "Number of points")->check(CLI::PositiveNumber);
  cmd->add_option("--fraction", c.fraction, "Share of points on the flat")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--multiplicity", c.multiplicity, "Copies of the duplicated point");
  if (mechanism) {
    cmd->add_option("--dataset", c.dataset_path, "Dataset JSON; generated from the config when absent")
        ->check(CLI::ExistingFile);
    cmd->add_option("--epsilon", c.epsilon, "Privacy budget")->check(CLI::PositiveNumber);
    cmd->add_option("--delta", c.delta, "Privacy delta (approximate mode)");
    cmd->add_option("--beta", c.beta, "Failure parameter of the dimension test");
    cmd->add_option("--mode", c.mode, "exact or approx")->check(CLI::IsMember({"exact", "approx"}));
    cmd->add_option("--alpha-scale", c.alpha_scale, "alpha = scale * epsilon (approximate mode)");
    cmd->add_option("--chain-steps", c.chain_steps, "Fixed hit-and-run length (approximate mode)");
    cmd->add_option("--trials", c.trials, "Independent runs per cell");
    cmd->add_option("--noise-scale-factor", c.noise_scale_factor,
                    "Laplace scale multiplier; below 1 breaks privacy (auditor testing only)");
  }
  return o;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InfeasibleParams("cannot open " + path);
  try {
    Json j;
    in >> j;
    return j;
  } catch (const Json::exception& e) {
    throw InfeasibleParams(path + ": " + e.what());
  }
}

ExperimentConfig resolve(Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    const Json j = read_json_file(c.config_path);
    cfg = experiment_config_from_json(j);
    if (c.dataset_path.empty()) c.dataset_path = j.value("dataset_path", std::string());
  }
  cfg.seed = c.seed;
  if (!c.family.empty()) cfg.dataset.family = parse_family(c.family);
  if (c.dim > 0) cfg.dataset.dim = c.dim;
  if (c.denom > 0) cfg.dataset.denom = c.denom;
  if (c.n > 0) cfg.dataset.n = c.n;
  if (c.fraction >= 0.0) cfg.dataset.fraction = c.fraction;
  if (c.multiplicity > 0) cfg.dataset.multiplicity = c.multiplicity;
  if (c.epsilon > 0.0) cfg.epsilon = c.epsilon;
  if (c.delta >= 0.0) cfg.delta = c.delta;
  if (c.beta > 0.0) cfg.beta = c.beta;
  if (!c.mode.empty()) cfg.mode = parse_mode(c.mode);
  if (c.alpha_scale > 0.0) cfg.alpha_scale = c.alpha_scale;
  if (c.chain_steps > 0) cfg.chain_steps = c.chain_steps;
  if (c.trials > 0) cfg.trials = c.trials;
  if (c.noise_scale_factor > 0.0) cfg.noise_scale_factor = c.noise_scale_factor;
  if (!c.out.empty()) cfg.output = c.out;
  return cfg;
}

GridDataset obtain_dataset(const Common& c, const ExperimentConfig& cfg) {
  if (!c.dataset_path.empty()) return load_dataset(c.dataset_path);
  std::mt19937_64 rng = stream_rng(cfg.seed, 0, 0);
  return generate_dataset(cfg.dataset, rng);
}

void emit_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw InfeasibleParams("cannot write " + out);
  f << text;
}

void emit(const std::string& out, const Json& j) { emit_text(out, dump(j)); }

Json header(const std::string& kind, const ExperimentConfig& cfg) {
  return {{"kind", kind}, {"build", build_id()}, {"seed", cfg.seed}, {"config", to_json(cfg)}};
}

TukeyRegionH region_for(const GridDataset& s, std::size_t k, bool prune) {
  const TukeyRegionH h = critical_halfspaces(s, k);
  return prune ? prune_halfspaces(h) : h;
}

std::vector<std::vector<std::int64_t>> raw_points(const GridDataset& s) {
  std::vector<std::vector<std::int64_t>> out;
  for (const GridPoint& p : s.points()) out.emplace_back(p.data(), p.data() + p.size());
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Private points in the convex hull of grid data", "dp-hull"};
  app.require_subcommand(1);
  app.set_version_flag("--version", build_id());

  // generate
  Common gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a dataset");
  add_common(generate, gen, true, false);

  // depth
  std::string depth_dataset, depth_point;
  CLI::App* depth = app.add_subcommand("depth", "Tukey depth of a point");
  depth->add_option("--dataset", depth_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  depth->add_option("--point", depth_point, "Point, e.g. \"1/2,1/3\"")->required();

  // regions
  std::string regions_dataset, regions_out;
  std::size_t regions_k = 1;
  bool regions_no_prune = false;
  CLI::App* regions = app.add_subcommand("regions", "H-representation of D_{>=k}");
  regions->add_option("--dataset", regions_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  regions->add_option("--k", regions_k, "Depth level")->required();
  regions->add_flag("--no-prune", regions_no_prune, "Keep every critical halfspace");
  regions->add_option("--out", regions_out, "Output path");

  // volume
  std::string volume_dataset, volume_out, volume_mode = "exact";
  std::size_t volume_k = 1;
  double volume_alpha = 0.1, volume_beta = 0.1;
  std::uint64_t volume_seed = 0;
  CLI::App* volume_cmd = app.add_subcommand("volume", "Volume of D_{>=k}");
  volume_cmd->add_option("--dataset", volume_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  volume_cmd->add_option("--k", volume_k, "Depth level")->required();
  volume_cmd->add_option("--mode", volume_mode, "exact or approx")->check(CLI::IsMember({"exact", "approx"}));
  volume_cmd->add_option("--alpha", volume_alpha, "Relative accuracy (approx)");
  volume_cmd->add_option("--beta", volume_beta, "Failure probability (approx)");
  CLI::Option* volume_seed_opt = volume_cmd->add_option("--seed", volume_seed, "Seed (approx)");
  volume_cmd->add_option("--out", volume_out, "Output path");

  // sample
  std::string sample_dataset, sample_out, sample_mode = "exact";
  std::size_t sample_k = 1, sample_count = 1, sample_steps = 0;
  double sample_eta = 0.01;
  std::uint64_t sample_seed = 0;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Uniform samples of D_{>=k}");
  sample_cmd->add_option("--dataset", sample_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--k", sample_k, "Depth level")->required();
  sample_cmd->add_option("--count", sample_count, "Number of samples");
  sample_cmd->add_option("--mode", sample_mode, "exact or approx")->check(CLI::IsMember({"exact", "approx"}));
  sample_cmd->add_option("--eta", sample_eta, "Total-variation target (approx)");
  sample_cmd->add_option("--chain-steps", sample_steps, "Fixed hit-and-run length (approx)");
  sample_cmd->add_option("--seed", sample_seed, "Seed")->required();
  sample_cmd->add_option("--out", sample_out, "Output path");

  // run
  Common run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the private mechanism once");
  add_common(run_cmd, run, true, true);

  // audit
  Common audit;
  std::size_t audit_index = 0;
  std::string audit_point;
  CLI::App* audit_cmd = app.add_subcommand("audit", "Empirical privacy audit on a neighboring pair");
  add_common(audit_cmd, audit, true, true);
  audit_cmd->add_option("--replace-index", audit_index, "Index of the replaced point");
  audit_cmd->add_option("--replace-with", audit_point, "Grid numerators of the new point, e.g. \"16,16\"");

  // sweep
  Common sweep;
  std::string sweep_csv;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Utility sweep");
  add_common(sweep_cmd, sweep, true, true);
  sweep_cmd->add_option("--timing-csv", sweep_csv, "Per-cell runtime CSV");

  // bench
  Common bench_opts;
  std::string bench_json;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Stage timings across the n grid (CSV)");
  add_common(bench_cmd, bench_opts, false, true);
  bench_cmd->add_option("--json", bench_json, "Non-timing outputs as JSON");

  // oracle
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Brute-force references");
  oracle_cmd->require_subcommand(1);
  std::string od_dataset, od_point;
  CLI::App* oracle_depth = oracle_cmd->add_subcommand("depth", "Depth by exhaustive hull tests");
  oracle_depth->add_option("--dataset", od_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  oracle_depth->add_option("--point", od_point, "Point")->required();
  std::string ov_dataset, ov_out;
  std::size_t ov_k = 1, ov_samples = 2000;
  std::uint64_t ov_seed = 0;
  CLI::App* oracle_volume = oracle_cmd->add_subcommand("volume", "Monte Carlo volume of D_{>=k}");
  oracle_volume->add_option("--dataset", ov_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  oracle_volume->add_option("--k", ov_k, "Depth level")->required();
  oracle_volume->add_option("--samples", ov_samples, "Monte Carlo samples");
  oracle_volume->add_option("--seed", ov_seed, "Seed")->required();
  oracle_volume->add_option("--out", ov_out, "Output path");
  std::string of_dataset, of_out;
  int of_refine = 2;
  CLI::App* oracle_field = oracle_cmd->add_subcommand("field", "Depth of every refined grid point");
  oracle_field->add_option("--dataset", of_dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  oracle_field->add_option("--refine", of_refine, "Refinement factor")->check(CLI::PositiveNumber);
  oracle_field->add_option("--out", of_out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (generate->parsed()) {
    const ExperimentConfig cfg = resolve(gen);
    const GridDataset s = obtain_dataset(gen, cfg);
    Json j = to_json(s);
    j["generator"] = header("dataset", cfg);
    emit(gen.out, j);
    return 0;
  }

  if (depth->parsed()) {
    const GridDataset s = load_dataset(depth_dataset);
    const RationalPoint p = parse_point(depth_point);
    if (p.size() != s.dim()) throw InfeasibleParams("point dimension does not match the dataset");
    std::cout << tukey_depth(p, s) << "\n";
    return 0;
  }

  if (regions->parsed()) {
    const GridDataset s = load_dataset(regions_dataset);
    Json j = to_json(region_for(s, regions_k, !regions_no_prune));
    j["pruned"] = !regions_no_prune;
    emit(regions_out, j);
    return 0;
  }

  if (volume_cmd->parsed()) {
    const GridDataset s = load_dataset(volume_dataset);
    Json j = {{"kind", "volume"}, {"build", build_id()}, {"k", volume_k}, {"mode", volume_mode}};
    if (volume_mode == "exact") {
      const Rational v = volume(region_for(s, volume_k, true));
      j["volume"] = {{"exact", to_string(v)}, {"approx", to_double(v)}};
    } else {
      if (volume_seed_opt->count() == 0) throw InfeasibleParams("--seed is required in approximate mode");
      std::mt19937_64 rng = stream_rng(volume_seed, 0, 0);
      const MembershipOracle oracle = build_oracle(s, volume_k);
      const InnerBall ball = inner_ball(s, volume_k);
      const RoundingMap map = round_body(oracle, to_double(ball.center), ball.radius, ball.outer_radius,
                                         volume_beta / 2.0, rng);
      const VolumeEstimate est = estimate_volume(oracle, map, ball, volume_alpha, volume_beta / 2.0, rng);
      j["seed"] = volume_seed;
      j["volume"] = {{"approx", est.value}};
      j["alpha"] = volume_alpha;
      j["beta"] = volume_beta;
      j["phases"] = est.phases;
      j["samples_per_phase"] = est.samples_per_phase;
      j["queries"] = oracle.queries();
    }
    emit(volume_out, j);
    return 0;
  }

  if (sample_cmd->parsed()) {
    const GridDataset s = load_dataset(sample_dataset);
    std::mt19937_64 rng = stream_rng(sample_seed, 0, 0);
    Json samples = Json::array();
    if (sample_mode == "exact") {
      const Triangulation tri = triangulate(vertex_enumeration(region_for(s, sample_k, true)));
      for (std::size_t i = 0; i < sample_count; ++i) samples.push_back(to_json(sample_uniform(tri, rng)));
    } else {
      const MembershipOracle oracle = build_oracle(s, sample_k);
      const InnerBall ball = inner_ball(s, sample_k);
      const RoundingMap map =
          round_body(oracle, to_double(ball.center), ball.radius, ball.outer_radius, 0.05, rng);
      SampleOptions opts;
      opts.fixed_steps = sample_steps;
      for (std::size_t i = 0; i < sample_count; ++i) {
        const Eigen::VectorXd x = approx_uniform_sample(oracle, map, sample_eta, rng, opts);
        samples.push_back(std::vector<double>(x.data(), x.data() + x.size()));
      }
    }
    emit(sample_out, {{"kind", "sample"},
                      {"build", build_id()},
                      {"seed", sample_seed},
                      {"k", sample_k},
                      {"mode", sample_mode},
                      {"samples", samples}});
    return 0;
  }

  if (run_cmd->parsed()) {
    const ExperimentConfig cfg = resolve(run);
    const GridDataset s = obtain_dataset(run, cfg);
    std::mt19937_64 rng = stream_rng(cfg.seed, 1, 0);
    const RunResult r = dp_convex_hull_point(s, mechanism_config(cfg, s.dim()), rng);
    Json j = header("run", cfg);
    j["dataset"] = to_json(s);
    j["transcript"] = to_json(r.transcript);
    j["status"] = r.point ? "success" : "failure";
    if (r.point) {
      j["output"] = to_json(*r.point);
      j["output_depth"] = tukey_depth(*r.point, s);
    }
    emit(run.out, j);
    return r.point ? 0 : kExitFailure;
  }

  if (audit_cmd->parsed()) {
    const ExperimentConfig cfg = resolve(audit);
    const GridDataset s = obtain_dataset(audit, cfg);
    if (audit_index >= s.size()) throw InfeasibleParams("--replace-index out of range");
    GridPoint p;
    if (!audit_point.empty()) {
      const RationalPoint r = parse_point(audit_point);
      if (r.size() != s.dim()) throw InfeasibleParams("replacement dimension does not match the dataset");
      p = GridPoint(s.dim());
      for (int i = 0; i < s.dim(); ++i) {
        if (denominator(r[i]) != 1) throw InfeasibleParams("replacement must be grid numerators");
        p[i] = numerator(r[i]).convert_to<std::int64_t>();
      }
    } else {
      // Moves the point to the far corner of the cube.
      p = GridPoint::Constant(s.dim(), s.denom());
      if (p == s.point(audit_index)) p.setZero();
    }
    const GridDataset t = s.with_replaced(audit_index, p);
    const std::string description = "point " + std::to_string(audit_index) + " replaced";
    const AuditReport report = privacy_audit(s, t, cfg, description);
    Json j = to_json(report, cfg);
    j["dataset_s"] = to_json(s);
    j["dataset_t"] = to_json(t);
    emit(audit.out, j);
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const ExperimentConfig cfg = resolve(sweep);
    const std::vector<SweepRow> rows = utility_sweep(cfg);
    emit(sweep.out, to_json(rows, cfg));
    if (!sweep_csv.empty()) emit_text(sweep_csv, sweep_timing_csv(rows, cfg));
    return 0;
  }

  if (bench_cmd->parsed()) {
    const ExperimentConfig cfg = resolve(bench_opts);
    const BenchResult r = bench(cfg);
    emit_text(bench_opts.out, bench_csv(r, cfg));
    if (!bench_json.empty()) emit(bench_json, to_json(r, cfg));
    return 0;
  }

  if (oracle_depth->parsed()) {
    const GridDataset s = load_dataset(od_dataset);
    const RationalPoint p = parse_point(od_point);
    if (p.size() != s.dim()) throw InfeasibleParams("point dimension does not match the dataset");
    std::vector<oracle::Point> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const RationalPoint r = s.rational_point(i);
      pts.emplace_back(r.data(), r.data() + r.size());
    }
    std::cout << oracle::depth_bruteforce(oracle::Point(p.data(), p.data() + p.size()), pts) << "\n";
    return 0;
  }

  if (oracle_volume->parsed()) {
    const GridDataset s = load_dataset(ov_dataset);
    std::vector<oracle::Point> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const RationalPoint r = s.rational_point(i);
      pts.emplace_back(r.data(), r.data() + r.size());
    }
    const oracle::Membership member = [&](const std::vector<double>& x) {
      oracle::Point q;
      for (double v : x) q.push_back(from_double(v));
      return oracle::depth_bruteforce(q, pts) >= ov_k;
    };
    std::mt19937_64 rng = stream_rng(ov_seed, 0, 0);
    const std::vector<double> lo(static_cast<std::size_t>(s.dim()), 0.0);
    const std::vector<double> hi(static_cast<std::size_t>(s.dim()), 1.0);
    const oracle::MonteCarloEstimate est = oracle::volume_montecarlo(member, lo, hi, ov_samples, rng);
    emit(ov_out, {{"kind", "oracle-volume"},
                  {"build", build_id()},
                  {"seed", ov_seed},
                  {"k", ov_k},
                  {"estimate", est.estimate},
                  {"lower", est.lower},
                  {"upper", est.upper},
                  {"hits", est.hits},
                  {"samples", est.samples}});
    return 0;
  }

  if (oracle_field->parsed()) {
    const GridDataset s = load_dataset(of_dataset);
    const auto field = oracle::depth_field(raw_points(s), s.denom(), s.dim(), of_refine);
    Json cells = Json::array();
    for (const auto& [num, d] : field) cells.push_back({{"point", num}, {"depth", d}});
    emit(of_out, {{"kind", "oracle-field"},
                  {"build", build_id()},
                  {"denom", s.denom() * of_refine},
                  {"cells", cells}});
    return 0;
  }
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "dp-hull: " << e.what() << "\n";
    return kExitError;
  }
}
