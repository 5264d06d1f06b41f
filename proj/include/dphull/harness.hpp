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


// Dataset families, seeded trial streams and the experiment drivers: utility
// sweeps, the empirical privacy audit and stage benchmarks.

#ifndef DPHULL_HARNESS_HPP_
#define DPHULL_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dphull/degeneracy.hpp"
#include "dphull/geometry.hpp"
#include "dphull/io.hpp"

namespace dphull {

enum class Family {
  kUniformGrid,
  kClustered,
  kCollinear,
  kCoplanar,
  kDuplicatedPoint,
  kAdversarialNearDegenerate,
};

std::string to_string(Family f);
Family parse_family(const std::string& s);

struct DatasetSpec {
  Family family = Family::kUniformGrid;
  int dim = 2;
  std::int64_t denom = 16;
  std::size_t n = 64;
  double fraction = 1.0;        // share placed on the flat (degenerate families)
  std::size_t multiplicity = 1; // duplicated-point family
  std::size_t clusters = 3;
  std::int64_t spread = 1;      // clustered family: offsets in [-spread, spread]
};

// Throws InfeasibleParams.
GridDataset generate_dataset(const DatasetSpec& spec, std::mt19937_64& rng);

// Independent stream for (seed, stream, counter).
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// DPHULL_THREADS, default 1.
std::size_t thread_count();
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

struct ExperimentConfig {
  DatasetSpec dataset;
  double epsilon = 1.0;
  double delta = 0.0;
  double beta = 0.1;
  Mode mode = Mode::kExact;
  double noise_scale_factor = 1.0;
  double alpha_scale = 0.25;
  std::size_t chain_steps = 0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string output;
  // Sweep grid; an empty axis uses the single value above.
  std::vector<std::size_t> ns;
  std::vector<double> epsilons;
  std::vector<std::int64_t> denoms;
  std::vector<Mode> modes;
  // Audit.
  double cell_factor = 4.0;  // cells of side 1/(cell_factor X)
  double confidence = 0.9973;
  // Bench.
  std::vector<std::size_t> bench_ns = {16, 32, 64};
  std::size_t repetitions = 3;
};

Json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const Json& j);
MechanismConfig mechanism_config(const ExperimentConfig& c, int dim);

struct TrialOutcome {
  bool failed = false;
  std::string failure_reason;
  std::optional<RationalPoint> point;
  std::size_t depth = 0;
  bool inside = false;
  double seconds = 0.0;
  std::string dimension_event;  // "base" or "recurse:j"
  std::string selection_event;  // "", "failure" or the selected flat
  std::string level_event;      // "", or "level:l" of the base case
  int final_dim = 0;
};

std::vector<TrialOutcome> run_trials(const GridDataset& s, const MechanismConfig& config,
                                     std::size_t trials, std::uint64_t seed,
                                     std::uint64_t stream, AnalysisCache* cache = nullptr);

struct SweepRow {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::int64_t denom = 0;
  Mode mode = Mode::kExact;
  std::size_t trials = 0;
  double success_rate = 0.0;
  double mean_depth = 0.0;  // failures count as depth 0
  double failure_rate = 0.0;
  double mean_seconds = 0.0;
};

std::vector<SweepRow> utility_sweep(const ExperimentConfig& config);
// Timing is left out so that equal seeds give equal bytes.
Json to_json(const std::vector<SweepRow>& rows, const ExperimentConfig& config);
std::string sweep_timing_csv(const std::vector<SweepRow>& rows, const ExperimentConfig& config);

struct ClopperPearson {
  double lower = 0.0;
  double upper = 1.0;
};
ClopperPearson clopper_pearson(std::size_t hits, std::size_t trials, double confidence);

struct AuditEvent {
  std::string family;  // output | dimension | selection | level
  std::string key;
  std::size_t count_s = 0;
  std::size_t count_t = 0;
  double epsilon_allowed = 0.0;
  double delta_allowed = 0.0;
  double log_ratio = 0.0;  // raw, S over S'; infinite when one count is zero
  double slack = 0.0;      // conservative excess over epsilon_allowed, both directions
};

struct AnalyticAudit {
  double epsilon = 0.0;
  std::vector<double> lambda_s, lambda_t;
  double level_max_log_ratio = 0.0;  // infinite when the supports differ
  bool level_within = false;
  double normalizer_log_ratio = 0.0;  // log Z_S - log Z_S'
  bool normalizer_within = false;     // |.| <= epsilon / 2
};

// Level-choice distributions of the exact base case for both datasets.
AnalyticAudit analytic_audit(const GridDataset& s, const GridDataset& t, double epsilon);

struct AuditReport {
  std::string description;
  double cell_size = 0.0;
  std::size_t trials = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double confidence = 0.0;
  std::vector<AuditEvent> events;
  std::map<std::string, double> max_slack;      // per family
  std::map<std::string, double> max_log_ratio;  // per family, finite ratios only
  // Output cells and the top-level dimension choice; the level and the
  // selected flat are latent and reported only.
  bool violation = false;
  std::optional<AnalyticAudit> analytic;
};

AuditReport privacy_audit(const GridDataset& s, const GridDataset& t, const ExperimentConfig& config,
                          const std::string& description = "");
Json to_json(const AuditReport& r, const ExperimentConfig& config);

struct BenchRow {
  std::string stage;
  std::size_t n = 0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::map<std::string, double> slopes;  // log-log fit per stage
  Json outputs;                          // non-timing results per n
};

BenchResult bench(const ExperimentConfig& config);
double loglog_slope(const std::vector<std::size_t>& ns, const std::vector<double>& seconds);
std::string bench_csv(const BenchResult& r, const ExperimentConfig& config);
Json to_json(const BenchResult& r, const ExperimentConfig& config);

}  // namespace dphull

#endif  // DPHULL_HARNESS_HPP_
