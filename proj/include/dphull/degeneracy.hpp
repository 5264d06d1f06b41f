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


// Private detection of low-dimensional concentration and the recursive
// driver: noisy counts of the largest spanned flats, private selection of a
// flat, projection into it, and the base case in the final space.

#ifndef DPHULL_DEGENERACY_HPP_
#define DPHULL_DEGENERACY_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dphull/approx_volume.hpp"
#include "dphull/exp_mechanism.hpp"
#include "dphull/geometry.hpp"
#include "dphull/tukey.hpp"

namespace dphull {

// Affine spans of point subsets of S, by dimension, with their counts.
struct SubspaceCensus {
  int dim = 0;
  std::size_t n = 0;
  // by_dim[i]: distinct spanned subspaces of dimension i, sorted, each with
  // count() (with multiplicity) and a spanning witness (indices into S).
  std::vector<std::vector<AffineSubspace>> by_dim;
  // maxima[i] = max count over spanned subspaces of dimension <= i.
  std::vector<std::size_t> maxima;

  // Null when f is not spanned by points of S.
  const AffineSubspace* find(const AffineSubspace& f) const;
};

SubspaceCensus subspace_census(const GridDataset& s);
// Reuses the spanned hyperplanes for dimension d-1.
SubspaceCensus subspace_census(const GridDataset& s, const HyperplaneTable& table);

// -b sign(u) ln(1 - 2|u|) for u in (-1/2, 1/2).
double laplace_from_uniform(double u, double b);
double laplace_noise(double b, std::mt19937_64& rng);

struct DimensionChoice {
  bool base_case = true;
  int j = -1;
  std::vector<double> thresholds;  // n - (d-j+1)k - log(2/beta)/eps_noise
};

DimensionChoice choose_dimension(const std::vector<double>& noisy_maxima, std::size_t n,
                                 double k, int dim, double epsilon_noise, double beta);

struct ScoredSubspace {
  const AffineSubspace* subspace = nullptr;
  std::size_t score = 0;
};

// c(f) for j = 0, max(0, c(f) - M_{j-1}) otherwise, over spanned f of dim j.
std::vector<ScoredSubspace> subspace_scores(const SubspaceCensus& census, int j);
// Score of an arbitrary j-flat; zero when it is not spanned by points of S.
std::size_t subspace_score(const SubspaceCensus& census, const AffineSubspace& f);

struct Selection {
  std::optional<AffineSubspace> subspace;  // empty on Failure
  std::size_t score = 0;                   // class drawn
  HighFloat log_dummies;                   // log N_0 (N_0 = X^{d(j+1)} - #positive)
  HighFloat failure_probability;
};

// Exponential mechanism over X^{d(j+1)} candidates with weights
// e^{eps s / 4}; class 0 means Failure.
Selection select_subspace(const std::vector<ScoredSubspace>& scores, int j, std::int64_t denom,
                          int dim, double epsilon_select, std::mt19937_64& rng);

enum class Mode { kExact, kApprox };

struct BudgetSplit {
  double epsilon_total = 1.0;
  double delta_total = 0.0;
  double epsilon_noise = 0.0;
  double epsilon_select = 0.0;
  double epsilon_base = 0.0;
  double beta = 0.1;
  Mode mode = Mode::kExact;

  // eps_noise = eps/(4d^2), eps_select = eps/(4d), eps_base = eps/2.
  static BudgetSplit standard(double epsilon, double delta, double beta, int dim,
                              Mode mode = Mode::kExact);
  // d^2 eps_noise + d eps_select + eps_base <= eps_total.
  bool composes(int dim) const;
};

struct MechanismConfig {
  BudgetSplit budget;
  ApproxConfig approx;
  std::size_t min_n = 1;
  // Multiplies every Laplace scale; values below 1 break the privacy claim
  // and exist only to test the auditor.
  double noise_scale_factor = 1.0;
  // Runs the exact base case when an approximate estimate fails; the outcome
  // then no longer carries the (eps, delta) claim and is flagged.
  bool exact_fallback = false;
};

struct SelectionRecord {
  int j = 0;
  std::size_t count = 0;
  std::size_t score = 0;
  std::vector<std::size_t> witness;
  RationalPoint base;
  RationalMatrix basis;
  std::vector<int> projection_coords;
  double failure_probability = 0.0;
};

struct LevelRecord {
  int dim = 0;
  std::size_t n = 0;
  std::vector<std::size_t> maxima;
  std::vector<double> noisy_maxima;
  std::vector<double> thresholds;
  bool base_case = false;
  std::optional<SelectionRecord> selection;
};

struct BaseRecord {
  Mode mode = Mode::kExact;
  int dim = 0;
  std::size_t n = 0;
  std::size_t level = 0;
  std::size_t td_max = 0;
  std::vector<double> lambda;
  std::vector<std::string> volumes;  // exact rationals (exact mode)
  std::optional<ApproxBaseResult> approx;
  bool fallback_used = false;
};

enum class RunStatus { kSuccess, kFailure };

struct RunTranscript {
  BudgetSplit budget;
  double k = 0.0;
  double noise_scale_factor = 1.0;
  std::vector<LevelRecord> levels;
  std::optional<BaseRecord> base;
  RunStatus status = RunStatus::kSuccess;
  std::string failure_reason;
  std::optional<RationalPoint> output;
  int final_dim = 0;
};

// Per-dataset work shared across runs: the spanned hyperplanes, the census
// and the exact region ladder.
class AnalysisCache {
 public:
  struct Entry {
    std::shared_ptr<const HyperplaneTable> table;
    std::shared_ptr<const SubspaceCensus> census;
    std::shared_ptr<const RegionLadder> ladder;  // built on first exact base case
  };

  std::shared_ptr<const HyperplaneTable> table(const GridDataset& s);
  std::shared_ptr<const SubspaceCensus> census(const GridDataset& s);
  std::shared_ptr<const RegionLadder> ladder(const GridDataset& s);
  std::size_t size() const;

 private:
  Entry& entry(const std::string& key);
  static std::string key(const GridDataset& s);

  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
};

struct RunResult {
  std::optional<RationalPoint> point;  // empty on Failure
  RunTranscript transcript;
};

RunResult dp_convex_hull_point(const GridDataset& s, const MechanismConfig& config,
                               std::mt19937_64& rng, AnalysisCache* cache = nullptr);

}  // namespace dphull

#endif  // DPHULL_DEGENERACY_HPP_
