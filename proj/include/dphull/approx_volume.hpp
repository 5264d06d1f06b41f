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


// Membership-oracle access to depth regions, rounding, randomized volume
// estimation and almost-uniform sampling by hit-and-run, and the approximate
// two-stage base case built on them.

#ifndef DPHULL_APPROX_VOLUME_HPP_
#define DPHULL_APPROX_VOLUME_HPP_

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dphull/exp_mechanism.hpp"
#include "dphull/geometry.hpp"
#include "dphull/tukey.hpp"

namespace dphull {

// Floating evaluation of a list of closed halfspaces, rows normalized to unit
// length: x is a member iff a_i . x <= b_i for every row.
class MembershipOracle {
 public:
  MembershipOracle() = default;
  MembershipOracle(const std::vector<Halfspace>& halfspaces, int dim, std::size_t level = 0);

  bool query(const Eigen::VectorXd& x) const;
  int dim() const { return dim_; }
  std::size_t level() const { return level_; }
  std::size_t num_halfspaces() const { return static_cast<std::size_t>(a_.rows()); }
  std::size_t queries() const { return queries_; }
  void reset_queries() { queries_ = 0; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const Eigen::MatrixXd& rows() const { return a_; }
  const Eigen::VectorXd& rhs() const { return b_; }

 private:
  int dim_ = 0;
  std::size_t level_ = 0;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<Halfspace> halfspaces_;
  mutable std::size_t queries_ = 0;
};

MembershipOracle build_oracle(const GridDataset& s, std::size_t level);
MembershipOracle build_oracle(const HyperplaneTable& table, std::size_t level);

struct InnerBall {
  RationalPoint center;
  Rational radius_squared;  // exact
  double radius = 0.0;      // rounded down
  double outer_radius = 0.0;
  Eigen::MatrixXd vertices;  // one column per vertex; bounds the annealing schedule
};

// Center is the vertex average; radius is the distance from it to the
// nearest bounding hyperplane. Throws NotFullDimensional.
InnerBall inner_ball(const std::vector<Halfspace>& halfspaces, int dim);
InnerBall inner_ball(const VPolytope& poly);
InnerBall inner_ball(const GridDataset& s, std::size_t level);

// y = t (x - offset).
struct RoundingMap {
  Eigen::MatrixXd t;
  Eigen::MatrixXd t_inv;
  Eigen::VectorXd offset;
  double log_abs_det = 0.0;
  std::size_t rounds = 0;

  Eigen::VectorXd to_rounded(const Eigen::VectorXd& x) const { return t * (x - offset); }
  Eigen::VectorXd from_rounded(const Eigen::VectorXd& y) const { return offset + t_inv * y; }
};

struct WalkOptions {
  std::size_t walk_steps = 0;       // steps between recorded samples; 0 = d + 1
  std::size_t burn_in = 0;          // 0 = 20 d^2
  std::size_t bisection_steps = 24;
};

struct RoundingOptions {
  std::size_t samples = 0;  // per round; 0 = max(400, 60 d^2)
  std::size_t max_rounds = 12;
  WalkOptions walk;
};

RoundingMap round_body(const MembershipOracle& oracle, const Eigen::VectorXd& center,
                       double r, double outer, double beta, std::mt19937_64& rng,
                       const RoundingOptions& options = {});

// Covariance of hit-and-run samples of the rounded body.
Eigen::MatrixXd rounded_covariance(const MembershipOracle& oracle, const RoundingMap& map,
                                   std::size_t samples, std::mt19937_64& rng,
                                   const WalkOptions& walk = {});

struct VolumeEstimate {
  double value = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t phases = 0;
  std::size_t samples_per_phase = 0;
  std::size_t queries = 0;
  std::vector<double> ratios;
};

struct EstimateOptions {
  double safety = 1.5;
  std::size_t min_samples = 400;
  std::size_t max_samples = 400000;
  WalkOptions walk;
};

// Multiphase estimate over balls of radius rho_0 (1 + 1/d)^i around the
// inner-ball center. Throws EstimationFailed.
VolumeEstimate estimate_volume(const MembershipOracle& oracle, const RoundingMap& map,
                               const InnerBall& ball, double alpha, double beta,
                               std::mt19937_64& rng, const EstimateOptions& options = {});

struct SampleOptions {
  double steps_scale = 2.0;       // steps = ceil(scale d^3 log(1/eta)), at least min_steps
  std::size_t min_steps = 50;
  std::size_t fixed_steps = 0;    // overrides the formula when > 0
  std::size_t bisection_steps = 24;
};

// Point after a hit-and-run chain started at the rounding offset.
Eigen::VectorXd approx_uniform_sample(const MembershipOracle& oracle, const RoundingMap& map,
                                      double eta, std::mt19937_64& rng,
                                      const SampleOptions& options = {});
std::size_t sampler_steps(int dim, double eta, const SampleOptions& options);

struct ApproxConfig {
  double c_alpha = 0.25;
  double c_beta = 0.25;
  std::size_t chain_steps = 0;  // overrides the sampler step count when > 0
  RoundingOptions rounding;
  EstimateOptions estimate;
  SampleOptions sample;
};

struct ApproxLevel {
  std::size_t level = 0;
  double volume = 0.0;
  std::size_t queries = 0;
  std::size_t phases = 0;
  std::size_t rounds = 0;
};

struct ApproxBaseResult {
  RationalPoint point;
  std::size_t level = 0;
  std::vector<double> lambda;
  std::vector<ApproxLevel> levels;
  double alpha = 0.0;
  double beta = 0.0;
  double beta_rounding = 0.0;
  double beta_volume = 0.0;
  double eta = 0.0;
  std::size_t sampler_steps = 0;
  std::size_t queries = 0;
};

ApproxBaseResult run_base_case_approx(const GridDataset& s, double epsilon, double delta,
                                      std::mt19937_64& rng, const ApproxConfig& config = {});
ApproxBaseResult run_base_case_approx(const GridDataset& s, const HyperplaneTable& table,
                                      double epsilon, double delta, std::mt19937_64& rng,
                                      const ApproxConfig& config = {});

}  // namespace dphull

#endif  // DPHULL_APPROX_VOLUME_HPP_
