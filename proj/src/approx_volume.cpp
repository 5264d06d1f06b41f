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


#include "dphull/approx_volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dphull/polytope.hpp"

namespace dphull {

namespace {

struct RoundedBody {
  const MembershipOracle& oracle;
  const RoundingMap& map;
  const Eigen::VectorXd* ball_center = nullptr;
  double ball_radius_sq = 0.0;

  bool operator()(const Eigen::VectorXd& y) const {
    if (ball_center && (y - *ball_center).squaredNorm() > ball_radius_sq) return false;
    return oracle.query(map.from_rounded(y));
  }
};

Eigen::VectorXd random_direction(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd u(d);
  do {
    for (int i = 0; i < d; ++i) u[i] = gauss(rng);
  } while (u.norm() < 1e-12);
  return u / u.norm();
}

// Largest t found with y + t u inside, by doubling then bisection.
template <typename Body>
double reach(const Body& body, const Eigen::VectorXd& y, const Eigen::VectorXd& u,
             std::size_t bisection_steps) {
  double lo = 0.0;
  double hi = 0.25;
  for (int i = 0; i < 64 && body(y + hi * u); ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (std::size_t i = 0; i < bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (body(y + mid * u)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

template <typename Body>
void hit_and_run_step(const Body& body, Eigen::VectorXd& y, std::mt19937_64& rng,
                      std::size_t bisection_steps) {
  const Eigen::VectorXd u = random_direction(static_cast<int>(y.size()), rng);
  const double forward = reach(body, y, u, bisection_steps);
  const double backward = reach(body, y, Eigen::VectorXd(-u), bisection_steps);
  const double t = -backward + uniform_double(rng) * (forward + backward);
  const Eigen::VectorXd next = y + t * u;
  if (body(next)) y = next;
}

std::size_t walk_steps(const WalkOptions& w, int d) {
  return w.walk_steps ? w.walk_steps : static_cast<std::size_t>(d + 1);
}

std::size_t burn_in(const WalkOptions& w, int d) {
  return w.burn_in ? w.burn_in : static_cast<std::size_t>(20 * d * d);
}

bool spans_space(const HyperplaneTable& t) {
  if (t.locations.empty()) return false;
  std::vector<RationalPoint> pts;
  for (const GridPoint& p : t.locations) pts.push_back(to_rational(p, t.denom));
  return affine_span(pts).dim() == t.dim;
}

}  // namespace

MembershipOracle::MembershipOracle(const std::vector<Halfspace>& halfspaces, int dim,
                                   std::size_t level)
    : dim_(dim), level_(level), halfspaces_(halfspaces) {
  a_.resize(static_cast<Eigen::Index>(halfspaces.size()), dim);
  b_.resize(static_cast<Eigen::Index>(halfspaces.size()));
  for (std::size_t i = 0; i < halfspaces.size(); ++i) {
    const IntegerVector& c = halfspaces[i].plane.coeffs();
    const double flip = halfspaces[i].sense == Sense::kLessEq ? 1.0 : -1.0;
    Eigen::VectorXd row(dim);
    for (int j = 0; j < dim; ++j) row[j] = flip * c[j + 1].convert_to<double>();
    const double norm = row.norm();
    const auto r = static_cast<Eigen::Index>(i);
    a_.row(r) = row.transpose() / norm;
    b_[r] = -flip * c[0].convert_to<double>() / norm;
  }
}

bool MembershipOracle::query(const Eigen::VectorXd& x) const {
  ++queries_;
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    if (a_.row(i).dot(x) > b_[i]) return false;
  }
  return true;
}

MembershipOracle build_oracle(const GridDataset& s, std::size_t level) {
  return build_oracle(build_hyperplane_table(s), level);
}

MembershipOracle build_oracle(const HyperplaneTable& table, std::size_t level) {
  return MembershipOracle(prune_halfspaces(critical_halfspaces(table, level)).halfspaces,
                          table.dim, level);
}

InnerBall inner_ball(const VPolytope& poly) {
  if (!poly.full_dimensional()) throw NotFullDimensional("region has no interior");
  const int d = poly.dim;
  InnerBall ball;
  ball.center = RationalPoint::Zero(d);
  for (const RationalPoint& v : poly.rational_vertices()) ball.center += v;
  ball.center /= Rational(static_cast<long>(poly.vertices.size()));
  ball.vertices.resize(d, static_cast<Eigen::Index>(poly.vertices.size()));
  Eigen::Index col = 0;
  for (const RationalPoint& v : poly.rational_vertices()) ball.vertices.col(col++) = to_double(v);
  bool first = true;
  for (const Halfspace& h : poly.halfspaces) {
    const Rational value = Rational(h.plane.offset()) +
                           [&] {
                             Rational acc = 0;
                             for (int i = 0; i < d; ++i) acc += Rational(h.plane.coeffs()[i + 1]) * ball.center[i];
                             return acc;
                           }();
    Integer norm_sq = 0;
    for (int i = 0; i < d; ++i) norm_sq += h.plane.coeffs()[i + 1] * h.plane.coeffs()[i + 1];
    const Rational dist_sq = value * value / Rational(norm_sq);
    if (first || dist_sq < ball.radius_squared) {
      ball.radius_squared = dist_sq;
      first = false;
    }
  }
  ball.radius = std::sqrt(to_double(ball.radius_squared)) * (1.0 - 1e-12);
  ball.outer_radius = std::sqrt(static_cast<double>(d));
  return ball;
}

InnerBall inner_ball(const std::vector<Halfspace>& halfspaces, int dim) {
  return inner_ball(vertex_enumeration(halfspaces, dim));
}

InnerBall inner_ball(const GridDataset& s, std::size_t level) {
  return inner_ball(vertex_enumeration(prune_halfspaces(critical_halfspaces(s, level))));
}

RoundingMap round_body(const MembershipOracle& oracle, const Eigen::VectorXd& center,
                       double r, double outer, double beta, std::mt19937_64& rng,
                       const RoundingOptions& options) {
  (void)outer;
  const int d = oracle.dim();
  const std::size_t samples = options.samples
                                  ? options.samples
                                  : std::max<std::size_t>(400, static_cast<std::size_t>(
                                                                   60.0 * d * d * std::max(1.0, std::log(1.0 / beta) / 4)));
  RoundingMap map;
  map.t = Eigen::MatrixXd::Identity(d, d) / r;
  map.t_inv = Eigen::MatrixXd::Identity(d, d) * r;
  map.offset = center;
  map.log_abs_det = -d * std::log(r);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  const std::size_t steps = walk_steps(options.walk, d);
  for (std::size_t round = 0; round < options.max_rounds; ++round) {
    RoundedBody body{oracle, map};
    for (std::size_t i = 0; i < burn_in(options.walk, d); ++i) {
      hit_and_run_step(body, y, rng, options.walk.bisection_steps);
    }
    Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(samples));
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t i = 0; i < steps; ++i) hit_and_run_step(body, y, rng, options.walk.bisection_steps);
      pts.col(static_cast<Eigen::Index>(s)) = y;
    }
    const Eigen::VectorXd mean = pts.rowwise().mean();
    const Eigen::MatrixXd centered = pts.colwise() - mean;
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(samples - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd evals = es.eigenvalues();
    if (!evals.allFinite() || evals.minCoeff() <= 1e-300) {
      throw RoundingFailed("covariance estimate is singular");
    }
    const bool isotropic = evals.maxCoeff() <= 4.0 * evals.minCoeff();
    const Eigen::MatrixXd w =
        es.eigenvectors() * evals.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd w_inv =
        es.eigenvectors() * evals.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    map.offset += map.t_inv * mean;
    map.t = w * map.t;
    map.t_inv = map.t_inv * w_inv;
    map.log_abs_det -= 0.5 * evals.array().log().sum();
    y = w * (y - mean);
    map.rounds = round + 1;
    if (isotropic) break;
  }
  return map;
}

Eigen::MatrixXd rounded_covariance(const MembershipOracle& oracle, const RoundingMap& map,
                                   std::size_t samples, std::mt19937_64& rng,
                                   const WalkOptions& walk) {
  const int d = oracle.dim();
  RoundedBody body{oracle, map};
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < burn_in(walk, d); ++i) hit_and_run_step(body, y, rng, walk.bisection_steps);
  Eigen::MatrixXd pts(d, static_cast<Eigen::Index>(samples));
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < walk_steps(walk, d); ++i) hit_and_run_step(body, y, rng, walk.bisection_steps);
    pts.col(static_cast<Eigen::Index>(s)) = y;
  }
  const Eigen::VectorXd mean = pts.rowwise().mean();
  const Eigen::MatrixXd centered = pts.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(samples - 1);
}

VolumeEstimate estimate_volume(const MembershipOracle& oracle, const RoundingMap& map,
                               const InnerBall& ball, double alpha, double beta,
                               std::mt19937_64& rng, const EstimateOptions& options) {
  const int d = oracle.dim();
  const std::size_t start_queries = oracle.queries();
  const Eigen::VectorXd y0 = map.to_rounded(to_double(ball.center));
  // Inradius of the rounded body around y0: row a.x <= b becomes (a t_inv).y <= b - a.offset.
  const Eigen::VectorXd x0 = to_double(ball.center);
  double rho0 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < oracle.rows().rows(); ++i) {
    const Eigen::RowVectorXd a = oracle.rows().row(i);
    rho0 = std::min(rho0, (oracle.rhs()[i] - a.dot(x0)) / (a * map.t_inv).norm());
  }
  rho0 *= 1.0 - 1e-9;
  double rho_max = 0.0;
  if (ball.vertices.cols() > 0) {
    for (Eigen::Index j = 0; j < ball.vertices.cols(); ++j) {
      rho_max = std::max(rho_max, (map.to_rounded(ball.vertices.col(j)) - y0).norm());
    }
  } else {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Eigen::VectorXd corner(d);
      for (int i = 0; i < d; ++i) corner[i] = (mask >> i) & 1;
      rho_max = std::max(rho_max, (map.to_rounded(corner) - y0).norm());
    }
  }
  rho_max *= 1.0 + 1e-9;
  if (!(rho0 > 0.0) || !std::isfinite(rho_max)) throw EstimationFailed("degenerate inner ball");
  const double growth = 1.0 + 1.0 / d;
  const auto phases = static_cast<std::size_t>(
      std::max(0.0, std::ceil(std::log(rho_max / rho0) / std::log(growth))));

  VolumeEstimate est;
  est.alpha = alpha;
  est.beta = beta;
  est.phases = phases;
  const double per_phase = options.safety * 2.0 * (std::numbers::e - 1.0) *
                           static_cast<double>(std::max<std::size_t>(phases, 1)) *
                           std::log(2.0 / beta) / (alpha * alpha);
  est.samples_per_phase = std::clamp(static_cast<std::size_t>(std::ceil(per_phase)),
                                     options.min_samples, options.max_samples);

  double log_vol = 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0) +
                   d * std::log(rho0);
  Eigen::VectorXd y = y0;
  double inner = rho0;
  const std::size_t steps = walk_steps(options.walk, d);
  for (std::size_t i = 1; i <= phases; ++i) {
    const double outer = (i == phases) ? std::max(rho0 * std::pow(growth, static_cast<double>(i)), rho_max)
                                       : rho0 * std::pow(growth, static_cast<double>(i));
    RoundedBody body{oracle, map, &y0, outer * outer};
    for (std::size_t b = 0; b < burn_in(options.walk, d); ++b) {
      hit_and_run_step(body, y, rng, options.walk.bisection_steps);
    }
    std::size_t hits = 0;
    const double inner_sq = inner * inner;
    for (std::size_t s = 0; s < est.samples_per_phase; ++s) {
      for (std::size_t t = 0; t < steps; ++t) hit_and_run_step(body, y, rng, options.walk.bisection_steps);
      hits += (y - y0).squaredNorm() <= inner_sq;
    }
    if (hits == 0) throw EstimationFailed("phase " + std::to_string(i) + " had no hits");
    const double ratio = static_cast<double>(hits) / static_cast<double>(est.samples_per_phase);
    est.ratios.push_back(ratio);
    log_vol -= std::log(ratio);
    inner = outer;
  }
  log_vol -= map.log_abs_det;
  est.value = std::exp(log_vol);
  est.queries = oracle.queries() - start_queries;
  return est;
}

std::size_t sampler_steps(int dim, double eta, const SampleOptions& options) {
  if (options.fixed_steps) return options.fixed_steps;
  const double d3 = static_cast<double>(dim) * dim * dim;
  const double steps = std::ceil(options.steps_scale * d3 * std::log(1.0 / eta));
  return std::max(options.min_steps, static_cast<std::size_t>(std::max(0.0, steps)));
}

Eigen::VectorXd approx_uniform_sample(const MembershipOracle& oracle, const RoundingMap& map,
                                      double eta, std::mt19937_64& rng,
                                      const SampleOptions& options) {
  const int d = oracle.dim();
  RoundedBody body{oracle, map};
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  const std::size_t steps = sampler_steps(d, eta, options);
  for (std::size_t i = 0; i < steps; ++i) hit_and_run_step(body, y, rng, options.bisection_steps);
  Eigen::VectorXd x = map.from_rounded(y);
  for (int extra = 0; extra < 1000 && !oracle.query(x); ++extra) {
    hit_and_run_step(body, y, rng, options.bisection_steps);
    x = map.from_rounded(y);
  }
  return x;
}

ApproxBaseResult run_base_case_approx(const GridDataset& s, double epsilon, double delta,
                                      std::mt19937_64& rng, const ApproxConfig& config) {
  return run_base_case_approx(s, build_hyperplane_table(s), epsilon, delta, rng, config);
}

ApproxBaseResult run_base_case_approx(const GridDataset& s, const HyperplaneTable& table,
                                      double epsilon, double delta, std::mt19937_64& rng,
                                      const ApproxConfig& config) {
  const int d = s.dim();
  ApproxBaseResult out;
  out.alpha = config.c_alpha * epsilon;
  out.beta = config.c_beta * delta / static_cast<double>(std::max<std::size_t>(s.size(), 1));
  out.beta_rounding = out.beta / 2;
  out.beta_volume = out.beta / 2;
  out.eta = delta;
  SampleOptions sample = config.sample;
  if (config.chain_steps) sample.fixed_steps = config.chain_steps;
  out.sampler_steps = sampler_steps(d, out.eta, sample);
  if (d == 0) {
    out.point = RationalPoint(0);
    out.lambda = {1.0};
    return out;
  }

  std::vector<Rational> volumes = {Rational(1)};
  std::vector<std::optional<MembershipOracle>> oracles(1);
  std::vector<RoundingMap> maps(1);
  if (spans_space(table)) {
    for (std::size_t l = 1; l <= s.size(); ++l) {
      TukeyRegionH region = prune_halfspaces(critical_halfspaces(table, l));
      VPolytope poly;
      try {
        poly = vertex_enumeration(region);
      } catch (const EmptyRegion&) {
        break;
      }
      ApproxLevel info;
      info.level = l;
      if (!poly.full_dimensional()) {
        volumes.push_back(Rational(0));
        oracles.emplace_back();
        maps.emplace_back();
        out.levels.push_back(info);
        continue;
      }
      const InnerBall ball = inner_ball(poly);
      MembershipOracle oracle(region.halfspaces, d, l);
      RoundingMap map = round_body(oracle, to_double(ball.center), ball.radius, ball.outer_radius,
                                   out.beta_rounding, rng, config.rounding);
      const VolumeEstimate est =
          estimate_volume(oracle, map, ball, out.alpha, out.beta_volume, rng, config.estimate);
      info.volume = est.value;
      info.queries = oracle.queries();
      info.phases = est.phases;
      info.rounds = map.rounds;
      out.queries += oracle.queries();
      out.levels.push_back(info);
      volumes.push_back(from_double(est.value));
      oracles.push_back(std::move(oracle));
      maps.push_back(std::move(map));
    }
  }
  const LambdaWeights w = lambda_weights(volumes, epsilon);
  for (const HighFloat& l : w.lambda) out.lambda.push_back(l.convert_to<double>());
  out.level = sample_index(w.lambda, rng);
  if (out.level == 0) {
    out.point = sample_cube(d, rng);
    return out;
  }
  const MembershipOracle& oracle = *oracles[out.level];
  const Eigen::VectorXd x = approx_uniform_sample(oracle, maps[out.level], out.eta, rng, sample);
  out.queries += oracle.queries();
  out.point.resize(d);
  for (int i = 0; i < d; ++i) out.point[i] = from_double(x[i]);
  return out;
}

}  // namespace dphull
