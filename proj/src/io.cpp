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


#include "dphull/io.hpp"

#include <fstream>
#include <sstream>

namespace dphull {

std::string build_id() {
#ifdef DPHULL_VERSION
  const std::string version = DPHULL_VERSION;
#else
  const std::string version = "unknown";
#endif
#if defined(__clang__)
  const std::string compiler = "clang-" __clang_version__;
#elif defined(__GNUC__)
  const std::string compiler = "gcc-" __VERSION__;
#else
  const std::string compiler = "unknown";
#endif
  return "dp-hull " + version + " (" + compiler + ")";
}

Json to_json(const Rational& x) { return to_string(x); }

Json to_json(const RationalPoint& p) {
  Json exact = Json::array();
  Json approx = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    exact.push_back(to_string(p[i]));
    approx.push_back(to_double(p[i]));
  }
  return {{"exact", exact}, {"approx", approx}};
}

Json to_json(const GridDataset& s) {
  Json pts = Json::array();
  for (const GridPoint& p : s.points()) {
    Json row = Json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p[i]);
    pts.push_back(row);
  }
  return {{"dim", s.dim()}, {"denom", s.denom()}, {"points", pts}};
}

Json to_json(const Halfspace& h) {
  Json coeffs = Json::array();
  for (Eigen::Index i = 0; i < h.plane.coeffs().size(); ++i) coeffs.push_back(h.plane.coeffs()[i].str());
  return {{"coeffs", coeffs}, {"sense", h.sense == Sense::kLessEq ? "<=" : ">="}};
}

Json to_json(const TukeyRegionH& region) {
  Json hs = Json::array();
  for (const Halfspace& h : region.halfspaces) hs.push_back(to_json(h));
  return {{"dim", region.dim},
          {"k", region.k},
          {"n", region.n},
          {"vacuous", region.vacuous},
          {"num_data_halfspaces", region.num_data_halfspaces()},
          {"num_cube_facets", region.num_cube_facets},
          {"halfspaces", hs}};
}

Json to_json(const VPolytope& poly) {
  Json vs = Json::array();
  for (const RationalPoint& v : poly.rational_vertices()) vs.push_back(to_json(v));
  return {{"dim", poly.dim}, {"affine_dim", poly.affine_dim}, {"vertices", vs}};
}

std::string to_string(Mode mode) { return mode == Mode::kExact ? "exact" : "approx"; }

Mode parse_mode(const std::string& s) {
  if (s == "exact") return Mode::kExact;
  if (s == "approx" || s == "approximate") return Mode::kApprox;
  throw InfeasibleParams("unknown mode '" + s + "'");
}

Json to_json(const BudgetSplit& b) {
  return {{"epsilon_total", b.epsilon_total}, {"delta_total", b.delta_total},
          {"epsilon_noise", b.epsilon_noise}, {"epsilon_select", b.epsilon_select},
          {"epsilon_base", b.epsilon_base},   {"beta", b.beta},
          {"mode", to_string(b.mode)}};
}

Json to_json(const ApproxBaseResult& r) {
  Json levels = Json::array();
  for (const ApproxLevel& l : r.levels) {
    levels.push_back({{"level", l.level}, {"volume", l.volume}, {"queries", l.queries},
                      {"phases", l.phases}, {"rounds", l.rounds}});
  }
  return {{"level", r.level},
          {"lambda", r.lambda},
          {"levels", levels},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"beta_rounding", r.beta_rounding},
          {"beta_volume", r.beta_volume},
          {"eta", r.eta},
          {"sampler_steps", r.sampler_steps},
          {"queries", r.queries}};
}

namespace {

Json to_json(const SelectionRecord& s) {
  Json basis = Json::array();
  for (Eigen::Index i = 0; i < s.basis.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < s.basis.cols(); ++c) row.push_back(to_string(s.basis(i, c)));
    basis.push_back(row);
  }
  Json base = Json::array();
  for (Eigen::Index i = 0; i < s.base.size(); ++i) base.push_back(to_string(s.base[i]));
  return {{"j", s.j},
          {"count", s.count},
          {"score", s.score},
          {"witness", s.witness},
          {"base", base},
          {"basis", basis},
          {"projection_coords", s.projection_coords},
          {"failure_probability", s.failure_probability}};
}

Json to_json(const LevelRecord& l) {
  Json out = {{"dim", l.dim},
              {"n", l.n},
              {"maxima", l.maxima},
              {"noisy_maxima", l.noisy_maxima},
              {"thresholds", l.thresholds},
              {"base_case", l.base_case}};
  out["selection"] = l.selection ? to_json(*l.selection) : Json(nullptr);
  return out;
}

Json to_json(const BaseRecord& b) {
  Json out = {{"mode", to_string(b.mode)},  {"dim", b.dim},          {"n", b.n},
              {"level", b.level},           {"td_max", b.td_max},    {"lambda", b.lambda},
              {"volumes", b.volumes},       {"fallback_used", b.fallback_used}};
  out["approx"] = b.approx ? dphull::to_json(*b.approx) : Json(nullptr);
  return out;
}

}  // namespace

Json to_json(const RunTranscript& t) {
  Json levels = Json::array();
  for (const LevelRecord& l : t.levels) levels.push_back(to_json(l));
  Json out = {{"budget", to_json(t.budget)},
              {"k", t.k},
              {"noise_scale_factor", t.noise_scale_factor},
              {"levels", levels},
              {"status", t.status == RunStatus::kSuccess ? "success" : "failure"},
              {"failure_reason", t.failure_reason},
              {"final_dim", t.final_dim}};
  out["base"] = t.base ? to_json(*t.base) : Json(nullptr);
  out["output"] = t.output ? to_json(*t.output) : Json(nullptr);
  return out;
}

GridDataset dataset_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw InvalidDataset("dataset must be a JSON object");
    const int dim = j.at("dim").get<int>();
    const std::int64_t denom = j.at("denom").get<std::int64_t>();
    std::vector<GridPoint> pts;
    for (const Json& row : j.at("points")) {
      if (!row.is_array()) throw InvalidDataset("point must be an array");
      GridPoint p(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!row[i].is_number_integer()) throw InvalidDataset("coordinates must be integers");
        p[static_cast<Eigen::Index>(i)] = row[i].get<std::int64_t>();
      }
      pts.push_back(std::move(p));
    }
    return GridDataset(dim, denom, std::move(pts));
  } catch (const Json::exception& e) {
    throw InvalidDataset(e.what());
  }
}

GridDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidDataset("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InvalidDataset(path + ": " + e.what());
  }
  return dataset_from_json(j);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << dump(j);
}

RationalPoint parse_point(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',' || c == '(' || c == ')' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(s);
  std::vector<Rational> coords;
  std::string tok;
  while (in >> tok) coords.push_back(parse_rational(tok));
  RationalPoint p(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) p[static_cast<Eigen::Index>(i)] = coords[i];
  return p;
}

}  // namespace dphull
