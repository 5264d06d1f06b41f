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


// JSON serialization of datasets, regions, transcripts and experiment
// results. Objects are emitted with sorted keys, so equal values always
// produce identical bytes.

#ifndef DPHULL_IO_HPP_
#define DPHULL_IO_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "dphull/approx_volume.hpp"
#include "dphull/degeneracy.hpp"
#include "dphull/geometry.hpp"
#include "dphull/polytope.hpp"
#include "dphull/tukey.hpp"

namespace dphull {

using Json = nlohmann::json;

std::string build_id();

Json to_json(const Rational& x);
Json to_json(const RationalPoint& p);
Json to_json(const GridDataset& s);
Json to_json(const Halfspace& h);
Json to_json(const TukeyRegionH& region);
Json to_json(const VPolytope& poly);
Json to_json(const BudgetSplit& b);
Json to_json(const ApproxBaseResult& r);
Json to_json(const RunTranscript& t);

std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

// Throws InvalidDataset on schema violations.
GridDataset dataset_from_json(const Json& j);
GridDataset load_dataset(const std::string& path);
void save_json(const std::string& path, const Json& j);
std::string dump(const Json& j);

// Parses "a/b", integers and decimals; coordinates separated by commas or
// whitespace.
RationalPoint parse_point(const std::string& text);

}  // namespace dphull

#endif  // DPHULL_IO_HPP_
