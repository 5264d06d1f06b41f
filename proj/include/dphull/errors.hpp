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

#ifndef DPHULL_ERRORS_HPP_
#define DPHULL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dphull {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DPHULL_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    explicit Name(const std::string& what) \
        : Error(#Name ": " + what) {}      \
  }

DPHULL_DEFINE_ERROR(InvalidDataset);
DPHULL_DEFINE_ERROR(DegenerateSpan);
DPHULL_DEFINE_ERROR(PointOffSubspace);
DPHULL_DEFINE_ERROR(EmptyRegion);
DPHULL_DEFINE_ERROR(NotFullDimensional);
DPHULL_DEFINE_ERROR(ZeroVolume);
DPHULL_DEFINE_ERROR(RoundingFailed);
DPHULL_DEFINE_ERROR(EstimationFailed);
DPHULL_DEFINE_ERROR(InfeasibleParams);
DPHULL_DEFINE_ERROR(EmptyRestriction);

#undef DPHULL_DEFINE_ERROR

}  // namespace dphull

#endif  // DPHULL_ERRORS_HPP_
