// Copyright 2026 The PKB Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pkb/linalg.hpp"

#include <Eigen/SVD>

namespace pkb::num {

SvdResult svd(const Matrix& a) {
  if (!all_finite(a)) {
    throw std::invalid_argument("svd: input has non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

}  // namespace pkb::num
