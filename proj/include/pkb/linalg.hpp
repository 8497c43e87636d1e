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

#ifndef PKB_LINALG_H_
#define PKB_LINALG_H_

#include <Eigen/Dense>
#include <stdexcept>

namespace pkb::num {

// All numeric work is double precision on dense Eigen types.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thin SVD A = U * diag(s) * V^T with singular values sorted descending.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

// Throws std::invalid_argument if A has non-finite entries.
SvdResult svd(const Matrix& a);

// Cosine similarity with the zero-vector convention: if either argument
// has zero norm the result is 0. Accepts any vector expressions.
template <typename DerivedU, typename DerivedV>
double cosine(const Eigen::MatrixBase<DerivedU>& u,
              const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine: length mismatch");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return u.reshaped().dot(v.reshaped()) / (nu * nv);
}

// Pearson correlation of two columns; 0 when either side is constant.
template <typename DerivedU, typename DerivedV>
double pearson(const Eigen::MatrixBase<DerivedU>& u,
               const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("pearson: length mismatch");
  }
  const auto uc = (u.array() - u.mean()).eval();
  const auto vc = (v.array() - v.mean()).eval();
  const double den = std::sqrt(uc.square().sum() * vc.square().sum());
  if (den == 0.0) return 0.0;
  return (uc * vc).sum() / den;
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace pkb::num

#endif  // PKB_LINALG_H_
