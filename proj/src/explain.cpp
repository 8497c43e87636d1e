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

#include "pkb/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "pkb/random.hpp"
#include "pkb/strings.hpp"

namespace pkb::fairness {

using num::Matrix;
using num::Vector;

LimeExplanation lime_explain(const ForestModel& m,
                             const Eigen::Ref<const Vector>& row, int n_samples,
                             double kernel_width, uint64_t seed) {
  const int d = static_cast<int>(row.size());
  if (n_samples < 50) {
    throw std::invalid_argument("lime_explain: need at least 50 samples");
  }
  if (kernel_width <= 0.0) kernel_width = 0.75 * std::sqrt(static_cast<double>(d));

  num::Rng rng(num::derive_seed(seed, "lime"));
  Matrix samples(n_samples, d);
  Vector outputs(n_samples);
  Vector weights(n_samples);
  for (int s = 0; s < n_samples; s++) {
    Vector z = row;
    for (int j = 0; j < d; j++) {
      if (rng.uniform() < 0.5) z[j] = 1.0 - z[j];
    }
    samples.row(s) = z.transpose();
    outputs[s] = m.proba1(z);
    double dist2 = (z - row).squaredNorm();
    weights[s] = std::exp(-dist2 / (kernel_width * kernel_width));
  }

  // Weighted least squares with intercept: minimize sum w (y - [1 x] b)^2.
  Matrix design(n_samples, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = samples;
  Vector sqrt_w = weights.array().sqrt();
  Matrix a = sqrt_w.asDiagonal() * design;
  Vector b = sqrt_w.asDiagonal() * outputs;

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < d + 1) {
    throw std::runtime_error("lime_explain: degenerate perturbation set");
  }
  Vector beta = qr.solve(b);

  LimeExplanation out;
  out.n_samples = n_samples;
  out.intercept = beta[0];
  out.weights.assign(beta.data() + 1, beta.data() + 1 + d);

  Vector fitted = design * beta;
  double w_total = weights.sum();
  double y_bar = weights.dot(outputs) / w_total;
  double ss_res = (weights.array() * (outputs - fitted).array().square()).sum();
  double ss_tot = (weights.array() * (outputs.array() - y_bar).square()).sum();
  out.fidelity = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

namespace {

// Mean model output with masked features taken from the row and the rest
// from each background row in turn.
double coalition_value(const ForestModel& m, const Eigen::Ref<const Vector>& row,
                       const Matrix& background, uint32_t mask) {
  const int d = static_cast<int>(row.size());
  double total = 0.0;
  Vector composite(d);
  for (Eigen::Index b = 0; b < background.rows(); b++) {
    for (int j = 0; j < d; j++) {
      composite[j] = (mask >> j) & 1u ? row[j] : background(b, j);
    }
    total += m.proba1(composite);
  }
  return total / static_cast<double>(background.rows());
}

ShapExplanation shap_exact(const ForestModel& m, const Eigen::Ref<const Vector>& row,
                           const Matrix& background) {
  const int d = static_cast<int>(row.size());
  const uint32_t n_masks = 1u << d;

  std::vector<double> value(n_masks);
  for (uint32_t mask = 0; mask < n_masks; mask++) {
    value[mask] = coalition_value(m, row, background, mask);
  }

  // w[s] = s! (d-1-s)! / d!
  std::vector<double> weight(static_cast<size_t>(d), 0.0);
  for (int s = 0; s < d; s++) {
    double w = 1.0 / d;
    for (int i = 1; i <= s; i++) w *= static_cast<double>(i) / (d - i);
    weight[static_cast<size_t>(s)] = w;
  }

  ShapExplanation out;
  out.values.assign(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < d; i++) {
    const uint32_t bit = 1u << i;
    for (uint32_t mask = 0; mask < n_masks; mask++) {
      if (mask & bit) continue;
      int s = std::popcount(mask);
      out.values[static_cast<size_t>(i)] +=
          weight[static_cast<size_t>(s)] * (value[mask | bit] - value[mask]);
    }
  }
  out.base_value = value[0];
  double f_row = value[n_masks - 1];
  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.residual = f_row - out.base_value - sum;
  return out;
}

ShapExplanation shap_montecarlo(const ForestModel& m,
                                const Eigen::Ref<const Vector>& row,
                                const Matrix& background, uint64_t seed,
                                int n_permutations) {
  const int d = static_cast<int>(row.size());
  num::Rng rng(num::derive_seed(seed, "shap-mc"));

  ShapExplanation out;
  out.values.assign(static_cast<size_t>(d), 0.0);

  std::vector<int> perm(static_cast<size_t>(d));
  for (int i = 0; i < d; i++) perm[static_cast<size_t>(i)] = i;

  for (int t = 0; t < n_permutations; t++) {
    rng.shuffle(perm);
    Eigen::Index b = rng.uniform_int(0, background.rows() - 1);
    Vector composite = background.row(b).transpose();
    double prev = m.proba1(composite);
    for (int j : perm) {
      composite[j] = row[j];
      double cur = m.proba1(composite);
      out.values[static_cast<size_t>(j)] += cur - prev;
      prev = cur;
    }
  }
  for (auto& v : out.values) v /= static_cast<double>(n_permutations);

  double base = 0.0;
  for (Eigen::Index b = 0; b < background.rows(); b++) {
    base += m.proba1(background.row(b).transpose());
  }
  out.base_value = base / static_cast<double>(background.rows());
  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.residual = m.proba1(row) - out.base_value - sum;
  return out;
}

}  // namespace

ShapExplanation shap_values(const ForestModel& m, const Eigen::Ref<const Vector>& row,
                            const Matrix& background, ShapMode mode, uint64_t seed,
                            int n_permutations) {
  if (background.rows() == 0) {
    throw std::invalid_argument("shap_values: background must be nonempty");
  }
  if (background.cols() != row.size()) {
    throw std::invalid_argument("shap_values: background width must match the row");
  }
  if (mode == ShapMode::kExact) {
    if (row.size() > 15) {
      throw std::invalid_argument(
          "shap_values: exact mode supports at most 15 features; use montecarlo");
    }
    return shap_exact(m, row, background);
  }
  if (n_permutations < 1) {
    throw std::invalid_argument("shap_values: need at least 1 permutation");
  }
  return shap_montecarlo(m, row, background, seed, n_permutations);
}

namespace {

double model_accuracy(const ForestModel& m, const Matrix& x, const std::vector<int>& y) {
  auto pred = m.predict_all(x);
  int64_t correct = 0;
  for (size_t i = 0; i < y.size(); i++) {
    if (pred[i] == y[i]) correct++;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

bool matches_protected(const std::string& feature, const std::string& label) {
  return feature == label || starts_with(feature, label + "=");
}

}  // namespace

AuditReport audit_protected(const ForestModel& m, const Matrix& x,
                            const std::vector<int>& y,
                            const std::vector<std::string>& protected_features,
                            uint64_t seed) {
  const int d = static_cast<int>(x.cols());
  const int n = static_cast<int>(x.rows());
  constexpr int kRepetitions = 10;

  AuditReport report;
  report.baseline_accuracy = model_accuracy(m, x, y);

  for (int f = 0; f < d; f++) {
    std::string name = f < static_cast<int>(m.feature_names.size())
                           ? m.feature_names[static_cast<size_t>(f)]
                           : "f" + std::to_string(f);
    double drop_total = 0.0;
    for (int r = 0; r < kRepetitions; r++) {
      num::Rng rng(num::derive_seed(
          seed, "perm-" + std::to_string(f) + "-" + std::to_string(r)));
      std::vector<int> order(static_cast<size_t>(n));
      for (int i = 0; i < n; i++) order[static_cast<size_t>(i)] = i;
      rng.shuffle(order);
      Matrix shuffled = x;
      for (int i = 0; i < n; i++) {
        shuffled(i, f) = x(order[static_cast<size_t>(i)], f);
      }
      drop_total += report.baseline_accuracy - model_accuracy(m, shuffled, y);
    }
    FeatureImportance fi;
    fi.name = std::move(name);
    fi.importance = drop_total / kRepetitions;
    for (const auto& p : protected_features) {
      if (matches_protected(fi.name, p)) {
        fi.is_protected = true;
        break;
      }
    }
    report.features.push_back(std::move(fi));
  }

  // Rank by importance, ties toward the lower feature index.
  std::vector<int> order(static_cast<size_t>(d));
  for (int i = 0; i < d; i++) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return report.features[static_cast<size_t>(a)].importance >
           report.features[static_cast<size_t>(b)].importance;
  });
  const int quartile = (d + 3) / 4;
  for (int r = 0; r < d; r++) {
    FeatureImportance& fi = report.features[static_cast<size_t>(order[static_cast<size_t>(r)])];
    fi.rank = r + 1;
    if (fi.is_protected && fi.rank <= quartile && fi.importance > 0.0) {
      fi.flagged = true;
      report.flagged_protected.push_back(fi.name);
    }
  }
  std::sort(report.flagged_protected.begin(), report.flagged_protected.end());
  return report;
}

}  // namespace pkb::fairness
