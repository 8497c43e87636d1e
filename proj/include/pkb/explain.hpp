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

#ifndef PKB_EXPLAIN_H_
#define PKB_EXPLAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pkb/forest.hpp"
#include "pkb/linalg.hpp"

namespace pkb::fairness {

// Local linear surrogate fit around one row.
struct LimeExplanation {
  std::vector<double> weights;  // one per feature
  double intercept = 0.0;
  double fidelity = 0.0;  // weighted R^2 of the surrogate
  int n_samples = 0;
};

// Perturbs the row by reflecting each feature in [0,1] (a plain bit flip
// for one-hot columns) with probability 1/2, weights samples by
// exp(-d^2 / kernel_width^2) with d the Euclidean (Hamming-derived)
// distance, and fits a weighted least-squares linear surrogate to the
// model's class-1 probability. kernel_width <= 0 selects the default
// 0.75 * sqrt(n_features). Requires n_samples >= 50; throws on a
// degenerate perturbation set.
LimeExplanation lime_explain(const ForestModel& m,
                             const Eigen::Ref<const num::Vector>& row, int n_samples,
                             double kernel_width, uint64_t seed);

enum class ShapMode { kExact, kMonteCarlo };

struct ShapExplanation {
  std::vector<double> values;  // one per feature
  double base_value = 0.0;     // mean model output over the background
  double residual = 0.0;       // f(row) - base - sum(values)
};

// Shapley values of the model's class-1 probability, with feature absence
// realized by substituting background-row values. Exact mode enumerates
// all subsets and requires <= 15 features (efficiency then holds to
// machine precision); Monte-Carlo mode estimates over seeded random
// permutations with background rows drawn per permutation.
ShapExplanation shap_values(const ForestModel& m,
                            const Eigen::Ref<const num::Vector>& row,
                            const num::Matrix& background, ShapMode mode,
                            uint64_t seed, int n_permutations = 10000);

struct FeatureImportance {
  std::string name;
  double importance = 0.0;  // mean accuracy drop over shuffles
  int rank = 0;             // 1 = most important
  bool is_protected = false;
  bool flagged = false;     // protected and in the top quartile
};

struct AuditReport {
  double baseline_accuracy = 0.0;
  std::vector<FeatureImportance> features;  // in feature order
  std::vector<std::string> flagged_protected;
};

// Permutation importance (mean accuracy drop over 10 seeded shuffles per
// feature). A protected feature ranking in the top quartile is flagged.
// Protected names match a feature exactly or as its "name=" prefix.
AuditReport audit_protected(const ForestModel& m, const num::Matrix& x,
                            const std::vector<int>& y,
                            const std::vector<std::string>& protected_features,
                            uint64_t seed);

}  // namespace pkb::fairness

#endif  // PKB_EXPLAIN_H_
