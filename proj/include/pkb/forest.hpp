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

#ifndef PKB_FOREST_H_
#define PKB_FOREST_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pkb/linalg.hpp"

namespace pkb::fairness {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> class_counts;  // training counts at this node
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  // Class distribution of the leaf the row lands in.
  std::vector<double> predict_proba(const Eigen::Ref<const num::Vector>& row) const;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 8;
  int min_samples_split = 2;
  int features_per_split = 0;  // 0 means ceil(sqrt(d))
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_classes = 0;
  int n_features = 0;
  ForestParams params;
  uint64_t seed = 0;
  std::vector<std::string> feature_names;

  std::vector<double> predict_proba(const Eigen::Ref<const num::Vector>& row) const;
  int predict(const Eigen::Ref<const num::Vector>& row) const;
  // Probability of class 1 (binary shorthand used throughout explanation).
  double proba1(const Eigen::Ref<const num::Vector>& row) const;
  std::vector<int> predict_all(const num::Matrix& x) const;
};

// Bagged Gini trees: every tree trains on a seeded bootstrap sample and
// considers a fresh random feature subset at each split. Ties in Gini gain
// resolve to the lowest feature index, then the lowest threshold.
// Throws std::invalid_argument unless labels contain >= 2 classes.
ForestModel train_forest(const num::Matrix& x, const std::vector<int>& y,
                         const ForestParams& params, uint64_t seed);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int64_t support = 0;
};

struct ClassificationReport {
  std::map<int, ClassMetrics> per_class;
  ClassMetrics macro;     // unweighted mean over classes
  ClassMetrics weighted;  // support-weighted mean
  double accuracy = 0.0;
};

ClassificationReport report_from_predictions(const std::vector<int>& y_true,
                                             const std::vector<int>& y_pred);

ClassificationReport classification_report(const ForestModel& m, const num::Matrix& x,
                                           const std::vector<int>& y);

}  // namespace pkb::fairness

#endif  // PKB_FOREST_H_
