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

#include "pkb/forest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pkb/random.hpp"

namespace pkb::fairness {

using num::Matrix;
using num::Vector;

std::vector<double> DecisionTree::predict_proba(
    const Eigen::Ref<const Vector>& row) const {
  int node = 0;
  while (nodes[static_cast<size_t>(node)].feature >= 0) {
    const TreeNode& cur = nodes[static_cast<size_t>(node)];
    node = row[cur.feature] <= cur.threshold ? cur.left : cur.right;
  }
  const auto& counts = nodes[static_cast<size_t>(node)].class_counts;
  double total = 0.0;
  for (double c : counts) total += c;
  std::vector<double> probs(counts.size(), 0.0);
  if (total > 0.0) {
    for (size_t i = 0; i < counts.size(); i++) probs[i] = counts[i] / total;
  }
  return probs;
}

std::vector<double> ForestModel::predict_proba(
    const Eigen::Ref<const Vector>& row) const {
  std::vector<double> acc(static_cast<size_t>(n_classes), 0.0);
  for (const auto& tree : trees) {
    auto p = tree.predict_proba(row);
    for (size_t i = 0; i < acc.size(); i++) acc[i] += p[i];
  }
  for (auto& v : acc) v /= static_cast<double>(trees.size());
  return acc;
}

int ForestModel::predict(const Eigen::Ref<const Vector>& row) const {
  auto p = predict_proba(row);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

double ForestModel::proba1(const Eigen::Ref<const Vector>& row) const {
  auto p = predict_proba(row);
  return p.size() > 1 ? p[1] : 0.0;
}

std::vector<int> ForestModel::predict_all(const Matrix& x) const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); i++) {
    out.push_back(predict(x.row(i).transpose()));
  }
  return out;
}

namespace {

double gini(const std::vector<int64_t>& counts, int64_t total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (int64_t c : counts) {
    double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

struct TreeBuilder {
  const Matrix& x;
  const std::vector<int>& y;
  int n_classes;
  const ForestParams& params;
  int features_per_split;
  num::Rng& rng;
  DecisionTree tree;

  int build(std::vector<int>& sample, int depth) {
    std::vector<int64_t> counts(static_cast<size_t>(n_classes), 0);
    for (int i : sample) counts[static_cast<size_t>(y[static_cast<size_t>(i)])]++;

    TreeNode node;
    node.class_counts.assign(counts.begin(), counts.end());
    const int64_t total = static_cast<int64_t>(sample.size());
    const double parent_gini = gini(counts, total);

    bool make_leaf = depth >= params.max_depth ||
                     total < params.min_samples_split || parent_gini == 0.0;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 1e-12;

    if (!make_leaf) {
      auto candidates =
          rng.sample_without_replacement(static_cast<int>(x.cols()), features_per_split);
      std::sort(candidates.begin(), candidates.end());
      for (int f : candidates) {
        // Sort the sample by feature value and sweep split points between
        // distinct consecutive values.
        std::vector<int> order = sample;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
          double va = x(a, f), vb = x(b, f);
          if (va != vb) return va < vb;
          return a < b;
        });
        std::vector<int64_t> left(static_cast<size_t>(n_classes), 0);
        std::vector<int64_t> right = counts;
        for (size_t i = 0; i + 1 < order.size(); i++) {
          int cls = y[static_cast<size_t>(order[i])];
          left[static_cast<size_t>(cls)]++;
          right[static_cast<size_t>(cls)]--;
          double v = x(order[i], f);
          double v_next = x(order[i + 1], f);
          if (v == v_next) continue;
          int64_t nl = static_cast<int64_t>(i) + 1;
          int64_t nr = total - nl;
          double gain = parent_gini -
                        (static_cast<double>(nl) / total) * gini(left, nl) -
                        (static_cast<double>(nr) / total) * gini(right, nr);
          double threshold = 0.5 * (v + v_next);
          // Strict improvement only: candidates are swept in ascending
          // (feature, threshold) order, so ties keep the lowest pair.
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_threshold = threshold;
          }
        }
      }
      if (best_feature < 0) make_leaf = true;
    }

    if (make_leaf) {
      tree.nodes.push_back(std::move(node));
      return static_cast<int>(tree.nodes.size()) - 1;
    }

    std::vector<int> left_sample, right_sample;
    for (int i : sample) {
      (x(i, best_feature) <= best_threshold ? left_sample : right_sample).push_back(i);
    }
    node.feature = best_feature;
    node.threshold = best_threshold;
    int self = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(node));
    int left_id = build(left_sample, depth + 1);
    int right_id = build(right_sample, depth + 1);
    tree.nodes[static_cast<size_t>(self)].left = left_id;
    tree.nodes[static_cast<size_t>(self)].right = right_id;
    return self;
  }
};

}  // namespace

ForestModel train_forest(const Matrix& x, const std::vector<int>& y,
                         const ForestParams& params, uint64_t seed) {
  if (static_cast<size_t>(x.rows()) != y.size() || y.empty()) {
    throw std::invalid_argument("train_forest: rows and labels must align");
  }
  std::set<int> classes(y.begin(), y.end());
  if (classes.size() < 2) {
    throw std::invalid_argument("train_forest: need at least 2 classes");
  }
  ForestModel model;
  model.n_classes = *classes.rbegin() + 1;
  model.n_features = static_cast<int>(x.cols());
  model.params = params;
  model.seed = seed;

  int per_split = params.features_per_split > 0
                      ? params.features_per_split
                      : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));
  per_split = std::min(per_split, static_cast<int>(x.cols()));

  const int n = static_cast<int>(x.rows());
  for (int t = 0; t < params.n_trees; t++) {
    num::Rng rng(num::derive_seed(seed, "tree-" + std::to_string(t)));
    std::vector<int> sample(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
      sample[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_int(0, n - 1));
    }
    TreeBuilder builder{x, y, model.n_classes, params, per_split, rng, {}};
    builder.build(sample, 0);
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

ClassificationReport report_from_predictions(const std::vector<int>& y_true,
                                             const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw std::invalid_argument("report: labels and predictions must align");
  }
  std::set<int> classes(y_true.begin(), y_true.end());
  classes.insert(y_pred.begin(), y_pred.end());

  ClassificationReport report;
  int64_t correct = 0;
  for (size_t i = 0; i < y_true.size(); i++) {
    if (y_true[i] == y_pred[i]) correct++;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

  const int64_t total = static_cast<int64_t>(y_true.size());
  for (int cls : classes) {
    int64_t tp = 0, fp = 0, fn = 0, support = 0;
    for (size_t i = 0; i < y_true.size(); i++) {
      bool is_true = y_true[i] == cls;
      bool is_pred = y_pred[i] == cls;
      if (is_true) support++;
      if (is_true && is_pred) tp++;
      if (!is_true && is_pred) fp++;
      if (is_true && !is_pred) fn++;
    }
    ClassMetrics m;
    m.support = support;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.per_class[cls] = m;

    report.macro.precision += m.precision;
    report.macro.recall += m.recall;
    report.macro.f1 += m.f1;
    report.weighted.precision += m.precision * static_cast<double>(support);
    report.weighted.recall += m.recall * static_cast<double>(support);
    report.weighted.f1 += m.f1 * static_cast<double>(support);
  }
  const double k = static_cast<double>(report.per_class.size());
  report.macro.precision /= k;
  report.macro.recall /= k;
  report.macro.f1 /= k;
  report.macro.support = total;
  report.weighted.precision /= static_cast<double>(total);
  report.weighted.recall /= static_cast<double>(total);
  report.weighted.f1 /= static_cast<double>(total);
  report.weighted.support = total;
  return report;
}

ClassificationReport classification_report(const ForestModel& m, const Matrix& x,
                                           const std::vector<int>& y) {
  return report_from_predictions(y, m.predict_all(x));
}

}  // namespace pkb::fairness
