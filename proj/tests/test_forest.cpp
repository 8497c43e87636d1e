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

#include <doctest.h>

#include "pkb/forest.hpp"
#include "pkb/random.hpp"

using namespace pkb;

namespace {

// Two clearly separable stripes in two features.
void separable_data(num::Matrix* x, std::vector<int>* y, int n, uint64_t seed) {
  num::Rng rng(seed);
  x->resize(n, 2);
  y->clear();
  for (int i = 0; i < n; i++) {
    int label = i % 2;
    (*x)(i, 0) = label == 0 ? rng.uniform() * 0.4 : 0.6 + rng.uniform() * 0.4;
    (*x)(i, 1) = rng.uniform();
    y->push_back(label);
  }
}

}  // namespace

TEST_CASE("a separable table trains to perfect accuracy") {
  num::Matrix x;
  std::vector<int> y;
  separable_data(&x, &y, 100, 5);
  fairness::ForestParams params;
  params.n_trees = 25;
  auto model = fairness::train_forest(x, y, params, 7);
  auto pred = model.predict_all(x);
  CHECK(pred == y);
}

TEST_CASE("the root split picks the feature with the best Gini gain") {
  // Eight rows; feature 1 separates the classes perfectly, feature 0 does
  // not. Hand enumeration: splitting feature 1 at 0.5 yields gain
  // 0.5 - 0 = 0.5, the maximum over all candidate splits.
  num::Matrix x(8, 2);
  std::vector<int> y;
  double f0[] = {0.1, 0.9, 0.2, 0.8, 0.15, 0.85, 0.25, 0.75};
  for (int i = 0; i < 8; i++) {
    x(i, 0) = f0[i];
    x(i, 1) = i < 4 ? 0.0 : 1.0;
    y.push_back(i < 4 ? 0 : 1);
  }
  fairness::ForestParams params;
  params.n_trees = 1;
  params.features_per_split = 2;  // consider both features at the root
  auto model = fairness::train_forest(x, y, params, 3);
  REQUIRE(model.trees.size() == 1);
  const auto& root = model.trees[0].nodes[0];
  CHECK(root.feature == 1);
  CHECK(root.threshold == doctest::Approx(0.5));
}

TEST_CASE("training is deterministic for a fixed seed") {
  num::Matrix x;
  std::vector<int> y;
  separable_data(&x, &y, 60, 9);
  fairness::ForestParams params;
  params.n_trees = 10;
  auto a = fairness::train_forest(x, y, params, 42);
  auto b = fairness::train_forest(x, y, params, 42);
  REQUIRE(a.trees.size() == b.trees.size());
  for (size_t t = 0; t < a.trees.size(); t++) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (size_t n = 0; n < a.trees[t].nodes.size(); n++) {
      CHECK(a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature);
      CHECK(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
    }
  }
}

TEST_CASE("single-class labels are rejected") {
  num::Matrix x(4, 1);
  x << 0, 1, 2, 3;
  std::vector<int> y = {1, 1, 1, 1};
  CHECK_THROWS_AS(fairness::train_forest(x, y, {}, 1), std::invalid_argument);
}

TEST_CASE("perfect predictions give an all-ones report") {
  std::vector<int> y = {0, 1, 0, 1, 1};
  auto report = fairness::report_from_predictions(y, y);
  CHECK(report.accuracy == 1.0);
  for (const auto& [cls, m] : report.per_class) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
  }
  CHECK(report.macro.f1 == 1.0);
  CHECK(report.weighted.f1 == 1.0);
}

TEST_CASE("a precision-1 recall-0.95 class lands at f1 0.97-0.98") {
  // 20 positives, one missed; negatives all correct.
  std::vector<int> y_true, y_pred;
  for (int i = 0; i < 20; i++) {
    y_true.push_back(1);
    y_pred.push_back(i == 0 ? 0 : 1);
  }
  for (int i = 0; i < 30; i++) {
    y_true.push_back(0);
    y_pred.push_back(0);
  }
  auto report = fairness::report_from_predictions(y_true, y_pred);
  const auto& m = report.per_class.at(1);
  CHECK(m.precision == doctest::Approx(1.0));
  CHECK(m.recall == doctest::Approx(0.95));
  CHECK(m.f1 == doctest::Approx(0.98).epsilon(0.01));
  CHECK(m.support == 20);
}

TEST_CASE("predicting one class zeroes the other class recall") {
  std::vector<int> y_true = {0, 0, 1, 1};
  std::vector<int> y_pred = {0, 0, 0, 0};
  auto report = fairness::report_from_predictions(y_true, y_pred);
  CHECK(report.per_class.at(1).recall == 0.0);
  CHECK(report.per_class.at(0).recall == 1.0);
}

TEST_CASE("report arithmetic matches hand-computed confusion counts") {
  // tp=3 fp=1 fn=2 for class 1 over 10 rows.
  std::vector<int> y_true = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  std::vector<int> y_pred = {1, 1, 1, 0, 0, 1, 0, 0, 0, 0};
  auto report = fairness::report_from_predictions(y_true, y_pred);
  const auto& pos = report.per_class.at(1);
  CHECK(pos.precision == doctest::Approx(3.0 / 4.0));
  CHECK(pos.recall == doctest::Approx(3.0 / 5.0));
  CHECK(pos.f1 == doctest::Approx(2.0 * 0.75 * 0.6 / (0.75 + 0.6)));
  const auto& neg = report.per_class.at(0);
  CHECK(neg.precision == doctest::Approx(4.0 / 6.0));
  CHECK(neg.recall == doctest::Approx(4.0 / 5.0));
  CHECK(report.accuracy == doctest::Approx(0.7));
  CHECK(report.macro.precision ==
        doctest::Approx(0.5 * (3.0 / 4.0 + 4.0 / 6.0)));
  CHECK(report.weighted.recall == doctest::Approx(0.5 * 0.6 + 0.5 * 0.8));
}

TEST_CASE("class probabilities average the per-tree leaf distributions") {
  num::Matrix x;
  std::vector<int> y;
  separable_data(&x, &y, 40, 77);
  fairness::ForestParams params;
  params.n_trees = 15;
  auto model = fairness::train_forest(x, y, params, 3);
  for (int i = 0; i < x.rows(); i += 7) {
    auto p = model.predict_proba(x.row(i).transpose());
    CHECK(p.size() == 2);
    CHECK(p[0] + p[1] == doctest::Approx(1.0));
  }
}
