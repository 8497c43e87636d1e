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

#include <set>

#include "pkb/linkpred.hpp"
#include "pkb/random.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace pkb;

namespace {

graph::PropertyGraph chain_graph(int n) {
  graph::PropertyGraph g;
  for (int i = 0; i < n; i++) g.resolve_person("p" + std::to_string(i));
  for (int i = 0; i + 1 < n; i++) {
    g.add_edge(i, i + 1, "linked", graph::Provenance::kDataset, 1.0);
  }
  return g;
}

}  // namespace

TEST_CASE("split_edges partitions ten edges into eight train and two test") {
  graph::PropertyGraph g = chain_graph(11);  // 10 edges
  auto split = linkpred::split_edges(g, 0.2, 7);
  CHECK(split.test_pos.size() == 2);
  CHECK(split.train_pos.size() == 8);
  CHECK(split.test_neg.size() == 2);
  CHECK(split.train_neg.size() == 8);

  std::set<linkpred::NodePair> pos(split.train_pos.begin(), split.train_pos.end());
  pos.insert(split.test_pos.begin(), split.test_pos.end());
  CHECK(pos.size() == 10);
  for (const auto& [u, v] : split.train_neg) CHECK_FALSE(g.has_edge_between(u, v));
  for (const auto& [u, v] : split.test_neg) CHECK_FALSE(g.has_edge_between(u, v));
}

TEST_CASE("split_edges fails on a complete graph") {
  graph::PropertyGraph g;
  for (int i = 0; i < 4; i++) g.resolve_person("p" + std::to_string(i));
  for (int i = 0; i < 4; i++) {
    for (int j = i + 1; j < 4; j++) {
      g.add_edge(i, j, "linked", graph::Provenance::kDataset, 1.0);
    }
  }
  CHECK_THROWS_WITH_AS(linkpred::split_edges(g, 0.5, 1),
                       doctest::Contains("not enough non-edges"), std::runtime_error);
}

TEST_CASE("split_edges is reproducible for a fixed seed") {
  graph::PropertyGraph g = chain_graph(12);
  auto a = linkpred::split_edges(g, 0.3, 99);
  auto b = linkpred::split_edges(g, 0.3, 99);
  CHECK(a.train_pos == b.train_pos);
  CHECK(a.test_pos == b.test_pos);
  CHECK(a.train_neg == b.train_neg);
  CHECK(a.test_neg == b.test_neg);
}

TEST_CASE("roc_auc scores a perfect ranking as 1") {
  CHECK(linkpred::roc_auc({0.9, 0.8, 0.1}, {1, 1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("roc_auc gives ties half credit") {
  CHECK(linkpred::roc_auc({0.5, 0.5}, {1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("roc_auc rejects single-class labels") {
  CHECK_THROWS_AS(linkpred::roc_auc({0.4, 0.6}, {1, 1}), std::invalid_argument);
}

TEST_CASE("roc_auc equals the pair-counting oracle on random fixtures") {
  num::Rng rng(1234);
  for (int trial = 0; trial < 100; trial++) {
    int n = static_cast<int>(rng.uniform_int(4, 50));
    std::vector<double> scores;
    std::vector<int> labels;
    bool has0 = false, has1 = false;
    for (int i = 0; i < n; i++) {
      // Coarse quantization forces plenty of ties.
      scores.push_back(std::round(rng.uniform() * 8) / 8.0);
      labels.push_back(rng.uniform() < 0.5 ? 0 : 1);
      (labels.back() ? has1 : has0) = true;
    }
    if (!has0) labels[0] = 0;
    if (!has1) labels[static_cast<size_t>(n - 1)] = 1;
    double expect = oracles::brute_force_auc(scores, labels);
    CHECK(linkpred::roc_auc(scores, labels) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("roc_auc is invariant under strictly monotone score transforms") {
  std::vector<double> scores = {0.1, 0.4, 0.4, 0.7, 0.2, 0.9};
  std::vector<int> labels = {0, 1, 0, 1, 0, 1};
  std::vector<double> squashed;
  for (double s : scores) squashed.push_back(1.0 / (1.0 + std::exp(-7 * s)));
  CHECK(linkpred::roc_auc(scores, labels) ==
        doctest::Approx(linkpred::roc_auc(squashed, labels)));
}

TEST_CASE("an untrained model scores near chance on a 200-pair test set") {
  graph::PropertyGraph g = fixtures::barbell_graph(17, 4);  // 277 positive pairs
  auto features = linkpred::attribute_features(g);
  auto split = linkpred::split_edges(g, 0.4, 5);
  linkpred::Hyperparams hp = fixtures::benchmark_hyperparams();
  hp.epochs = 0;
  hp.seed = 5;
  auto model = linkpred::train_link_model(linkpred::ModelKind::kGcn, g, split, features, hp);

  std::vector<linkpred::NodePair> pairs = split.test_pos;
  pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());
  std::vector<int> labels(split.test_pos.size(), 1);
  labels.resize(pairs.size(), 0);
  REQUIRE(pairs.size() >= 200);
  double auc = linkpred::roc_auc(linkpred::score_pairs(model, pairs), labels);
  CHECK(auc > 0.35);
  CHECK(auc < 0.65);
}

TEST_CASE("training reduces the loss for both model kinds") {
  graph::PropertyGraph g = fixtures::barbell_graph();
  auto features = linkpred::attribute_features(g);
  auto split = linkpred::split_edges(g, 0.2, 3);
  linkpred::Hyperparams hp = fixtures::benchmark_hyperparams();
  hp.seed = 3;
  for (auto kind : {linkpred::ModelKind::kGcn, linkpred::ModelKind::kPgnn}) {
    auto model = linkpred::train_link_model(kind, g, split, features, hp);
    CHECK(model.final_loss <= model.initial_loss);
  }
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  graph::PropertyGraph g = fixtures::barbell_graph();
  auto features = linkpred::attribute_features(g);
  auto split = linkpred::split_edges(g, 0.2, 3);
  linkpred::Hyperparams hp = fixtures::benchmark_hyperparams();
  hp.seed = 11;
  for (auto kind : {linkpred::ModelKind::kGcn, linkpred::ModelKind::kPgnn}) {
    auto m1 = linkpred::train_link_model(kind, g, split, features, hp);
    auto m2 = linkpred::train_link_model(kind, g, split, features, hp);
    REQUIRE(m1.parameters.size() == m2.parameters.size());
    for (size_t i = 0; i < m1.parameters.size(); i++) {
      CHECK(m1.parameters[i] == m2.parameters[i]);
    }
    CHECK(m1.embeddings == m2.embeddings);
  }
}

TEST_CASE("score_pairs rejects self links and unknown ids, stays in (0,1)") {
  graph::PropertyGraph g = fixtures::barbell_graph();
  auto features = linkpred::attribute_features(g);
  auto split = linkpred::split_edges(g, 0.2, 3);
  linkpred::Hyperparams hp = fixtures::benchmark_hyperparams();
  hp.seed = 2;
  auto model = linkpred::train_link_model(linkpred::ModelKind::kGcn, g, split, features, hp);

  CHECK_THROWS_AS(linkpred::score_pairs(model, {{3, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(linkpred::score_pairs(model, {{0, 400}}), std::invalid_argument);
  auto scores = linkpred::score_pairs(model, {{0, 1}, {0, 23}});
  for (double s : scores) {
    CHECK(s > 0.0);
    CHECK(s < 1.0);
  }
  // Inner-product scoring is symmetric.
  CHECK(linkpred::score_pairs(model, {{0, 5}})[0] ==
        doctest::Approx(linkpred::score_pairs(model, {{5, 0}})[0]));
}

TEST_CASE("position-aware model beats the convolutional one on the community graph") {
  graph::PropertyGraph g = fixtures::barbell_graph();
  auto features = linkpred::attribute_features(g);
  auto hp = fixtures::benchmark_hyperparams();
  auto seeds = fixtures::benchmark_seeds();
  auto gcn = linkpred::evaluate_over_seeds(linkpred::ModelKind::kGcn, g, features, hp,
                                           seeds, 0.2);
  auto pgnn = linkpred::evaluate_over_seeds(linkpred::ModelKind::kPgnn, g, features, hp,
                                            seeds, 0.2);
  CHECK(pgnn.mean_auc > gcn.mean_auc);
  CHECK(pgnn.std_dev < gcn.std_dev);
}

TEST_CASE("augment_with_predictions respects thresholds") {
  graph::PropertyGraph g = fixtures::barbell_graph(5, 2);
  auto features = linkpred::attribute_features(g);
  auto split = linkpred::split_edges(g, 0.2, 13);
  linkpred::Hyperparams hp = fixtures::benchmark_hyperparams();
  hp.seed = 13;
  auto model = linkpred::train_link_model(linkpred::ModelKind::kPgnn, g, split, features, hp);

  CHECK_THROWS_AS(linkpred::augment_with_predictions(g, model, 0.0), std::invalid_argument);

  // Sigmoid scores never reach 1, so threshold 1.0 adds nothing.
  auto at_one = linkpred::augment_with_predictions(g, model, 1.0);
  CHECK(at_one.edges().size() == g.edges().size());

  auto strict = linkpred::augment_with_predictions(g, model, 0.9);
  auto loose = linkpred::augment_with_predictions(g, model, 0.5);
  CHECK(loose.edges().size() >= strict.edges().size());
  // Monotone containment: every strict prediction appears in the loose set.
  std::set<std::tuple<int64_t, int64_t, std::string>> loose_keys;
  for (const auto& e : loose.edges()) loose_keys.insert({e.src, e.dst, e.relation});
  for (const auto& e : strict.edges()) {
    CHECK(loose_keys.contains({e.src, e.dst, e.relation}));
  }
  for (const auto& e : strict.edges()) {
    if (e.provenance == graph::Provenance::kPredicted) {
      CHECK(e.score >= 0.9);
      CHECK(e.relation == linkpred::kPredictedRelation);
    }
  }
  // Existing edges are untouched.
  CHECK(strict.edges().size() >= g.edges().size());
  for (size_t i = 0; i < g.edges().size(); i++) {
    CHECK(strict.edges()[i].relation == g.edges()[i].relation);
    CHECK(strict.edges()[i].src == g.edges()[i].src);
    CHECK(strict.edges()[i].dst == g.edges()[i].dst);
  }
}

TEST_CASE("a single high-scoring non-edge is the only augmentation") {
  graph::PropertyGraph g = fixtures::barbell_graph(5, 2);
  auto features = linkpred::attribute_features(g);
  auto split = linkpred::split_edges(g, 0.2, 13);
  linkpred::Hyperparams hp = fixtures::benchmark_hyperparams();
  hp.seed = 13;
  auto model = linkpred::train_link_model(linkpred::ModelKind::kPgnn, g, split, features, hp);

  // Exhaustively score the non-edges, pick a threshold that admits exactly
  // the best one, and confirm augmentation adds exactly that edge.
  std::vector<std::pair<double, linkpred::NodePair>> scored;
  for (int64_t u = 0; u < g.node_count(); u++) {
    for (int64_t v = u + 1; v < g.node_count(); v++) {
      if (g.has_edge_between(u, v)) continue;
      scored.push_back({linkpred::score_pairs(model, {{u, v}})[0], {u, v}});
    }
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  REQUIRE(scored.size() >= 2);
  REQUIRE(scored[0].first > scored[1].first);
  double threshold = 0.5 * (scored[0].first + scored[1].first);
  auto augmented = linkpred::augment_with_predictions(g, model, threshold);
  REQUIRE(augmented.edges().size() == g.edges().size() + 1);
  const auto& added = augmented.edges().back();
  CHECK(added.provenance == graph::Provenance::kPredicted);
  CHECK(linkpred::NodePair{added.src, added.dst} == scored[0].second);
}

TEST_CASE("attribute features are one-hot over the ten most frequent values") {
  graph::PropertyGraph g;
  for (int i = 0; i < 14; i++) g.resolve_person("p" + std::to_string(i));
  for (int i = 0; i < 14; i++) {
    g.add_attribute(i, "tag", i < 7 ? "common" : "t" + std::to_string(i));
  }
  auto f = linkpred::attribute_features(g);
  CHECK(f.source == "attribute-one-hot");
  CHECK(f.matrix.cols() == 9);  // 8 distinct values + constant column
  for (int i = 0; i < 7; i++) CHECK(f.matrix(i, 0) == 1.0);  // most frequent first
  for (int i = 0; i < 14; i++) CHECK(f.matrix(i, f.matrix.cols() - 1) == 1.0);
}
