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

// End-to-end acceptance suite. Each criterion prints one pass/fail line;
// the process exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pkb/explain.hpp"
#include "pkb/forest.hpp"
#include "pkb/kbp_eval.hpp"
#include "pkb/linkpred.hpp"
#include "pkb/pipeline.hpp"
#include "pkb/random.hpp"
#include "pkb/sketch.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace pkb;

namespace {

int g_failures = 0;
int g_index = 0;

void criterion(const std::string& name, const std::function<void(std::string&)>& body) {
  g_index++;
  std::string detail;
  bool ok = true;
  try {
    body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  if (!detail.empty() && detail.back() == '\n') detail.pop_back();
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", g_index,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) g_failures++;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

num::Matrix random_matrix(int rows, int cols, uint64_t seed) {
  num::Rng rng(seed);
  num::Matrix m(rows, cols);
  for (int i = 0; i < rows; i++) {
    for (int j = 0; j < cols; j++) m(i, j) = rng.normal();
  }
  return m;
}

// The corpus feature table after the annotate/graph stages.
DataTable corpus_features(bool annotators) {
  pipeline::Config config = fixtures::corpus_config(
      (fs::temp_directory_path() / "pkb-acc-out").string(), annotators);
  pipeline::PipelineState state;
  pipeline::stage_ingest(config, &state);
  pipeline::stage_annotate(config, &state);
  pipeline::stage_graph(config, &state);
  DataTable table =
      graph::to_feature_table(state.base_graph, state.base_graph.attribute_schema());
  table.take_int_column("target");
  return table;
}

graph::PropertyGraph corpus_graph(bool annotators) {
  pipeline::Config config = fixtures::corpus_config(
      (fs::temp_directory_path() / "pkb-acc-out").string(), annotators);
  pipeline::PipelineState state;
  pipeline::stage_ingest(config, &state);
  pipeline::stage_annotate(config, &state);
  pipeline::stage_graph(config, &state);
  return state.base_graph;
}

fairness::ForestModel stump_model(int n_features, int idx, uint64_t seed) {
  num::Rng rng(seed);
  num::Matrix x(200, n_features);
  std::vector<int> y;
  for (int i = 0; i < 200; i++) {
    for (int j = 0; j < n_features; j++) x(i, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    y.push_back(x(i, idx) > 0.5 ? 1 : 0);
  }
  fairness::ForestParams params;
  params.n_trees = 30;
  params.features_per_split = n_features;
  return fairness::train_forest(x, y, params, seed);
}

}  // namespace

int main() {
  criterion("micro-F1 arithmetic matches the reference values to 0.001", [](std::string& detail) {
    const struct { double r, expect; } cases[] = {
        {0.696, 0.821}, {0.521, 0.685}, {0.737, 0.849}, {0.576, 0.731}, {0.095, 0.174}};
    std::ostringstream out;
    for (const auto& c : cases) {
      double got = kbp::f1(1.00, c.r);
      require(std::abs(got - c.expect) <= 0.001,
              "f1(1.00, " + std::to_string(c.r) + ") = " + std::to_string(got));
      out << "f1(1," << c.r << ")=" << got << " ";
    }
    detail = out.str();
  });

  criterion("frequent-directions covariance bound on 50 seeded matrices", [](std::string& detail) {
    num::Rng shape_rng(2024);
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 50; trial++) {
      int rows = static_cast<int>(shape_rng.uniform_int(20, 200));
      int cols = static_cast<int>(shape_rng.uniform_int(4, 50));
      int ell = std::vector<int>{4, 8, 16}[static_cast<size_t>(trial % 3)];
      num::Matrix a = random_matrix(rows, cols, 9000 + static_cast<uint64_t>(trial));
      num::Matrix b = sketch::frequent_directions(a, ell);
      double err = oracles::spectral_norm_sym(a.transpose() * a - b.transpose() * b);
      double bound = 2.0 * a.squaredNorm() / ell;
      require(err <= bound, "trial " + std::to_string(trial) + ": error " +
                                std::to_string(err) + " > bound " + std::to_string(bound));
      worst_ratio = std::max(worst_ratio, err / bound);
    }
    detail = "worst error/bound = " + std::to_string(worst_ratio);
  });

  criterion("representative sampling: coverage, collapse, and growth", [](std::string& detail) {
    sketch::SketchConfig config;
    config.seed = num::derive_seed(42, "sketch");

    // (a) every removed row is within theta of a selected representative
    // in its own cluster, on the committed corpus fixture.
    DataTable augmented = corpus_features(true);
    sketch::EncodedTable encoded = sketch::scale_and_encode(augmented);
    sketch::EncodedTable reduced = sketch::agglomerate_features(encoded, config.target_dim);
    sketch::SampleResult run = sketch::representative_sample(augmented, config);
    for (int c = 0; c < run.k; c++) {
      for (size_t i = 0; i < run.all_ids.size(); i++) {
        if (run.all_cluster[i] != c) continue;
        if (reduced.matrix.row(static_cast<Eigen::Index>(i)).norm() == 0.0) continue;
        double best = -1.0;
        for (size_t s = 0; s < run.selected_ids.size(); s++) {
          if (run.selected_cluster[s] != c) continue;
          for (size_t j = 0; j < run.all_ids.size(); j++) {
            if (run.all_ids[j] == run.selected_ids[s]) {
              best = std::max(best, num::cosine(reduced.matrix.row(static_cast<Eigen::Index>(i)),
                                                reduced.matrix.row(static_cast<Eigen::Index>(j))));
            }
          }
        }
        require(best >= config.theta,
                "row " + std::to_string(i) + " uncovered (best cosine " +
                    std::to_string(best) + ")");
      }
    }

    // (b) a table of identical rows collapses to exactly one pick.
    DataTable copies;
    copies.column_names = {"c"};
    copies.kinds = {ColumnKind::kCategorical};
    for (int i = 0; i < 100; i++) {
      copies.row_ids.push_back(i);
      copies.rows.push_back({"same"});
    }
    require(sketch::representative_sample(copies, config).selected_ids.size() == 1,
            "identical rows must yield exactly one representative");

    // (c) the augmented corpus yields strictly more representatives.
    DataTable baseline = corpus_features(false);
    size_t base_count = sketch::representative_sample(baseline, config).selected_ids.size();
    size_t full_count = run.selected_ids.size();
    require(full_count > base_count, "expected growth, got " + std::to_string(base_count) +
                                         " -> " + std::to_string(full_count));
    detail = "representatives " + std::to_string(base_count) + " -> " +
             std::to_string(full_count);
  });

  criterion("link prediction: positional model dominates and AUC matches the oracle",
            [](std::string& detail) {
    graph::PropertyGraph g = fixtures::barbell_graph();
    auto features = linkpred::attribute_features(g);
    auto hp = fixtures::benchmark_hyperparams();
    auto seeds = fixtures::benchmark_seeds();
    auto gcn = linkpred::evaluate_over_seeds(linkpred::ModelKind::kGcn, g, features,
                                             hp, seeds, 0.2);
    auto pgnn = linkpred::evaluate_over_seeds(linkpred::ModelKind::kPgnn, g, features,
                                              hp, seeds, 0.2);
    require(pgnn.mean_auc > gcn.mean_auc, "mean ordering violated");
    require(pgnn.std_dev < gcn.std_dev, "dispersion ordering violated");

    num::Rng rng(777);
    for (int trial = 0; trial < 100; trial++) {
      int n = static_cast<int>(rng.uniform_int(4, 60));
      std::vector<double> scores;
      std::vector<int> labels;
      bool has0 = false, has1 = false;
      for (int i = 0; i < n; i++) {
        scores.push_back(std::round(rng.uniform() * 10) / 10.0);
        labels.push_back(rng.uniform() < 0.5 ? 0 : 1);
        (labels.back() ? has1 : has0) = true;
      }
      if (!has0) labels[0] = 0;
      if (!has1) labels.back() = 1;
      double got = linkpred::roc_auc(scores, labels);
      double expect = oracles::brute_force_auc(scores, labels);
      require(std::abs(got - expect) <= 1e-12, "AUC mismatch vs counting oracle");
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "gcn %.4f+-%.4f, pgnn %.4f+-%.4f", gcn.mean_auc,
                  gcn.std_dev, pgnn.mean_auc, pgnn.std_dev);
    detail = buf;
  });

  criterion("rule augmentation strictly raises recall at precision 1.0", [](std::string& detail) {
    auto baseline = corpus_graph(false);
    auto augmented = corpus_graph(true);
    auto queries = kbp::load_queries(fixtures::data_dir() + "/corpus/queries.tsv");
    auto gold =
        kbp::load_protected_gold(fixtures::data_dir() + "/corpus/protected_gold.tsv");

    auto base = kbp::evaluate_cold_start(baseline, queries);
    auto full = kbp::evaluate_cold_start(augmented, queries);
    require(base.hop0.precision() == 1.0 && base.hop1.precision() == 1.0,
            "baseline precision not 1.0");
    require(full.hop0.precision() == 1.0 && full.hop1.precision() == 1.0,
            "augmented precision not 1.0");
    require(full.hop0.recall() > base.hop0.recall(), "hop-0 recall did not increase");
    require(full.hop1.recall() > base.hop1.recall(), "hop-1 recall did not increase");

    auto base_prot = kbp::protected_recall(baseline, gold);
    auto full_prot = kbp::protected_recall(augmented, gold);
    require(full_prot.aggregate.recall() > base_prot.aggregate.recall(),
            "protected recall did not increase");

    // Error propagation: deleting the hop-0 gold edge (Alice -> Bob) turns
    // the dependent hop-1 query's gold into misses, one for one.
    graph::PropertyGraph cut;
    for (const auto& node : augmented.nodes()) {
      int64_t id = cut.resolve_person(node.canonical_name);
      for (const auto& [attr, values] : node.attributes) {
        for (const auto& v : values) cut.add_attribute(id, attr, v);
      }
    }
    int64_t alice = *augmented.find_person("Alice Johnson");
    int64_t bob = *augmented.find_person("Bob Smith");
    for (const auto& e : augmented.edges()) {
      if ((e.src == alice && e.dst == bob) || (e.src == bob && e.dst == alice)) continue;
      cut.add_edge(cut.resolve_person(augmented.node(e.src).canonical_name),
                   cut.resolve_person(augmented.node(e.dst).canonical_name), e.relation,
                   e.provenance, e.score);
    }
    auto after = kbp::evaluate_cold_start(cut, queries);
    require(after.hop0.tp == full.hop0.tp - 1 && after.hop0.fn == full.hop0.fn + 1,
            "hop-0 counts moved unexpectedly");
    require(after.hop1.tp == full.hop1.tp - 1 && after.hop1.fn == full.hop1.fn + 1,
            "hop-1 propagation identity violated");

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "hop0 %.3f->%.3f, hop1 %.3f->%.3f, protected %.3f->%.3f",
                  base.hop0.recall(), full.hop0.recall(), base.hop1.recall(),
                  full.hop1.recall(), base_prot.aggregate.recall(),
                  full_prot.aggregate.recall());
    detail = buf;
  });

  criterion("fairness suite: shapley, lime oracle, importance, report row",
            [](std::string& detail) {
    // Exact Shapley efficiency on several fixtures.
    auto model8 = stump_model(8, 5, 29);
    num::Matrix background = random_matrix(10, 8, 30).unaryExpr(
        [](double v) { return v > 0.4 ? 1.0 : 0.0; });
    num::Rng rng(31);
    for (int trial = 0; trial < 8; trial++) {
      num::Vector row(8);
      for (int j = 0; j < 8; j++) row[j] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      auto shap =
          fairness::shap_values(model8, row, background, fairness::ShapMode::kExact, 2);
      require(std::abs(shap.residual) < 1e-6, "efficiency residual too large");
    }

    // Monte-Carlo vs exact within 0.02 at 10k permutations, 5 features.
    auto model5 = stump_model(5, 2, 19);
    num::Matrix bg5 = random_matrix(6, 5, 20).unaryExpr(
        [](double v) { return v > 0.4 ? 1.0 : 0.0; });
    num::Vector row5(5);
    row5 << 1, 0, 1, 1, 0;
    auto exact = fairness::shap_values(model5, row5, bg5, fairness::ShapMode::kExact, 4);
    auto mc = fairness::shap_values(model5, row5, bg5, fairness::ShapMode::kMonteCarlo, 4,
                                    10000);
    double max_dev = 0.0;
    for (int j = 0; j < 5; j++) {
      max_dev = std::max(max_dev, std::abs(exact.values[static_cast<size_t>(j)] -
                                           mc.values[static_cast<size_t>(j)]));
    }
    require(max_dev < 0.02, "montecarlo deviation " + std::to_string(max_dev));

    // LIME equals the closed-form weighted least squares on the same
    // perturbation set.
    auto model20 = stump_model(20, 7, 11);
    num::Vector row20(20);
    {
      num::Rng row_rng(40);
      for (int j = 0; j < 20; j++) row20[j] = row_rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    auto lime = fairness::lime_explain(model20, row20, 300, 0.0, 9);
    const double kernel_width = 0.75 * std::sqrt(20.0);
    num::Rng lime_rng(num::derive_seed(9, "lime"));
    num::Matrix design(300, 21);
    std::vector<double> y, w;
    for (int s = 0; s < 300; s++) {
      num::Vector z = row20;
      for (int j = 0; j < 20; j++) {
        if (lime_rng.uniform() < 0.5) z[j] = 1.0 - z[j];
      }
      design(s, 0) = 1.0;
      design.row(s).tail(20) = z.transpose();
      y.push_back(model20.proba1(z));
      w.push_back(std::exp(-(z - row20).squaredNorm() / (kernel_width * kernel_width)));
    }
    auto beta = oracles::wls_normal_equations(design, y, w);
    for (int j = 0; j < 20; j++) {
      require(std::abs(lime.weights[static_cast<size_t>(j)] -
                       beta[static_cast<size_t>(j) + 1]) < 1e-8,
              "lime weight differs from the normal-equations oracle");
    }

    // Permutation importance of an independent protected feature ~ 0.
    num::Rng data_rng(55);
    num::Matrix x(300, 3);
    std::vector<int> labels;
    for (int i = 0; i < 300; i++) {
      x(i, 0) = data_rng.uniform() < 0.5 ? 0.0 : 1.0;
      x(i, 1) = data_rng.uniform() < 0.5 ? 0.0 : 1.0;
      x(i, 2) = data_rng.uniform() < 0.5 ? 0.0 : 1.0;
      labels.push_back(x(i, 0) > 0.5 ? 1 : 0);
    }
    fairness::ForestParams params;
    params.n_trees = 40;
    params.features_per_split = 3;
    auto audit_model = fairness::train_forest(x, labels, params, 6);
    audit_model.feature_names = {"family_relation", "gender", "date_of_birth"};
    auto audit = fairness::audit_protected(audit_model, x, labels, {"gender"}, 60);
    require(std::abs(audit.features[1].importance) <= 0.01,
            "independent protected feature importance " +
                std::to_string(audit.features[1].importance));
    require(!audit.features[1].flagged, "independent protected feature was flagged");

    // Classification-report row: precision 1.00, recall 0.95 -> F1 ~0.98.
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
    require(std::abs(m.precision - 1.00) <= 0.01 && std::abs(m.recall - 0.95) <= 0.01 &&
                std::abs(m.f1 - 0.98) <= 0.01,
            "report row deviates from 1.00/0.95/0.98");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "mc_dev=%.4f, gender importance=%.4f, row f1=%.4f",
                  max_dev, audit.features[1].importance, m.f1);
    detail = buf;
  });

  criterion("end-to-end determinism: identical configs hash to identical manifests",
            [](std::string& detail) {
    fs::path out1 = fs::temp_directory_path() / "pkb-acc-run1";
    fs::path out2 = fs::temp_directory_path() / "pkb-acc-run2";
    fs::remove_all(out1);
    fs::remove_all(out2);
    auto manifest1 = pipeline::run_pipeline(fixtures::corpus_config(out1.string(), true));
    auto manifest2 = pipeline::run_pipeline(fixtures::corpus_config(out2.string(), true));
    require(manifest1.artifacts.size() == manifest2.artifacts.size(),
            "artifact counts differ");
    for (size_t i = 0; i < manifest1.artifacts.size(); i++) {
      require(manifest1.artifacts[i].name == manifest2.artifacts[i].name &&
                  manifest1.artifacts[i].sha256 == manifest2.artifacts[i].sha256,
              "hash mismatch for " + manifest1.artifacts[i].name);
    }
    fs::remove_all(out1);
    fs::remove_all(out2);
    detail = std::to_string(manifest1.artifacts.size()) + " artifacts, hashes identical";
  });

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all %d criteria passed\n", g_index);
  return 0;
}
