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

#include "pkb/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pkb/explain.hpp"
#include "pkb/hash.hpp"
#include "pkb/random.hpp"
#include "pkb/strings.hpp"

namespace pkb::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

Config Config::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  Config config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) +
                               ": expected key=value");
    }
    config.apply_override(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return config;
}

void Config::apply_override(const std::string& key, const std::string& value) {
  auto as_int = [&] { return std::stoi(value); };
  auto as_double = [&] { return std::stod(value); };
  auto as_bool = [&] {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw std::runtime_error("config key '" + key + "': bad boolean '" + value + "'");
  };

  if (key == "seed") {
    master_seed = std::stoull(value);
  } else if (key == "paths.records") {
    record_files.clear();
    for (const auto& part : split(value, ',')) {
      std::string t = trim(part);
      if (!t.empty()) record_files.emplace_back(t);
    }
  } else if (key == "paths.rules_dir") {
    rules_dir = value;
  } else if (key == "paths.output_dir") {
    output_dir = value;
  } else if (key == "paths.queries") {
    queries_file = value;
  } else if (key == "paths.protected_gold") {
    protected_gold_file = value;
  } else if (key == "annotate.enabled") {
    annotators_enabled = as_bool();
  } else if (key == "sketch.sketch_rows") {
    sketch.sketch_rows = as_int();
  } else if (key == "sketch.theta") {
    sketch.theta = as_double();
  } else if (key == "sketch.target_dim") {
    sketch.target_dim = as_int();
  } else if (key == "sketch.k_max") {
    sketch.k_max = as_int();
  } else if (key == "linkpred.hidden") {
    linkpred.hidden = as_int();
  } else if (key == "linkpred.out_dim") {
    linkpred.out_dim = as_int();
  } else if (key == "linkpred.epochs") {
    linkpred.epochs = as_int();
  } else if (key == "linkpred.learning_rate") {
    linkpred.learning_rate = as_double();
  } else if (key == "linkpred.test_fraction") {
    linkpred_test_fraction = as_double();
  } else if (key == "linkpred.threshold") {
    linkpred_threshold = as_double();
  } else if (key == "linkpred.eval_seeds") {
    linkpred_eval_seeds = as_int();
  } else if (key == "evaluate.generated_hop0") {
    generated_hop0 = as_int();
  } else if (key == "evaluate.generated_hop1") {
    generated_hop1 = as_int();
  } else if (key == "forest.n_trees") {
    forest.n_trees = as_int();
  } else if (key == "forest.max_depth") {
    forest.max_depth = as_int();
  } else if (key == "fairness.protected") {
    protected_attributes.clear();
    for (const auto& part : split(value, ',')) {
      std::string t = trim(part);
      if (!t.empty()) protected_attributes.push_back(t);
    }
  } else if (key == "fairness.explain_rows") {
    explain_rows = as_int();
  } else if (key == "fairness.lime_samples") {
    lime_samples = as_int();
  } else if (key == "fairness.shap_permutations") {
    shap_permutations = as_int();
  } else {
    throw std::runtime_error("unknown config key '" + key + "'");
  }
}

void Config::validate() const {
  if (record_files.empty()) {
    throw std::runtime_error("config: paths.records is required");
  }
  for (const auto& f : record_files) {
    if (!fs::exists(f)) throw std::runtime_error("config: missing records file " + f.string());
  }
  // The rules directory is the annotate stage's concern; its absence is
  // reported there so the failing stage is named.
  if (!queries_file.empty() && !fs::exists(queries_file)) {
    throw std::runtime_error("config: missing queries file " + queries_file.string());
  }
  if (!protected_gold_file.empty() && !fs::exists(protected_gold_file)) {
    throw std::runtime_error("config: missing protected gold file " +
                             protected_gold_file.string());
  }
}

// ---------------------------------------------------------------------------
// Stages

namespace {

Artifact make_artifact(const Config& config, const std::string& name) {
  Artifact a;
  a.name = name;
  a.path = name;
  a.sha256 = sha256_file(config.output_dir / name);
  return a;
}

void ensure_output_dir(const Config& config) {
  fs::create_directories(config.output_dir);
}

json metrics_block(const kbp::HopMetrics& m) {
  return json{{"precision", m.precision()}, {"recall", m.recall()},
              {"f1", m.f1_score()},         {"tp", m.tp},
              {"fp", m.fp},                 {"fn", m.fn}};
}

json class_metrics_block(const fairness::ClassMetrics& m) {
  return json{{"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"support", m.support}};
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

void stage_ingest(const Config& config, PipelineState* state) {
  try {
    tacred::Dataset merged;
    std::set<std::string> ids;
    for (const auto& file : config.record_files) {
      tacred::Dataset ds = tacred::parse_tacred(file);
      for (auto& r : ds.records) {
        if (!ids.insert(r.id).second) {
          throw std::runtime_error("duplicate record id across files: " + r.id);
        }
        merged.records.push_back(std::move(r));
      }
      merged.relation_inventory.insert(ds.relation_inventory.begin(),
                                       ds.relation_inventory.end());
      merged.entity_type_inventory.insert(ds.entity_type_inventory.begin(),
                                          ds.entity_type_inventory.end());
      merged.warnings.insert(merged.warnings.end(), ds.warnings.begin(),
                             ds.warnings.end());
    }
    state->dataset = std::move(merged);
  } catch (const std::exception& e) {
    throw StageError("ingest", e.what());
  }
}

void stage_annotate(const Config& config, PipelineState* state) {
  try {
    if (config.annotators_enabled) {
      if (config.rules_dir.empty()) {
        throw std::runtime_error("no rules directory configured");
      }
      state->rules = annotate::load_rules(config.rules_dir);
    } else {
      // Annotators off: dataset-provenance mentions and gold relations only.
      state->rules = annotate::RuleSet{};
      state->rules.relation_inventory = tacred::default_relation_inventory();
    }
    state->mentions.clear();
    state->relations.clear();
    for (const auto& record : state->dataset.records) {
      auto mentions = annotate::annotate_entities(record, state->rules);
      auto relations = annotate::annotate_relations(record, mentions, state->rules);
      state->mentions.push_back(std::move(mentions));
      state->relations.push_back(std::move(relations));
    }
  } catch (const std::exception& e) {
    throw StageError("annotate", e.what());
  }
}

void stage_graph(const Config& config, PipelineState* state) {
  (void)config;
  try {
    state->base_graph =
        graph::build_graph(state->dataset, state->mentions, state->relations);
    state->final_graph = state->base_graph;
  } catch (const std::exception& e) {
    throw StageError("graph", e.what());
  }
}

void stage_linkpred(const Config& config, PipelineState* state) {
  try {
    const auto& g = state->base_graph;
    linkpred::NodeFeatures features = linkpred::attribute_features(g);

    std::vector<uint64_t> seeds;
    for (int i = 0; i < config.linkpred_eval_seeds; i++) {
      seeds.push_back(num::derive_seed(config.master_seed,
                                       "linkpred-eval-" + std::to_string(i)));
    }
    state->gcn_summary = linkpred::evaluate_over_seeds(
        linkpred::ModelKind::kGcn, g, features, config.linkpred,
        seeds, config.linkpred_test_fraction);
    state->pgnn_summary = linkpred::evaluate_over_seeds(
        linkpred::ModelKind::kPgnn, g, features, config.linkpred,
        seeds, config.linkpred_test_fraction);

    uint64_t final_seed = num::derive_seed(config.master_seed, "linkpred-final");
    linkpred::EdgeSplit split =
        linkpred::split_edges(g, config.linkpred_test_fraction, final_seed);
    linkpred::Hyperparams hp = config.linkpred;
    hp.seed = final_seed;
    linkpred::LinkModel model =
        linkpred::train_link_model(linkpred::ModelKind::kPgnn, g, split, features, hp);
    state->final_graph =
        linkpred::augment_with_predictions(g, model, config.linkpred_threshold);
    state->predicted_edges =
        static_cast<int64_t>(state->final_graph.edges().size() - g.edges().size());
  } catch (const std::exception& e) {
    throw StageError("linkpred", e.what());
  }
}

Artifact write_validation_report(const Config& config, const PipelineState& state) {
  ensure_output_dir(config);
  std::ostringstream report;
  tacred::write_validation_report(state.dataset, state.rules.relation_inventory,
                                  report);
  write_text_file(config.output_dir / "validation.txt", report.str());
  return make_artifact(config, "validation.txt");
}

Artifact write_edgelist(const Config& config, const graph::PropertyGraph& g) {
  ensure_output_dir(config);
  graph::export_edgelist(g, config.output_dir / "edges.tsv");
  return make_artifact(config, "edges.tsv");
}

Artifact write_triples(const Config& config, const graph::PropertyGraph& g) {
  ensure_output_dir(config);
  graph::export_triples(g, config.output_dir / "triples.txt");
  return make_artifact(config, "triples.txt");
}

Artifact write_feature_table(const Config& config, const graph::PropertyGraph& g) {
  ensure_output_dir(config);
  DataTable table = graph::to_feature_table(g, g.attribute_schema());
  table.save_csv((config.output_dir / "features.csv").string());
  return make_artifact(config, "features.csv");
}

Artifact write_linkpred_metrics(const Config& config, const PipelineState& state) {
  ensure_output_dir(config);
  auto summary_block = [](const linkpred::EvalSummary& s) {
    return json{{"model", s.model},
                {"roc_auc", s.mean_auc},
                {"std_dev", s.std_dev},
                {"seeds", s.seeds},
                {"aucs", s.aucs}};
  };
  json doc = summary_block(state.pgnn_summary);
  doc["comparison"] = json::array({summary_block(state.gcn_summary),
                                   summary_block(state.pgnn_summary)});
  doc["threshold"] = config.linkpred_threshold;
  doc["predicted_edges"] = state.predicted_edges;
  write_text_file(config.output_dir / "linkpred.metrics.json", doc.dump(2) + "\n");
  return make_artifact(config, "linkpred.metrics.json");
}

Artifact write_kbp_metrics(const Config& config, const PipelineState& state) {
  ensure_output_dir(config);
  const auto& g = state.final_graph;
  std::vector<kbp::SlotQuery> queries;
  if (!config.queries_file.empty()) {
    queries = kbp::load_queries(config.queries_file);
  } else {
    queries = kbp::generate_queries(
        g, num::derive_seed(config.master_seed, "evalkbp-queries"),
        config.generated_hop0, config.generated_hop1);
  }
  kbp::ColdStartResult result = kbp::evaluate_cold_start(g, queries);
  json doc{{"hop0", metrics_block(result.hop0)},
           {"hop1", metrics_block(result.hop1)},
           {"hopall", metrics_block(result.hopall)},
           {"queries", queries.size()}};
  if (!config.protected_gold_file.empty()) {
    kbp::ProtectedGold gold = kbp::load_protected_gold(config.protected_gold_file);
    kbp::ProtectedReport report = kbp::protected_recall(g, gold);
    json per_attribute = json::object();
    for (const auto& [attribute, metrics] : report.per_attribute) {
      per_attribute[attribute] = metrics_block(metrics);
    }
    doc["protected"] = json{{"per_attribute", per_attribute},
                            {"aggregate", metrics_block(report.aggregate)}};
  }
  write_text_file(config.output_dir / "kbp_metrics.json", doc.dump(2) + "\n");
  return make_artifact(config, "kbp_metrics.json");
}

std::vector<Artifact> write_fairness_report(const Config& config,
                                            const graph::PropertyGraph& g) {
  ensure_output_dir(config);
  DataTable table = graph::to_feature_table(g, g.attribute_schema());
  std::vector<int> labels = table.take_int_column("target");
  sketch::EncodedTable encoded = sketch::scale_and_encode(table);

  fairness::ForestModel model = fairness::train_forest(
      encoded.matrix, labels, config.forest,
      num::derive_seed(config.master_seed, "fairness-forest"));
  for (const auto& meta : encoded.column_meta) {
    model.feature_names.push_back(meta.label());
  }

  fairness::ClassificationReport report =
      fairness::classification_report(model, encoded.matrix, labels);

  json doc;
  {
    json per_class = json::object();
    for (const auto& [cls, metrics] : report.per_class) {
      per_class[std::to_string(cls)] = class_metrics_block(metrics);
    }
    doc["classification_report"] = json{{"accuracy", report.accuracy},
                                        {"per_class", per_class},
                                        {"macro_avg", class_metrics_block(report.macro)},
                                        {"weighted_avg", class_metrics_block(report.weighted)}};
  }

  const int explain_rows = std::min<int>(config.explain_rows, encoded.rows());
  json lime_blocks = json::array();
  json shap_blocks = json::array();
  std::vector<double> lime_row0(encoded.column_meta.size(), 0.0);
  std::vector<double> shap_row0(encoded.column_meta.size(), 0.0);
  for (int i = 0; i < explain_rows; i++) {
    num::Vector row = encoded.matrix.row(i).transpose();
    fairness::LimeExplanation lime = fairness::lime_explain(
        model, row, config.lime_samples, 0.0,
        num::derive_seed(config.master_seed, "fairness-lime-" + std::to_string(i)));
    bool exact = encoded.cols() <= 15;
    fairness::ShapExplanation shap = fairness::shap_values(
        model, row, encoded.matrix,
        exact ? fairness::ShapMode::kExact : fairness::ShapMode::kMonteCarlo,
        num::derive_seed(config.master_seed, "fairness-shap-" + std::to_string(i)),
        config.shap_permutations);
    json lime_weights = json::object();
    json shap_values = json::object();
    for (size_t f = 0; f < model.feature_names.size(); f++) {
      lime_weights[model.feature_names[f]] = lime.weights[f];
      shap_values[model.feature_names[f]] = shap.values[f];
    }
    if (i == 0) {
      lime_row0 = lime.weights;
      shap_row0 = shap.values;
    }
    lime_blocks.push_back(json{{"row_id", encoded.row_ids[static_cast<size_t>(i)]},
                               {"intercept", lime.intercept},
                               {"fidelity", lime.fidelity},
                               {"weights", lime_weights}});
    shap_blocks.push_back(json{{"row_id", encoded.row_ids[static_cast<size_t>(i)]},
                               {"mode", exact ? "exact" : "montecarlo"},
                               {"base_value", shap.base_value},
                               {"residual", shap.residual},
                               {"values", shap_values}});
  }
  doc["lime"] = lime_blocks;
  doc["shap"] = shap_blocks;

  fairness::AuditReport audit = fairness::audit_protected(
      model, encoded.matrix, labels, config.protected_attributes,
      num::derive_seed(config.master_seed, "fairness-audit"));
  json importance = json::array();
  for (const auto& fi : audit.features) {
    importance.push_back(json{{"feature", fi.name},
                              {"importance", fi.importance},
                              {"rank", fi.rank},
                              {"protected", fi.is_protected},
                              {"flagged", fi.flagged}});
  }
  doc["permutation_importance"] = importance;
  doc["flagged_protected"] = audit.flagged_protected;
  doc["baseline_accuracy"] = audit.baseline_accuracy;

  write_text_file(config.output_dir / "fairness_report.json", doc.dump(2) + "\n");

  // Spreadsheet twin.
  std::ostringstream csv;
  csv << "feature,importance,rank,protected,flagged,lime_weight_row0,shap_value_row0\n";
  char buf[96];
  for (size_t f = 0; f < audit.features.size(); f++) {
    const auto& fi = audit.features[f];
    std::snprintf(buf, sizeof(buf), "%.9g,%d,%d,%d,%.9g,%.9g", fi.importance, fi.rank,
                  fi.is_protected ? 1 : 0, fi.flagged ? 1 : 0,
                  f < lime_row0.size() ? lime_row0[f] : 0.0,
                  f < shap_row0.size() ? shap_row0[f] : 0.0);
    csv << fi.name << ',' << buf << '\n';
  }
  write_text_file(config.output_dir / "fairness_report.csv", csv.str());

  return {make_artifact(config, "fairness_report.json"),
          make_artifact(config, "fairness_report.csv")};
}

std::vector<Artifact> write_sample_outputs(const Config& config,
                                           const graph::PropertyGraph& g) {
  ensure_output_dir(config);
  DataTable table = graph::to_feature_table(g, g.attribute_schema());
  table.take_int_column("target");
  sketch::SketchConfig sketch_config = config.sketch;
  sketch_config.seed = num::derive_seed(config.master_seed, "sketch");
  sketch::SampleResult result = sketch::representative_sample(table, sketch_config);
  sketch::write_samples_csv(result, (config.output_dir / "samples.csv").string());
  sketch::write_projection_csv(result, (config.output_dir / "projection.csv").string());
  return {make_artifact(config, "samples.csv"), make_artifact(config, "projection.csv")};
}

std::string Manifest::to_json() const {
  json doc;
  doc["seed"] = seed;
  json list = json::array();
  for (const auto& a : artifacts) {
    list.push_back(json{{"name", a.name}, {"path", a.path}, {"sha256", a.sha256}});
  }
  doc["artifacts"] = list;
  return doc.dump(2) + "\n";
}

Manifest run_pipeline(const Config& config) {
  config.validate();
  PipelineState state;
  stage_ingest(config, &state);
  stage_annotate(config, &state);
  stage_graph(config, &state);
  stage_linkpred(config, &state);

  Manifest manifest;
  manifest.seed = config.master_seed;
  auto add = [&](const Artifact& a) { manifest.artifacts.push_back(a); };

  try {
    add(write_validation_report(config, state));
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("ingest", e.what());
  }
  try {
    add(write_edgelist(config, state.final_graph));
    add(write_triples(config, state.final_graph));
    add(write_feature_table(config, state.base_graph));
  } catch (const std::exception& e) {
    throw StageError("graph", e.what());
  }
  try {
    add(write_linkpred_metrics(config, state));
  } catch (const std::exception& e) {
    throw StageError("linkpred", e.what());
  }
  try {
    add(write_kbp_metrics(config, state));
  } catch (const std::exception& e) {
    throw StageError("evaluate", e.what());
  }
  try {
    for (const auto& a : write_fairness_report(config, state.base_graph)) add(a);
  } catch (const std::exception& e) {
    throw StageError("fairness", e.what());
  }
  try {
    for (const auto& a : write_sample_outputs(config, state.base_graph)) add(a);
  } catch (const std::exception& e) {
    throw StageError("sample", e.what());
  }

  std::sort(manifest.artifacts.begin(), manifest.artifacts.end(),
            [](const Artifact& a, const Artifact& b) { return a.name < b.name; });
  write_text_file(config.output_dir / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace pkb::pipeline
