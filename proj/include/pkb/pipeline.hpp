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

#ifndef PKB_PIPELINE_H_
#define PKB_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pkb/annotate.hpp"
#include "pkb/forest.hpp"
#include "pkb/graph.hpp"
#include "pkb/kbp_eval.hpp"
#include "pkb/linkpred.hpp"
#include "pkb/sketch.hpp"
#include "pkb/tacred.hpp"

namespace pkb::pipeline {

// Flat key=value configuration with section prefixes
// ("sketch.theta=0.85", "linkpred.epochs=200", "seed=42").
struct Config {
  std::vector<std::filesystem::path> record_files;
  std::filesystem::path rules_dir;
  std::filesystem::path output_dir = "out";
  std::filesystem::path queries_file;         // optional; generated when empty
  std::filesystem::path protected_gold_file;  // optional
  bool annotators_enabled = true;

  sketch::SketchConfig sketch;
  linkpred::Hyperparams linkpred;
  double linkpred_test_fraction = 0.2;
  double linkpred_threshold = 0.9;
  int linkpred_eval_seeds = 5;
  int generated_hop0 = 20;
  int generated_hop1 = 20;

  fairness::ForestParams forest;
  std::vector<std::string> protected_attributes = {"gender", "age", "ethnicity",
                                                   "location", "religion"};
  int explain_rows = 1;
  int lime_samples = 500;
  int shap_permutations = 2000;

  uint64_t master_seed = 42;

  static Config from_file(const std::filesystem::path& path);
  // "<section.key>=<value>" overrides; unknown keys throw.
  void apply_override(const std::string& key, const std::string& value);
  // Referenced paths must exist (output_dir is created on demand).
  void validate() const;
};

struct StageError : std::runtime_error {
  StageError(std::string stage_name, const std::string& message)
      : std::runtime_error("stage " + stage_name + ": " + message),
        stage(std::move(stage_name)) {}
  std::string stage;
};

struct Artifact {
  std::string name;
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct Manifest {
  std::vector<Artifact> artifacts;
  uint64_t seed = 0;
  std::string to_json() const;
};

// In-memory results of the stage chain; subcommands run a prefix of it.
struct PipelineState {
  tacred::Dataset dataset;
  annotate::RuleSet rules;
  std::vector<std::vector<annotate::EntityMention>> mentions;
  std::vector<std::vector<annotate::RelationAnnotation>> relations;
  graph::PropertyGraph base_graph;
  graph::PropertyGraph final_graph;  // with predicted edges
  linkpred::EvalSummary gcn_summary;
  linkpred::EvalSummary pgnn_summary;
  int64_t predicted_edges = 0;
};

// Individual stages. Each throws StageError naming itself on failure.
void stage_ingest(const Config& config, PipelineState* state);
void stage_annotate(const Config& config, PipelineState* state);
void stage_graph(const Config& config, PipelineState* state);
void stage_linkpred(const Config& config, PipelineState* state);

// Artifact writers (used by both run_pipeline and the subcommands).
Artifact write_validation_report(const Config& config, const PipelineState& state);
Artifact write_edgelist(const Config& config, const graph::PropertyGraph& g);
Artifact write_triples(const Config& config, const graph::PropertyGraph& g);
Artifact write_feature_table(const Config& config, const graph::PropertyGraph& g);
Artifact write_linkpred_metrics(const Config& config, const PipelineState& state);
Artifact write_kbp_metrics(const Config& config, const PipelineState& state);
std::vector<Artifact> write_fairness_report(const Config& config,
                                            const graph::PropertyGraph& g);
std::vector<Artifact> write_sample_outputs(const Config& config,
                                           const graph::PropertyGraph& g);

// The full chain: ingest -> annotate -> graph -> linkpred -> evaluate ->
// fairness -> sample, writing every declared artifact and returning the
// manifest (also written as manifest.json).
Manifest run_pipeline(const Config& config);

}  // namespace pkb::pipeline

#endif  // PKB_PIPELINE_H_
