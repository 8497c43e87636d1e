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

// Command-line driver: populate a personal knowledge base from TACRED-style
// records, predict missing links, evaluate, audit fairness, and sample the
// result. Every subcommand recomputes its stage prefix deterministically,
// so stage outputs are byte-identical to a full `run`.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pkb/explain.hpp"
#include "pkb/pipeline.hpp"
#include "pkb/strings.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string records;
  std::string rules_dir;
  std::string output_dir;
  std::string seed;
  bool no_rules = false;
  bool no_predictions = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("-c,--config", args->config_file, "Configuration file (key=value lines)");
  cmd->add_option("-s,--set", args->overrides, "Override a config key, e.g. sketch.theta=0.9");
  cmd->add_option("--records", args->records, "Comma-separated record files");
  cmd->add_option("--rules", args->rules_dir, "Rule pack directory");
  cmd->add_option("-o,--out", args->output_dir, "Output directory");
  cmd->add_option("--seed", args->seed, "Master seed");
  cmd->add_flag("--no-rules", args->no_rules, "Disable the rule annotators");
}

pkb::pipeline::Config build_config(const CommonArgs& args) {
  pkb::pipeline::Config config;
  if (!args.config_file.empty()) {
    config = pkb::pipeline::Config::from_file(args.config_file);
  }
  if (!args.records.empty()) config.apply_override("paths.records", args.records);
  if (!args.rules_dir.empty()) config.apply_override("paths.rules_dir", args.rules_dir);
  if (!args.output_dir.empty()) config.apply_override("paths.output_dir", args.output_dir);
  if (!args.seed.empty()) config.apply_override("seed", args.seed);
  if (args.no_rules) config.apply_override("annotate.enabled", "false");
  for (const auto& kv : args.overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--set expects key=value, got '" + kv + "'");
    }
    config.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

// Stage prefixes shared by the subcommands.
void run_prefix_graph(const pkb::pipeline::Config& config,
                      pkb::pipeline::PipelineState* state) {
  config.validate();
  pkb::pipeline::stage_ingest(config, state);
  pkb::pipeline::stage_annotate(config, state);
  pkb::pipeline::stage_graph(config, state);
}

void run_prefix_linkpred(const pkb::pipeline::Config& config,
                         pkb::pipeline::PipelineState* state) {
  run_prefix_graph(config, state);
  pkb::pipeline::stage_linkpred(config, state);
}

int cmd_ingest(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  config.validate();
  pkb::pipeline::stage_ingest(config, &state);
  pkb::pipeline::stage_annotate(config, &state);
  auto artifact = pkb::pipeline::write_validation_report(config, state);
  for (const auto& w : state.dataset.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "records: " << state.dataset.records.size() << "\n"
            << "relations: " << state.dataset.relation_inventory.size() << "\n"
            << "entity types: " << state.dataset.entity_type_inventory.size() << "\n"
            << "report: " << (config.output_dir / artifact.path).string() << "\n";
  return 0;
}

int cmd_annotate(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  config.validate();
  pkb::pipeline::stage_ingest(config, &state);
  pkb::pipeline::stage_annotate(config, &state);

  std::filesystem::create_directories(config.output_dir);
  auto path = config.output_dir / "annotations.tsv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  size_t mention_count = 0, relation_count = 0;
  for (size_t i = 0; i < state.dataset.records.size(); i++) {
    for (const auto& m : state.mentions[i]) {
      out << "mention\t" << m.record_id << '\t' << m.span.start << '\t' << m.span.end
          << '\t' << m.coarse_type << '\t' << m.fine_type << '\t'
          << pkb::annotate::provenance_name(m.provenance) << '\t' << m.surface << '\n';
      mention_count++;
    }
    for (const auto& r : state.relations[i]) {
      out << "relation\t" << r.record_id << '\t' << r.relation << '\t'
          << pkb::annotate::provenance_name(r.provenance) << '\t' << r.subject.surface
          << '\t' << r.object.surface << '\n';
      relation_count++;
    }
  }
  std::cout << "mentions: " << mention_count << "\nrelations: " << relation_count
            << "\nannotations: " << path.string() << "\n";
  return 0;
}

int cmd_build_graph(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  run_prefix_graph(config, &state);
  auto artifact = pkb::pipeline::write_feature_table(config, state.base_graph);
  std::cout << "nodes: " << state.base_graph.node_count() << "\n"
            << "edges: " << state.base_graph.edges().size() << "\n"
            << "features: " << (config.output_dir / artifact.path).string() << "\n";
  return 0;
}

int cmd_export(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  if (args.no_predictions) {
    run_prefix_graph(config, &state);
  } else {
    run_prefix_linkpred(config, &state);
  }
  auto edges = pkb::pipeline::write_edgelist(config, state.final_graph);
  auto triples = pkb::pipeline::write_triples(config, state.final_graph);
  std::cout << "edgelist: " << (config.output_dir / edges.path).string() << "\n"
            << "triples: " << (config.output_dir / triples.path).string() << "\n";
  return 0;
}

int cmd_linkpred(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  run_prefix_linkpred(config, &state);
  auto metrics = pkb::pipeline::write_linkpred_metrics(config, state);
  pkb::pipeline::write_edgelist(config, state.final_graph);
  std::cout << "gcn auc: " << state.gcn_summary.mean_auc
            << " (std " << state.gcn_summary.std_dev << ")\n"
            << "pgnn auc: " << state.pgnn_summary.mean_auc
            << " (std " << state.pgnn_summary.std_dev << ")\n"
            << "predicted edges: " << state.predicted_edges << "\n"
            << "metrics: " << (config.output_dir / metrics.path).string() << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  run_prefix_linkpred(config, &state);
  auto metrics = pkb::pipeline::write_kbp_metrics(config, state);
  std::cout << "metrics: " << (config.output_dir / metrics.path).string() << "\n";
  return 0;
}

int cmd_fairness(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  run_prefix_graph(config, &state);
  auto artifacts = pkb::pipeline::write_fairness_report(config, state.base_graph);
  for (const auto& a : artifacts) {
    std::cout << "report: " << (config.output_dir / a.path).string() << "\n";
  }
  return 0;
}

int cmd_sample(const CommonArgs& args) {
  auto config = build_config(args);
  pkb::pipeline::PipelineState state;
  run_prefix_graph(config, &state);
  auto artifacts = pkb::pipeline::write_sample_outputs(config, state.base_graph);
  for (const auto& a : artifacts) {
    std::cout << "output: " << (config.output_dir / a.path).string() << "\n";
  }
  return 0;
}

int cmd_run(const CommonArgs& args, bool print_manifest) {
  auto config = build_config(args);
  pkb::pipeline::Manifest manifest = pkb::pipeline::run_pipeline(config);
  if (print_manifest) {
    std::cout << manifest.to_json();
  } else {
    for (const auto& a : manifest.artifacts) {
      std::cout << a.sha256 << "  " << a.path << "\n";
    }
    std::cout << "manifest: " << (config.output_dir / "manifest.json").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personal knowledge base population toolkit"};
  app.set_version_flag("--version", std::string("pkb ") + kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  bool print_manifest = false;

  auto* ingest = app.add_subcommand("ingest", "Parse and validate record files");
  add_common(ingest, &args);
  auto* annotate = app.add_subcommand("annotate", "Run the personal-data annotators");
  add_common(annotate, &args);
  auto* build = app.add_subcommand("build-graph", "Build the property graph feature table");
  add_common(build, &args);
  auto* exp = app.add_subcommand("export", "Export edge list and triples");
  add_common(exp, &args);
  exp->add_flag("--no-predictions", args.no_predictions, "Skip link prediction");
  auto* lp = app.add_subcommand("linkpred", "Train link models and augment the graph");
  add_common(lp, &args);
  auto* ev = app.add_subcommand("evaluate", "Cold-start slot-query evaluation");
  add_common(ev, &args);
  auto* fair = app.add_subcommand("fairness", "Train the surrogate classifier and audit");
  add_common(fair, &args);
  auto* sample = app.add_subcommand("sample", "Representative-set sampling");
  add_common(sample, &args);
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  add_common(run, &args);
  run->add_flag("--manifest", print_manifest, "Print the manifest JSON to stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(args);
    if (annotate->parsed()) return cmd_annotate(args);
    if (build->parsed()) return cmd_build_graph(args);
    if (exp->parsed()) return cmd_export(args);
    if (lp->parsed()) return cmd_linkpred(args);
    if (ev->parsed()) return cmd_evaluate(args);
    if (fair->parsed()) return cmd_fairness(args);
    if (sample->parsed()) return cmd_sample(args);
    if (run->parsed()) return cmd_run(args, print_manifest);
  } catch (const pkb::pipeline::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
