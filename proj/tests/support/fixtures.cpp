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

#include "support/fixtures.hpp"

#include "pkb/random.hpp"

#ifndef PKB_DATA_DIR
#define PKB_DATA_DIR "data"
#endif

namespace pkb::fixtures {

graph::PropertyGraph barbell_graph(int clique, int path, int tags) {
  graph::PropertyGraph g;
  std::vector<int64_t> a, b, p;
  for (int i = 0; i < clique; i++) a.push_back(g.resolve_person("a" + std::to_string(i)));
  for (int i = 0; i < clique; i++) b.push_back(g.resolve_person("b" + std::to_string(i)));
  for (int i = 0; i < path; i++) p.push_back(g.resolve_person("p" + std::to_string(i)));
  auto link = [&](int64_t u, int64_t v) {
    g.add_edge(u, v, "linked", graph::Provenance::kDataset, 1.0);
  };
  for (size_t i = 0; i < a.size(); i++) {
    for (size_t j = i + 1; j < a.size(); j++) {
      link(a[i], a[j]);
      link(b[i], b[j]);
    }
  }
  int64_t prev = a.back();
  for (int64_t node : p) {
    link(prev, node);
    prev = node;
  }
  link(prev, b.front());

  num::Rng rng(num::derive_seed(99, "attrs"));
  for (int64_t v = 0; v < g.node_count(); v++) {
    g.add_attribute(v, "tag", "t" + std::to_string(rng.uniform_int(0, tags - 1)));
  }
  return g;
}

linkpred::Hyperparams benchmark_hyperparams() {
  linkpred::Hyperparams hp;
  hp.hidden = 16;
  hp.out_dim = 16;
  hp.epochs = 200;
  hp.learning_rate = 0.05;
  return hp;
}

std::vector<uint64_t> benchmark_seeds(int count) {
  std::vector<uint64_t> seeds;
  for (int i = 0; i < count; i++) {
    seeds.push_back(num::derive_seed(1, "s" + std::to_string(i)));
  }
  return seeds;
}

std::string data_dir() { return PKB_DATA_DIR; }

pipeline::Config corpus_config(const std::string& output_dir, bool annotators) {
  pipeline::Config config;
  config.record_files = {data_dir() + "/corpus/synthetic_30.json"};
  config.rules_dir = data_dir() + "/rules";
  config.output_dir = output_dir;
  config.queries_file = data_dir() + "/corpus/queries.tsv";
  config.protected_gold_file = data_dir() + "/corpus/protected_gold.tsv";
  config.annotators_enabled = annotators;
  config.master_seed = 42;
  return config;
}

}  // namespace pkb::fixtures
