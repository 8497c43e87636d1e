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

#ifndef PKB_TESTS_FIXTURES_H_
#define PKB_TESTS_FIXTURES_H_

#include <string>

#include "pkb/graph.hpp"
#include "pkb/linkpred.hpp"
#include "pkb/pipeline.hpp"

namespace pkb::fixtures {

// Two cliques of `clique` nodes joined by a path of `path` nodes, with a
// seeded categorical "tag" attribute on every node so that the default
// one-hot featurization carries (structure-free) signal.
graph::PropertyGraph barbell_graph(int clique = 10, int path = 4, int tags = 8);

// Hyperparameters used by the community benchmark.
linkpred::Hyperparams benchmark_hyperparams();

// Seeds for the repeated-run comparison.
std::vector<uint64_t> benchmark_seeds(int count = 5);

// Paths into the committed corpus (relative to the source tree).
std::string data_dir();

// Pipeline configuration over the bundled 30-sentence corpus; annotators
// toggled by the flag, artifacts under `output_dir`.
pipeline::Config corpus_config(const std::string& output_dir, bool annotators);

}  // namespace pkb::fixtures

#endif  // PKB_TESTS_FIXTURES_H_
