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

#ifndef PKB_LINKPRED_H_
#define PKB_LINKPRED_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pkb/graph.hpp"
#include "pkb/linalg.hpp"

namespace pkb::linkpred {

using NodePair = std::pair<int64_t, int64_t>;

// Positive edges are distinct unordered person pairs; negatives are
// uniformly sampled non-edges of the full graph, one per positive.
struct EdgeSplit {
  std::vector<NodePair> train_pos;
  std::vector<NodePair> test_pos;
  std::vector<NodePair> train_neg;
  std::vector<NodePair> test_neg;
  uint64_t seed = 0;
};

struct NodeFeatures {
  num::Matrix matrix;  // one row per node
  std::string source;  // "attribute-one-hot" or "constant"
};

enum class ModelKind { kGcn, kPgnn };

std::string_view model_name(ModelKind kind);

struct Hyperparams {
  int hidden = 16;
  int out_dim = 16;
  int epochs = 200;
  double learning_rate = 0.01;
  uint64_t seed = 1;
};

// Trained pair scorer. Embeddings are over the training graph; scores are
// sigmoids of embedding inner products.
struct LinkModel {
  ModelKind kind = ModelKind::kGcn;
  Hyperparams hyperparams;
  std::vector<num::Matrix> parameters;
  std::vector<std::vector<int64_t>> anchor_sets;  // PGNN only
  num::Matrix embeddings;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Seeded uniform shuffle of the graph's person-person pairs plus matched
// negative sampling without replacement. Throws when the graph has fewer
// than two distinct pairs, the fraction is outside (0,1), or there are not
// enough non-edges.
EdgeSplit split_edges(const graph::PropertyGraph& g, double test_fraction,
                      uint64_t seed);

// One-hot indicators of the 10 most frequent (attribute, value) pairs plus
// a constant column.
NodeFeatures attribute_features(const graph::PropertyGraph& g);
NodeFeatures constant_features(int64_t node_count);

// GCN: two rounds of symmetric-normalized adjacency aggregation (self
// loops added) over the node features. PGNN: Bourgain anchor sets
// (ceil(log2 n)^2 sets of size n/2^i), per-node anchor messages weighted by
// 1/(shortest-path distance + 1), one hidden layer. Both train full-batch
// gradient descent on logistic pair loss over the split's training pairs.
// Throws on NaN loss, naming the epoch.
LinkModel train_link_model(ModelKind kind, const graph::PropertyGraph& g,
                           const EdgeSplit& split, const NodeFeatures& features,
                           const Hyperparams& hp);

// Sigmoid pair scores in (0,1). Self-pairs and unknown ids are rejected.
std::vector<double> score_pairs(const LinkModel& m, const std::vector<NodePair>& pairs);

// Mann-Whitney AUC with ties counted half. Throws unless both classes occur.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Copy of g plus a predicted edge for every non-edge person pair scoring
// >= threshold (threshold in (0,1]); existing edges are never touched.
graph::PropertyGraph augment_with_predictions(const graph::PropertyGraph& g,
                                              const LinkModel& m, double threshold);

inline constexpr const char* kPredictedRelation = "linked";

struct EvalSummary {
  std::string model;
  double mean_auc = 0.0;
  double std_dev = 0.0;
  std::vector<uint64_t> seeds;
  std::vector<double> aucs;
};

// Re-splits, trains and scores once per seed; reports mean and sample
// standard deviation of the test AUC.
EvalSummary evaluate_over_seeds(ModelKind kind, const graph::PropertyGraph& g,
                                const NodeFeatures& features, const Hyperparams& hp,
                                const std::vector<uint64_t>& seeds,
                                double test_fraction);

}  // namespace pkb::linkpred

#endif  // PKB_LINKPRED_H_
