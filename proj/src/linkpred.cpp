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

#include "pkb/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "pkb/random.hpp"

namespace pkb::linkpred {

using graph::PropertyGraph;
using num::Matrix;
using num::Vector;

std::string_view model_name(ModelKind kind) {
  return kind == ModelKind::kGcn ? "gcn" : "pgnn";
}

namespace {

NodePair ordered(int64_t a, int64_t b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

std::vector<NodePair> distinct_pairs(const PropertyGraph& g) {
  std::set<NodePair> pairs;
  for (const auto& e : g.edges()) pairs.insert(ordered(e.src, e.dst));
  return {pairs.begin(), pairs.end()};
}

}  // namespace

EdgeSplit split_edges(const PropertyGraph& g, double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("split_edges: test_fraction must be in (0,1)");
  }
  std::vector<NodePair> pos = distinct_pairs(g);
  const int64_t p = static_cast<int64_t>(pos.size());
  if (p < 2) throw std::invalid_argument("split_edges: need at least 2 edges");

  num::Rng rng(num::derive_seed(seed, "edge-split"));
  rng.shuffle(pos);
  int64_t test_count =
      std::clamp<int64_t>(std::llround(test_fraction * static_cast<double>(p)), 1, p - 1);

  EdgeSplit split;
  split.seed = seed;
  split.test_pos.assign(pos.begin(), pos.begin() + test_count);
  split.train_pos.assign(pos.begin() + test_count, pos.end());

  std::set<NodePair> edge_set(pos.begin(), pos.end());
  std::vector<NodePair> non_edges;
  const int64_t n = g.node_count();
  for (int64_t u = 0; u < n; u++) {
    for (int64_t v = u + 1; v < n; v++) {
      if (!edge_set.contains({u, v})) non_edges.push_back({u, v});
    }
  }
  if (static_cast<int64_t>(non_edges.size()) < p) {
    throw std::runtime_error("split_edges: not enough non-edges for negative sampling");
  }
  rng.shuffle(non_edges);
  split.test_neg.assign(non_edges.begin(), non_edges.begin() + test_count);
  split.train_neg.assign(non_edges.begin() + test_count, non_edges.begin() + p);
  return split;
}

NodeFeatures attribute_features(const PropertyGraph& g) {
  // Frequency-ranked (attribute, value) pairs, ties lexicographic.
  std::map<std::pair<std::string, std::string>, int> counts;
  for (const auto& node : g.nodes()) {
    for (const auto& [attr, values] : node.attributes) {
      for (const auto& v : values) counts[{attr, v}]++;
    }
  }
  std::vector<std::pair<std::pair<std::string, std::string>, int>> ranked(counts.begin(),
                                                                          counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const int top = std::min<int>(10, static_cast<int>(ranked.size()));

  NodeFeatures f;
  f.source = "attribute-one-hot";
  f.matrix = Matrix::Zero(g.node_count(), top + 1);
  for (int64_t i = 0; i < g.node_count(); i++) {
    const auto& attrs = g.node(i).attributes;
    for (int j = 0; j < top; j++) {
      const auto& [attr, value] = ranked[j].first;
      auto it = attrs.find(attr);
      if (it != attrs.end() && it->second.contains(value)) f.matrix(i, j) = 1.0;
    }
    f.matrix(i, top) = 1.0;
  }
  return f;
}

NodeFeatures constant_features(int64_t node_count) {
  NodeFeatures f;
  f.source = "constant";
  f.matrix = Matrix::Ones(node_count, 1);
  return f;
}

namespace {

std::vector<std::vector<int>> train_adjacency(int n, const std::vector<NodePair>& pos) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : pos) {
    adj[static_cast<size_t>(u)].push_back(static_cast<int>(v));
    adj[static_cast<size_t>(v)].push_back(static_cast<int>(u));
  }
  return adj;
}

// Symmetric-normalized adjacency with self loops, D^{-1/2}(A+I)D^{-1/2}.
Matrix normalized_adjacency(int n, const std::vector<NodePair>& pos) {
  Matrix a = Matrix::Identity(n, n);
  for (const auto& [u, v] : pos) {
    a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
  }
  Vector deg = a.rowwise().sum();
  Vector inv_sqrt = deg.array().rsqrt();
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

// Min BFS distance from every node to the anchor set; -1 when unreachable.
std::vector<int> multi_source_bfs(const std::vector<std::vector<int>>& adj,
                                  const std::vector<int64_t>& sources) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue;
  for (int64_t s : sources) {
    dist[static_cast<size_t>(s)] = 0;
    queue.push_back(static_cast<int>(s));
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<size_t>(u)]) {
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

Matrix glorot(int rows, int cols, num::Rng& rng) {
  double bound = std::sqrt(6.0 / (rows + cols));
  Matrix w(rows, cols);
  for (int i = 0; i < rows; i++) {
    for (int j = 0; j < cols; j++) w(i, j) = (2.0 * rng.uniform() - 1.0) * bound;
  }
  return w;
}

struct PairBatch {
  std::vector<NodePair> pairs;
  std::vector<double> labels;
};

PairBatch training_batch(const EdgeSplit& split) {
  PairBatch batch;
  for (const auto& p : split.train_pos) {
    batch.pairs.push_back(p);
    batch.labels.push_back(1.0);
  }
  for (const auto& p : split.train_neg) {
    batch.pairs.push_back(p);
    batch.labels.push_back(0.0);
  }
  return batch;
}

double pair_loss_and_grad(const Matrix& z, const PairBatch& batch, Matrix* dz) {
  const double eps = 1e-12;
  double loss = 0.0;
  if (dz != nullptr) dz->setZero();
  const double scale = 1.0 / static_cast<double>(batch.pairs.size());
  for (size_t i = 0; i < batch.pairs.size(); i++) {
    const auto& [u, v] = batch.pairs[i];
    const double y = batch.labels[i];
    const auto zu = z.row(static_cast<Eigen::Index>(u));
    const auto zv = z.row(static_cast<Eigen::Index>(v));
    const double p = num::sigmoid(zu.dot(zv));
    loss -= scale * (y * std::log(p + eps) + (1.0 - y) * std::log(1.0 - p + eps));
    if (dz != nullptr) {
      const double g = scale * (p - y);
      dz->row(static_cast<Eigen::Index>(u)) += g * zv;
      dz->row(static_cast<Eigen::Index>(v)) += g * zu;
    }
  }
  return loss;
}

}  // namespace

LinkModel train_link_model(ModelKind kind, const PropertyGraph& g,
                           const EdgeSplit& split, const NodeFeatures& features,
                           const Hyperparams& hp) {
  const int n = static_cast<int>(g.node_count());
  if (features.matrix.rows() != n) {
    throw std::invalid_argument("train_link_model: feature rows do not match nodes");
  }
  const Matrix& x = features.matrix;
  const int f = static_cast<int>(x.cols());

  LinkModel model;
  model.kind = kind;
  model.hyperparams = hp;

  num::Rng rng(num::derive_seed(hp.seed, kind == ModelKind::kGcn ? "gcn" : "pgnn"));
  PairBatch batch = training_batch(split);
  if (batch.pairs.empty()) {
    throw std::invalid_argument("train_link_model: empty training split");
  }

  if (kind == ModelKind::kGcn) {
    Matrix a_hat = normalized_adjacency(n, split.train_pos);
    Matrix w1 = glorot(f, hp.hidden, rng);
    Matrix w2 = glorot(hp.hidden, hp.out_dim, rng);
    Matrix ax = a_hat * x;  // constant across epochs

    Matrix dz(n, hp.out_dim);
    for (int epoch = 0; epoch <= hp.epochs; epoch++) {
      Matrix pre1 = ax * w1;
      Matrix h1 = pre1.cwiseMax(0.0);
      Matrix ah1 = a_hat * h1;
      Matrix z = ah1 * w2;

      double loss = pair_loss_and_grad(z, batch, &dz);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train_link_model: NaN loss at epoch " +
                                 std::to_string(epoch));
      }
      if (epoch == 0) model.initial_loss = loss;
      model.final_loss = loss;
      if (epoch == hp.epochs) {
        model.parameters = {w1, w2};
        model.embeddings = z;
        break;
      }
      Matrix dw2 = ah1.transpose() * dz;
      Matrix dh1 = (a_hat * (dz * w2.transpose()))
                       .cwiseProduct((pre1.array() > 0.0).cast<double>().matrix());
      Matrix dw1 = ax.transpose() * dh1;
      w1 -= hp.learning_rate * dw1;
      w2 -= hp.learning_rate * dw2;
    }
    return model;
  }

  // PGNN: Bourgain anchor sets over the training graph. ceil(log2 n)^2
  // sets; scale i gets sets of size ceil(n / 2^i).
  auto adj = train_adjacency(n, split.train_pos);
  const int levels = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(2, n)))));
  num::Rng anchor_rng = rng.substream("anchors");
  for (int i = 1; i <= levels; i++) {
    int size = std::max(1, static_cast<int>(std::ceil(n / std::pow(2.0, i))));
    for (int c = 0; c < levels; c++) {
      std::vector<int64_t> set;
      for (int idx : anchor_rng.sample_without_replacement(n, size)) {
        set.push_back(idx);
      }
      std::sort(set.begin(), set.end());
      model.anchor_sets.push_back(std::move(set));
    }
  }
  const int k = static_cast<int>(model.anchor_sets.size());

  // Position features: distance weight times the anchor aggregate's
  // projection onto the node's own features.
  Matrix position = Matrix::Zero(n, k);
  for (int t = 0; t < k; t++) {
    const auto& anchors = model.anchor_sets[static_cast<size_t>(t)];
    Vector aggregate = Vector::Zero(f);
    for (int64_t u : anchors) aggregate += x.row(static_cast<Eigen::Index>(u));
    aggregate /= static_cast<double>(anchors.size());
    std::vector<int> dist = multi_source_bfs(adj, anchors);
    for (int v = 0; v < n; v++) {
      if (dist[static_cast<size_t>(v)] < 0) continue;
      double w = 1.0 / (1.0 + dist[static_cast<size_t>(v)]);
      position(v, t) = w * x.row(v).dot(aggregate);
    }
  }

  Matrix w0 = glorot(f, hp.hidden, rng);
  Matrix w1 = glorot(k, hp.hidden, rng);
  Matrix w2 = glorot(hp.hidden, hp.out_dim, rng);

  Matrix dz(n, hp.out_dim);
  for (int epoch = 0; epoch <= hp.epochs; epoch++) {
    Matrix pre = position * w1 + x * w0;
    Matrix h = pre.cwiseMax(0.0);
    Matrix z = h * w2;

    double loss = pair_loss_and_grad(z, batch, &dz);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("train_link_model: NaN loss at epoch " +
                               std::to_string(epoch));
    }
    if (epoch == 0) model.initial_loss = loss;
    model.final_loss = loss;
    if (epoch == hp.epochs) {
      model.parameters = {w0, w1, w2};
      model.embeddings = z;
      break;
    }
    Matrix dw2 = h.transpose() * dz;
    Matrix dh =
        (dz * w2.transpose()).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    Matrix dw1 = position.transpose() * dh;
    Matrix dw0 = x.transpose() * dh;
    w0 -= hp.learning_rate * dw0;
    w1 -= hp.learning_rate * dw1;
    w2 -= hp.learning_rate * dw2;
  }
  return model;
}

std::vector<double> score_pairs(const LinkModel& m, const std::vector<NodePair>& pairs) {
  const int64_t n = m.embeddings.rows();
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    if (u == v) throw std::invalid_argument("score_pairs: self-link (u == v)");
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw std::invalid_argument("score_pairs: unknown node id");
    }
    scores.push_back(num::sigmoid(m.embeddings.row(static_cast<Eigen::Index>(u))
                                      .dot(m.embeddings.row(static_cast<Eigen::Index>(v)))));
  }
  return scores;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("roc_auc: scores and labels must align");
  }
  int64_t pos = 0, neg = 0;
  for (int y : labels) (y != 0 ? pos : neg)++;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("roc_auc: both classes must be present");
  }

  // Mann-Whitney via average ranks; ties share their rank.
  std::vector<size_t> idx(scores.size());
  for (size_t i = 0; i < idx.size(); i++) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < idx.size()) {
    size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) j++;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t t = i; t <= j; t++) {
      if (labels[idx[t]] != 0) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  double auc = (rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0) /
               (static_cast<double>(pos) * static_cast<double>(neg));
  return auc;
}

graph::PropertyGraph augment_with_predictions(const PropertyGraph& g,
                                              const LinkModel& m, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("augment_with_predictions: threshold must be in (0,1]");
  }
  PropertyGraph out = g;
  const int64_t n = g.node_count();
  for (int64_t u = 0; u < n; u++) {
    for (int64_t v = u + 1; v < n; v++) {
      if (g.has_edge_between(u, v)) continue;
      double s = score_pairs(m, {{u, v}})[0];
      if (s >= threshold) {
        out.add_edge(u, v, kPredictedRelation, graph::Provenance::kPredicted, s);
      }
    }
  }
  return out;
}

EvalSummary evaluate_over_seeds(ModelKind kind, const PropertyGraph& g,
                                const NodeFeatures& features, const Hyperparams& hp,
                                const std::vector<uint64_t>& seeds,
                                double test_fraction) {
  EvalSummary summary;
  summary.model = std::string(model_name(kind));
  summary.seeds = seeds;
  for (uint64_t seed : seeds) {
    EdgeSplit split = split_edges(g, test_fraction, seed);
    Hyperparams run = hp;
    run.seed = seed;
    LinkModel model = train_link_model(kind, g, split, features, run);
    std::vector<NodePair> pairs = split.test_pos;
    pairs.insert(pairs.end(), split.test_neg.begin(), split.test_neg.end());
    std::vector<int> labels(split.test_pos.size(), 1);
    labels.resize(pairs.size(), 0);
    summary.aucs.push_back(roc_auc(score_pairs(model, pairs), labels));
  }
  double sum = 0.0;
  for (double a : summary.aucs) sum += a;
  summary.mean_auc = sum / static_cast<double>(summary.aucs.size());
  if (summary.aucs.size() > 1) {
    double ss = 0.0;
    for (double a : summary.aucs) ss += (a - summary.mean_auc) * (a - summary.mean_auc);
    summary.std_dev = std::sqrt(ss / static_cast<double>(summary.aucs.size() - 1));
  }
  return summary;
}

}  // namespace pkb::linkpred
