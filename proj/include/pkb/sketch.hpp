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

#ifndef PKB_SKETCH_H_
#define PKB_SKETCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pkb/linalg.hpp"
#include "pkb/table.hpp"

namespace pkb::sketch {

struct ColumnMeta {
  std::string source;             // originating table column
  std::string category;           // category value, or "numeric"
  std::vector<int> members;       // encoded-column indices merged into this one

  std::string label() const {
    return category == "numeric" ? source : source + "=" + category;
  }
};

// Numeric view of a table: numeric columns min-max scaled to [0,1]
// (constant columns become 0), categorical columns one-hot encoded with a
// missing value encoding as all zeros, text columns dropped.
struct EncodedTable {
  num::Matrix matrix;
  std::vector<int64_t> row_ids;
  std::vector<ColumnMeta> column_meta;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
};

struct SketchConfig {
  int sketch_rows = 8;     // l, rows of the sketch per cluster
  double theta = 0.85;     // redundancy threshold on cosine similarity
  int target_dim = 100;    // feature agglomeration target
  int k_max = 8;           // elbow search upper bound
  uint64_t seed = 42;
};

// Throws std::invalid_argument on an empty table.
EncodedTable scale_and_encode(const DataTable& table);

// Greedy feature agglomeration: while more than target_dim column groups
// remain, merge the pair with the highest absolute Pearson correlation
// (ties toward the lowest column indices); each output column is the mean
// of its group. Identity when cols <= target_dim.
EncodedTable agglomerate_features(const EncodedTable& e, int target_dim);

struct KMeansResult {
  std::vector<int> assignments;
  num::Matrix centroids;
  double inertia = 0.0;  // within-cluster sum of squares
};

// Lloyd iterations from seeded k-means++ starts until the assignment
// fixpoint or 300 rounds; empty clusters are reseeded to the farthest point.
KMeansResult kmeans(const EncodedTable& e, int k, uint64_t seed);

// Runs kmeans for k = 1..k_max and picks the elbow: the k in
// [2, k_max-1] maximizing W(k-1) - 2 W(k) + W(k+1); k = 1 when W(1) is
// already ~0. Requires k_max >= 2 and rows >= k_max.
int choose_k_elbow(const EncodedTable& e, int k_max, uint64_t seed);

// Streaming frequent-directions sketch with a 2l-row buffer: on overflow
// the buffer is rotated by SVD, squared singular values are shrunk by the
// l-th one (floored at zero) and the top l-1 directions are kept. The
// result B has exactly l rows and satisfies
//   ||A^T A - B^T B||_2 <= 2 ||A||_F^2 / l.
num::Matrix frequent_directions(const num::Matrix& a, int sketch_rows);

struct Selection {
  std::vector<int64_t> ids;   // selected row ids, in selection order
  std::vector<int> rounds;    // outer iteration that produced each pick
};

// Repeats (sketch remaining rows -> pick the row most aligned with each
// frequent direction -> drop every row with cosine >= theta to the pick)
// until the cluster is exhausted. Ties in the alignment argmax go to the
// lowest row id. Rows that encode to all zeros cannot be ranked by cosine:
// a cluster consisting only of such rows yields its lowest id, otherwise
// they are dropped from selection.
Selection select_representatives(const num::Matrix& rows,
                                 const std::vector<int64_t>& row_ids,
                                 const SketchConfig& config);

struct SampleResult {
  std::vector<int64_t> selected_ids;  // union over clusters, selection order
  std::vector<int> selected_cluster;
  std::vector<int> selected_round;
  std::vector<int64_t> all_ids;       // every table row
  std::vector<int> all_cluster;
  std::vector<bool> selected_flag;    // parallel to all_ids
  num::Matrix projection;             // rows x 2, top principal directions
  int k = 0;
};

// The full sampling pipeline: encode, agglomerate, pick k by the elbow,
// cluster, then select representatives per cluster. Also emits 2-D
// principal-direction coordinates for external plotting.
SampleResult representative_sample(const DataTable& table, const SketchConfig& config);

void write_samples_csv(const SampleResult& r, const std::string& path);
void write_projection_csv(const SampleResult& r, const std::string& path);

}  // namespace pkb::sketch

#endif  // PKB_SKETCH_H_
