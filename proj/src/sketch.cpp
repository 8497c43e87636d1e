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

#include "pkb/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "pkb/random.hpp"

namespace pkb::sketch {

using num::Matrix;
using num::Vector;

EncodedTable scale_and_encode(const DataTable& table) {
  if (table.row_count() == 0) {
    throw std::invalid_argument("scale_and_encode: table has zero rows");
  }
  const int n = table.row_count();
  EncodedTable out;
  out.row_ids = table.row_ids;

  std::vector<std::vector<double>> columns;
  for (int c = 0; c < table.cols(); c++) {
    ColumnKind kind = c < static_cast<int>(table.kinds.size())
                          ? table.kinds[c]
                          : ColumnKind::kCategorical;
    if (kind == ColumnKind::kText) continue;
    if (kind == ColumnKind::kNumeric) {
      std::vector<double> col(n, std::numeric_limits<double>::quiet_NaN());
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; i++) {
        const std::string& cell = table.rows[i][c];
        if (cell == kMissingMarker) continue;
        double v = std::stod(cell);
        col[i] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      std::vector<double> scaled(n, 0.0);
      if (std::isfinite(lo) && hi > lo) {
        for (int i = 0; i < n; i++) {
          // Missing numeric cells scale to 0, like the column minimum.
          scaled[i] = std::isnan(col[i]) ? 0.0 : (col[i] - lo) / (hi - lo);
        }
      }
      columns.push_back(std::move(scaled));
      out.column_meta.push_back({table.column_names[c], "numeric", {}});
    } else {
      std::set<std::string> categories;
      for (int i = 0; i < n; i++) {
        const std::string& cell = table.rows[i][c];
        if (cell != kMissingMarker) categories.insert(cell);
      }
      for (const auto& cat : categories) {
        std::vector<double> indicator(n, 0.0);
        for (int i = 0; i < n; i++) {
          if (table.rows[i][c] == cat) indicator[i] = 1.0;
        }
        columns.push_back(std::move(indicator));
        out.column_meta.push_back({table.column_names[c], cat, {}});
      }
    }
  }

  out.matrix.resize(n, static_cast<int>(columns.size()));
  for (int c = 0; c < static_cast<int>(columns.size()); c++) {
    for (int i = 0; i < n; i++) out.matrix(i, c) = columns[c][i];
  }
  for (int c = 0; c < out.cols(); c++) out.column_meta[c].members = {c};
  return out;
}

EncodedTable agglomerate_features(const EncodedTable& e, int target_dim) {
  if (target_dim < 1) {
    throw std::invalid_argument("agglomerate_features: target_dim must be >= 1");
  }
  if (e.cols() <= target_dim) return e;

  const int n = e.rows();
  std::vector<std::vector<int>> groups(e.cols());
  for (int c = 0; c < e.cols(); c++) groups[c] = {c};

  // Current column of each group: the mean of its members.
  auto group_column = [&](const std::vector<int>& members) {
    Vector col = Vector::Zero(n);
    for (int m : members) col += e.matrix.col(m);
    return Vector(col / static_cast<double>(members.size()));
  };
  std::vector<Vector> cols;
  cols.reserve(groups.size());
  for (const auto& g : groups) cols.push_back(group_column(g));

  while (static_cast<int>(groups.size()) > target_dim) {
    double best = -1.0;
    int bi = 0, bj = 1;
    for (int i = 0; i < static_cast<int>(groups.size()); i++) {
      for (int j = i + 1; j < static_cast<int>(groups.size()); j++) {
        double corr = std::abs(num::pearson(cols[i], cols[j]));
        if (corr > best) {
          best = corr;
          bi = i;
          bj = j;
        }
      }
    }
    groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
    std::sort(groups[bi].begin(), groups[bi].end());
    cols[bi] = group_column(groups[bi]);
    groups.erase(groups.begin() + bj);
    cols.erase(cols.begin() + bj);
  }

  EncodedTable out;
  out.row_ids = e.row_ids;
  out.matrix.resize(n, static_cast<int>(groups.size()));
  for (int c = 0; c < static_cast<int>(groups.size()); c++) {
    out.matrix.col(c) = cols[c];
    const ColumnMeta& head = e.column_meta[groups[c].front()];
    out.column_meta.push_back({head.source, head.category, groups[c]});
  }
  return out;
}

KMeansResult kmeans(const EncodedTable& e, int k, uint64_t seed) {
  const int n = e.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmeans: k must be in [1, rows]");
  }
  const Matrix& x = e.matrix;
  num::Rng rng(seed);

  // k-means++ seeding.
  Matrix centroids(k, x.cols());
  std::vector<int> chosen;
  chosen.push_back(static_cast<int>(rng.uniform_int(0, n - 1)));
  centroids.row(0) = x.row(chosen[0]);
  Vector dist2 = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; c++) {
    double total = dist2.sum();
    int pick = -1;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; i++) {
        acc += dist2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // All remaining mass is on already-chosen points; take the lowest
      // index not yet used so that k distinct rows seed k clusters.
      std::set<int> used(chosen.begin(), chosen.end());
      for (int i = 0; i < n; i++) {
        if (!used.contains(i)) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = 0;
    }
    chosen.push_back(pick);
    centroids.row(c) = x.row(pick);
    dist2 = dist2.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assignments(n, -1);
  for (int iter = 0; iter < 300; iter++) {
    bool changed = false;
    for (int i = 0; i < n; i++) {
      int best = 0;
      double best_d = (x.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; c++) {
        double d = (x.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignments[i] != best) {
        assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; i++) {
      sums.row(assignments[i]) += x.row(i);
      counts[assignments[i]]++;
    }
    for (int c = 0; c < k; c++) {
      if (counts[c] > 0) {
        centroids.row(c) = sums.row(c) / counts[c];
      } else {
        // Reseed an empty cluster to the point farthest from its centroid.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; i++) {
          double d = (x.row(i) - centroids.row(assignments[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = x.row(far);
        assignments[far] = c;
        counts[c] = 1;
      }
    }
  }

  KMeansResult result;
  result.assignments = std::move(assignments);
  result.centroids = std::move(centroids);
  for (int i = 0; i < n; i++) {
    result.inertia += (x.row(i) - result.centroids.row(result.assignments[i])).squaredNorm();
  }
  return result;
}

int choose_k_elbow(const EncodedTable& e, int k_max, uint64_t seed) {
  if (k_max < 2) throw std::invalid_argument("choose_k_elbow: k_max must be >= 2");
  if (e.rows() < k_max) {
    throw std::invalid_argument("choose_k_elbow: fewer rows than k_max");
  }
  std::vector<double> w(k_max + 1, 0.0);
  for (int k = 1; k <= k_max; k++) {
    w[k] = kmeans(e, k, num::derive_seed(seed, "elbow-k" + std::to_string(k))).inertia;
  }
  if (w[1] <= 1e-9) return 1;
  if (k_max == 2) return 2;
  int best_k = 2;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= k_max - 1; k++) {
    double second_diff = w[k - 1] - 2.0 * w[k] + w[k + 1];
    if (second_diff > best) {
      best = second_diff;
      best_k = k;
    }
  }
  return best_k;
}

Matrix frequent_directions(const Matrix& a, int sketch_rows) {
  const int ell = sketch_rows;
  if (ell < 2) throw std::invalid_argument("frequent_directions: l must be >= 2");
  const int m = static_cast<int>(a.cols());
  const int n = static_cast<int>(a.rows());

  if (n <= ell) {  // everything fits; pad with zero rows
    Matrix b = Matrix::Zero(ell, m);
    b.topRows(n) = a;
    return b;
  }

  Matrix buffer = Matrix::Zero(2 * ell, m);
  int occupied = 0;
  auto shrink = [&]() {
    num::SvdResult s = num::svd(buffer);
    const int r = static_cast<int>(s.singular_values.size());
    const double delta =
        r >= ell ? s.singular_values[ell - 1] * s.singular_values[ell - 1] : 0.0;
    buffer.setZero();
    int kept = 0;
    for (int i = 0; i < std::min(ell - 1, r); i++) {
      double shrunk2 = s.singular_values[i] * s.singular_values[i] - delta;
      if (shrunk2 <= 0.0) break;
      buffer.row(kept++) = std::sqrt(shrunk2) * s.v.col(i).transpose();
    }
    occupied = kept;
  };

  for (int i = 0; i < n; i++) {
    buffer.row(occupied++) = a.row(i);
    if (occupied == 2 * ell) shrink();
  }

  Matrix b = Matrix::Zero(ell, m);
  if (occupied <= ell) {
    b.topRows(occupied) = buffer.topRows(occupied);
  } else {
    // Final compression keeps the top l directions without shrinking.
    num::SvdResult s = num::svd(buffer.topRows(occupied));
    const int r = static_cast<int>(s.singular_values.size());
    for (int i = 0; i < std::min(ell, r); i++) {
      b.row(i) = s.singular_values[i] * s.v.col(i).transpose();
    }
  }
  return b;
}

Selection select_representatives(const Matrix& rows,
                                 const std::vector<int64_t>& row_ids,
                                 const SketchConfig& config) {
  if (rows.rows() != static_cast<Eigen::Index>(row_ids.size())) {
    throw std::invalid_argument("select_representatives: ids do not match rows");
  }
  Selection sel;
  const int n = static_cast<int>(rows.rows());
  if (n == 0) return sel;

  // Order candidates by row id so argmax ties resolve to the lowest id.
  std::vector<int> order(n);
  for (int i = 0; i < n; i++) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return row_ids[a] < row_ids[b]; });

  std::vector<int> remaining;
  bool any_zero = false;
  int lowest_zero = -1;
  for (int i : order) {
    if (rows.row(i).norm() > 0.0) {
      remaining.push_back(i);
    } else if (!any_zero) {
      any_zero = true;
      lowest_zero = i;
    }
  }
  if (remaining.empty()) {
    if (any_zero) {
      sel.ids.push_back(row_ids[lowest_zero]);
      sel.rounds.push_back(0);
    }
    return sel;
  }

  int round = 0;
  while (!remaining.empty()) {
    Matrix current(remaining.size(), rows.cols());
    for (size_t i = 0; i < remaining.size(); i++) current.row(i) = rows.row(remaining[i]);
    Matrix sketch = frequent_directions(current, config.sketch_rows);

    std::vector<Vector> directions;
    for (int i = 0; i < sketch.rows(); i++) {
      if (sketch.row(i).norm() == 0.0) continue;
      Vector dir = sketch.row(i).transpose();
      // SVD leaves direction signs arbitrary; orient each one toward the
      // remaining rows so the alignment argmax picks along the data.
      double total = 0.0;
      for (int r : remaining) total += num::cosine(rows.row(r).transpose(), dir);
      if (total < 0.0) dir = -dir;
      directions.push_back(std::move(dir));
    }
    if (directions.empty()) {
      // A flat spectrum can shrink the sketch to nothing; let the lowest
      // remaining row stand in as its own direction.
      directions.push_back(rows.row(remaining.front()).transpose());
    }

    for (const Vector& dir : directions) {
      if (remaining.empty()) break;
      int best = remaining.front();
      double best_cos = -std::numeric_limits<double>::infinity();
      for (int i : remaining) {
        double c = num::cosine(rows.row(i).transpose(), dir);
        if (c > best_cos) {  // strict: earlier (lower-id) rows win ties
          best_cos = c;
          best = i;
        }
      }
      sel.ids.push_back(row_ids[best]);
      sel.rounds.push_back(round);
      std::vector<int> kept;
      kept.reserve(remaining.size());
      for (int i : remaining) {
        if (i == best) continue;
        if (num::cosine(rows.row(i), rows.row(best)) >= config.theta) continue;
        kept.push_back(i);
      }
      remaining = std::move(kept);
    }
    round++;
  }
  return sel;
}

SampleResult representative_sample(const DataTable& table, const SketchConfig& config) {
  EncodedTable encoded = scale_and_encode(table);
  EncodedTable reduced = agglomerate_features(encoded, config.target_dim);
  const int n = reduced.rows();

  SampleResult result;
  result.all_ids = reduced.row_ids;

  int k_max = std::min(config.k_max, n);
  if (k_max < 2) {
    result.k = 1;
    result.all_cluster.assign(n, 0);
  } else {
    result.k = choose_k_elbow(reduced, k_max, num::derive_seed(config.seed, "elbow"));
  }
  KMeansResult km;
  if (result.k == 1) {
    result.all_cluster.assign(n, 0);
  } else {
    km = kmeans(reduced, result.k, num::derive_seed(config.seed, "kmeans"));
    result.all_cluster = km.assignments;
  }

  std::set<int64_t> picked;
  for (int c = 0; c < result.k; c++) {
    std::vector<int> members;
    for (int i = 0; i < n; i++) {
      if (result.all_cluster[i] == c) members.push_back(i);
    }
    if (members.empty()) continue;
    Matrix cluster_rows(members.size(), reduced.cols());
    std::vector<int64_t> cluster_ids;
    for (size_t i = 0; i < members.size(); i++) {
      cluster_rows.row(i) = reduced.matrix.row(members[i]);
      cluster_ids.push_back(reduced.row_ids[members[i]]);
    }
    Selection sel = select_representatives(cluster_rows, cluster_ids, config);
    for (size_t i = 0; i < sel.ids.size(); i++) {
      result.selected_ids.push_back(sel.ids[i]);
      result.selected_cluster.push_back(c);
      result.selected_round.push_back(sel.rounds[i]);
      picked.insert(sel.ids[i]);
    }
  }
  result.selected_flag.resize(n);
  for (int i = 0; i < n; i++) {
    result.selected_flag[i] = picked.contains(reduced.row_ids[i]);
  }

  // Two principal directions of the reduced matrix for plotting.
  Matrix centered = reduced.matrix.rowwise() - reduced.matrix.colwise().mean();
  result.projection = Matrix::Zero(n, 2);
  if (reduced.cols() >= 1 && n >= 1) {
    num::SvdResult s = num::svd(centered);
    int dims = std::min<int>(2, static_cast<int>(s.v.cols()));
    result.projection.leftCols(dims) = centered * s.v.leftCols(dims);
  }
  return result;
}

void write_samples_csv(const SampleResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "person_id,cluster,selection_round\n";
  for (size_t i = 0; i < r.selected_ids.size(); i++) {
    out << r.selected_ids[i] << ',' << r.selected_cluster[i] << ','
        << r.selected_round[i] << '\n';
  }
}

void write_projection_csv(const SampleResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "person_id,x,y,selected_flag\n";
  char buf[64];
  for (size_t i = 0; i < r.all_ids.size(); i++) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g", r.projection(i, 0), r.projection(i, 1));
    out << r.all_ids[i] << ',' << buf << ',' << (r.selected_flag[i] ? 1 : 0) << '\n';
  }
}

}  // namespace pkb::sketch
