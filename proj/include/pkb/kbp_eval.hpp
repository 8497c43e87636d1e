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

#ifndef PKB_KBP_EVAL_H_
#define PKB_KBP_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pkb/graph.hpp"

namespace pkb::kbp {

// hop 0: person -> person relation slot; hop 1: person -> attribute slot
// whose subject is a hop-0 answer.
struct SlotQuery {
  int hop = 0;
  std::string subject;
  std::string slot;
  std::set<std::string> gold;  // expected fillers (surface strings)
};

struct HopMetrics {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  // Zero-retrieval convention: precision is 1.0 when nothing was retrieved.
  double precision() const {
    return (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  }
  double recall() const {
    return (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  }
  double f1_score() const;
};

// 2pr/(p+r), 0 when both are 0.
double f1(double precision, double recall);

// Pools per-query counts into micro metrics. All queries must share one
// hop level. Unknown subjects contribute their whole gold set as misses.
HopMetrics evaluate_hop(const graph::PropertyGraph& g,
                        const std::vector<SlotQuery>& queries);

// Pooled counts of two hop levels.
HopMetrics hop_all(const HopMetrics& m0, const HopMetrics& m1);

struct ColdStartResult {
  HopMetrics hop0;
  HopMetrics hop1;
  HopMetrics hopall;
};

// Evaluates a mixed query set with hop-0 -> hop-1 error propagation: a
// hop-1 query only consults the graph when its subject was actually
// retrieved by the hop-0 round; otherwise its entire gold set counts as
// misses.
ColdStartResult evaluate_cold_start(const graph::PropertyGraph& g,
                                    const std::vector<SlotQuery>& queries);

// Gold protected attributes per person: name -> (attribute type -> values).
using ProtectedGold = std::map<std::string, std::map<std::string, std::set<std::string>>>;

struct ProtectedReport {
  std::map<std::string, HopMetrics> per_attribute;
  HopMetrics aggregate;
};

// Pooled per-attribute-type recall of protected attribute values.
ProtectedReport protected_recall(const graph::PropertyGraph& g,
                                 const ProtectedGold& gold);

// Query file lines: "hop<0|1>\t<subject>\t<slot>\t<gold1|gold2|...>".
std::vector<SlotQuery> load_queries(const std::filesystem::path& path);
void save_queries(const std::vector<SlotQuery>& queries,
                  const std::filesystem::path& path);

// Protected-gold file lines: "<person>\t<attribute>\t<value1|value2|...>".
ProtectedGold load_protected_gold(const std::filesystem::path& path);

// Samples slot queries from a graph's own content: hop-0 queries over
// person-person edges and hop-1 queries over the attributes of hop-0
// answers. Deterministic given the seed.
std::vector<SlotQuery> generate_queries(const graph::PropertyGraph& g, uint64_t seed,
                                        int max_hop0, int max_hop1);

}  // namespace pkb::kbp

#endif  // PKB_KBP_EVAL_H_
