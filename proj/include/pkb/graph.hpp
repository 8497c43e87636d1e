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

#ifndef PKB_GRAPH_H_
#define PKB_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pkb/annotate.hpp"
#include "pkb/table.hpp"
#include "pkb/tacred.hpp"

namespace pkb::graph {

using annotate::Provenance;

struct PersonNode {
  int64_t node_id = 0;
  std::string canonical_name;
  std::set<std::string> aliases;  // surfaces that resolved here, minus canonical
  std::map<std::string, std::set<std::string>> attributes;  // fine_type -> values
};

struct PersonEdge {
  int64_t src = 0;
  int64_t dst = 0;
  std::string relation;
  Provenance provenance = Provenance::kDataset;
  double score = 1.0;
};

// Name normalization for entity resolution: case fold, collapse whitespace,
// strip leading honorifics from a fixed list. Exact matching only; no
// partial-name merging.
std::string normalize_name(const std::string& surface);

// Persons as nodes, person-person relations as typed edges, everything else
// as node attributes. Node ids are assigned in first-seen order.
class PropertyGraph {
 public:
  // Returns the node whose canonical name or alias normalizes to the same
  // key, creating one otherwise. Idempotent. Throws std::invalid_argument
  // when the surface is empty after normalization.
  int64_t resolve_person(const std::string& surface);

  std::optional<int64_t> find_person(const std::string& surface) const;

  void add_attribute(int64_t node_id, const std::string& fine_type,
                     const std::string& value);

  // False (and no change) for self-loops and duplicate (src,dst,relation).
  bool add_edge(int64_t src, int64_t dst, const std::string& relation,
                Provenance provenance, double score);

  bool has_edge_between(int64_t u, int64_t v) const;  // either direction, any label

  const std::vector<PersonNode>& nodes() const { return nodes_; }
  const std::vector<PersonEdge>& edges() const { return edges_; }
  const PersonNode& node(int64_t id) const { return nodes_.at(static_cast<size_t>(id)); }

  int64_t node_count() const { return static_cast<int64_t>(nodes_.size()); }
  int degree(int64_t id) const;  // incident person-person edges

  // Every fine type appearing on any node, sorted.
  std::vector<std::string> attribute_schema() const;

 private:
  std::vector<PersonNode> nodes_;
  std::vector<PersonEdge> edges_;
  std::map<std::string, int64_t> name_index_;
  std::set<std::tuple<int64_t, int64_t, std::string>> edge_keys_;
  std::multimap<int64_t, size_t> edges_by_node_;
};

// Attribute key used when a relation lands as a node attribute
// (per:religion -> religion, per:schools_attended -> school, ...); falls
// back to the object mention's fine type for labels without a slot.
std::optional<std::string> slot_attribute(const std::string& relation);

// Person-person relations whose gold answers may appear in either edge
// direction when evaluating slot queries.
bool is_symmetric_relation(const std::string& relation);

// Assembles the graph from relation annotations: annotations whose subject
// and object are both PERSON mentions become edges; annotations with a
// PERSON subject and a non-person object become attributes on the subject.
// Annotations without a PERSON subject contribute nothing.
PropertyGraph build_graph(
    const tacred::Dataset& ds,
    const std::vector<std::vector<annotate::EntityMention>>& mentions,
    const std::vector<std::vector<annotate::RelationAnnotation>>& relations);

// Tab-separated "src\tdst\trelation\tprovenance\tscore", sorted by
// (src, dst, relation). Returns rows written.
int64_t export_edgelist(const PropertyGraph& g, const std::filesystem::path& path);

// One "person:<id> <predicate> <value-or-person:id>" line per attribute
// value and per edge, attributes first, deterministic order. Returns lines.
int64_t export_triples(const PropertyGraph& g, const std::filesystem::path& path);

// One row per node over the given attribute schema; cell = lexicographically
// first value or the missing marker; binary "target" column appended
// (0 = participates in at least one edge, 1 = isolated).
DataTable to_feature_table(const PropertyGraph& g,
                           const std::vector<std::string>& schema);

}  // namespace pkb::graph

#endif  // PKB_GRAPH_H_
