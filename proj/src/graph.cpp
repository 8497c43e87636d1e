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

#include "pkb/graph.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "pkb/strings.hpp"

namespace pkb::graph {

std::string normalize_name(const std::string& surface) {
  static const std::set<std::string> kHonorifics = {
      "mr", "mrs", "ms", "miss", "dr", "prof", "professor", "sir", "madam", "mx"};
  std::string norm = normalize_phrase(surface);
  auto tokens = split_ws(norm);
  size_t skip = 0;
  while (skip + 1 < tokens.size()) {
    std::string t = tokens[skip];
    while (!t.empty() && t.back() == '.') t.pop_back();
    if (!kHonorifics.contains(t)) break;
    skip++;
  }
  if (skip > 0) {
    tokens.erase(tokens.begin(), tokens.begin() + static_cast<long>(skip));
  }
  return join(tokens, " ");
}

int64_t PropertyGraph::resolve_person(const std::string& surface) {
  std::string key = normalize_name(surface);
  if (key.empty()) {
    throw std::invalid_argument("resolve_person: empty surface after normalization");
  }
  auto it = name_index_.find(key);
  if (it != name_index_.end()) {
    PersonNode& node = nodes_[static_cast<size_t>(it->second)];
    if (surface != node.canonical_name) node.aliases.insert(surface);
    return it->second;
  }
  PersonNode node;
  node.node_id = static_cast<int64_t>(nodes_.size());
  node.canonical_name = surface;
  nodes_.push_back(std::move(node));
  name_index_.emplace(std::move(key), nodes_.back().node_id);
  return nodes_.back().node_id;
}

std::optional<int64_t> PropertyGraph::find_person(const std::string& surface) const {
  std::string key = normalize_name(surface);
  auto it = name_index_.find(key);
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

void PropertyGraph::add_attribute(int64_t node_id, const std::string& fine_type,
                                  const std::string& value) {
  nodes_.at(static_cast<size_t>(node_id)).attributes[fine_type].insert(value);
}

bool PropertyGraph::add_edge(int64_t src, int64_t dst, const std::string& relation,
                             Provenance provenance, double score) {
  if (src == dst) return false;
  if (src < 0 || src >= node_count() || dst < 0 || dst >= node_count()) {
    throw std::invalid_argument("add_edge: unknown node id");
  }
  if (!edge_keys_.emplace(src, dst, relation).second) return false;
  edges_.push_back({src, dst, relation, provenance, score});
  edges_by_node_.emplace(src, edges_.size() - 1);
  edges_by_node_.emplace(dst, edges_.size() - 1);
  return true;
}

bool PropertyGraph::has_edge_between(int64_t u, int64_t v) const {
  auto [lo, hi] = edges_by_node_.equal_range(u);
  for (auto it = lo; it != hi; ++it) {
    const PersonEdge& e = edges_[it->second];
    if (e.src == v || e.dst == v) return true;
  }
  return false;
}

int PropertyGraph::degree(int64_t id) const {
  return static_cast<int>(edges_by_node_.count(id));
}

std::vector<std::string> PropertyGraph::attribute_schema() const {
  std::set<std::string> types;
  for (const auto& node : nodes_) {
    for (const auto& [fine_type, values] : node.attributes) types.insert(fine_type);
  }
  return {types.begin(), types.end()};
}

std::optional<std::string> slot_attribute(const std::string& relation) {
  static const std::map<std::string, std::string> kSlots = {
      {"per:age", "age"},
      {"per:alternate_names", "alternate_name"},
      {"per:cause_of_death", "cause_of_death"},
      {"per:charges", "charge"},
      {"per:cities_of_residence", "residence"},
      {"per:city_of_birth", "city_of_birth"},
      {"per:city_of_death", "city_of_death"},
      {"per:countries_of_residence", "residence"},
      {"per:country_of_birth", "country_of_birth"},
      {"per:country_of_death", "country_of_death"},
      {"per:date_of_birth", "date_of_birth"},
      {"per:date_of_death", "date_of_death"},
      {"per:employee_of", "employer"},
      {"per:origin", "ethnicity"},
      {"per:religion", "religion"},
      {"per:schools_attended", "school"},
      {"per:stateorprovince_of_birth", "state_of_birth"},
      {"per:stateorprovince_of_death", "state_of_death"},
      {"per:stateorprovinces_of_residence", "residence"},
      {"per:title", "title"},
      {"per:gender", "gender"},
      {"per:email", "email"},
      {"per:website", "url"},
      {"per:phone", "phone"},
  };
  auto it = kSlots.find(relation);
  if (it == kSlots.end()) return std::nullopt;
  return it->second;
}

bool is_symmetric_relation(const std::string& relation) {
  return relation == "per:spouse" || relation == "per:siblings" ||
         relation == "per:other_family" || relation == "per:alternate_names";
}

PropertyGraph build_graph(
    const tacred::Dataset& ds,
    const std::vector<std::vector<annotate::EntityMention>>& mentions,
    const std::vector<std::vector<annotate::RelationAnnotation>>& relations) {
  if (mentions.size() != ds.records.size() || relations.size() != ds.records.size()) {
    throw std::invalid_argument("build_graph: per-record lists do not match dataset");
  }
  PropertyGraph g;
  for (const auto& per_record : relations) {
    for (const auto& ann : per_record) {
      if (ann.subject.coarse_type != "PERSON") continue;
      if (normalize_name(ann.subject.surface).empty()) continue;
      int64_t subject_id = g.resolve_person(ann.subject.surface);
      if (ann.object.coarse_type == "PERSON") {
        if (normalize_name(ann.object.surface).empty()) continue;
        int64_t object_id = g.resolve_person(ann.object.surface);
        g.add_edge(subject_id, object_id, ann.relation, ann.provenance, 1.0);
      } else {
        std::string key =
            slot_attribute(ann.relation).value_or(ann.object.fine_type);
        g.add_attribute(subject_id, key, ann.object.surface);
      }
    }
  }
  return g;
}

int64_t export_edgelist(const PropertyGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<PersonEdge> sorted = g.edges();
  std::sort(sorted.begin(), sorted.end(), [](const PersonEdge& a, const PersonEdge& b) {
    return std::tie(a.src, a.dst, a.relation) < std::tie(b.src, b.dst, b.relation);
  });
  char score_buf[32];
  for (const auto& e : sorted) {
    std::snprintf(score_buf, sizeof(score_buf), "%.9g", e.score);
    out << e.src << '\t' << e.dst << '\t' << e.relation << '\t'
        << annotate::provenance_name(e.provenance) << '\t' << score_buf << '\n';
  }
  return static_cast<int64_t>(sorted.size());
}

int64_t export_triples(const PropertyGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  int64_t lines = 0;
  for (const auto& node : g.nodes()) {
    for (const auto& [fine_type, values] : node.attributes) {
      for (const auto& value : values) {
        out << "person:" << node.node_id << ' ' << fine_type << ' ' << value << '\n';
        lines++;
      }
    }
  }
  std::vector<PersonEdge> sorted = g.edges();
  std::sort(sorted.begin(), sorted.end(), [](const PersonEdge& a, const PersonEdge& b) {
    return std::tie(a.src, a.dst, a.relation) < std::tie(b.src, b.dst, b.relation);
  });
  for (const auto& e : sorted) {
    out << "person:" << e.src << ' ' << e.relation << ' ' << "person:" << e.dst << '\n';
    lines++;
  }
  return lines;
}

DataTable to_feature_table(const PropertyGraph& g,
                           const std::vector<std::string>& schema) {
  DataTable t;
  t.column_names = schema;
  t.column_names.push_back("target");
  for (const auto& node : g.nodes()) {
    t.row_ids.push_back(node.node_id);
    std::vector<std::string> row;
    row.reserve(schema.size() + 1);
    for (const auto& attr : schema) {
      auto it = node.attributes.find(attr);
      if (it == node.attributes.end() || it->second.empty()) {
        row.emplace_back(kMissingMarker);
      } else {
        row.push_back(*it->second.begin());  // lexicographically first
      }
    }
    row.push_back(g.degree(node.node_id) >= 1 ? "0" : "1");
    t.rows.push_back(std::move(row));
  }
  t.infer_kinds();
  if (!t.kinds.empty()) t.kinds.back() = ColumnKind::kNumeric;  // target
  return t;
}

}  // namespace pkb::graph
