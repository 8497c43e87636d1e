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

#include "pkb/kbp_eval.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "pkb/random.hpp"
#include "pkb/strings.hpp"

namespace pkb::kbp {

using graph::PropertyGraph;

double f1(double precision, double recall) {
  double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

double HopMetrics::f1_score() const { return f1(precision(), recall()); }

namespace {

std::set<std::string> normalize_all(const std::set<std::string>& values) {
  std::set<std::string> out;
  for (const auto& v : values) {
    std::string n = graph::normalize_name(v);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

// What the graph answers for one (subject node, slot) request.
std::set<std::string> retrieve(const PropertyGraph& g, int64_t subject, int hop,
                               const std::string& slot) {
  std::set<std::string> out;
  if (hop == 0) {
    for (const auto& e : g.edges()) {
      if (e.relation != slot) continue;
      if (e.src == subject) {
        out.insert(graph::normalize_name(g.node(e.dst).canonical_name));
      } else if (e.dst == subject && graph::is_symmetric_relation(slot)) {
        out.insert(graph::normalize_name(g.node(e.src).canonical_name));
      }
    }
  } else {
    const auto& attrs = g.node(subject).attributes;
    auto it = attrs.find(slot);
    if (it != attrs.end()) {
      for (const auto& v : it->second) {
        std::string n = graph::normalize_name(v);
        if (!n.empty()) out.insert(std::move(n));
      }
    }
  }
  return out;
}

void score_query(const PropertyGraph& g, const SlotQuery& q, bool subject_reachable,
                 HopMetrics* m) {
  std::set<std::string> gold = normalize_all(q.gold);
  auto subject = g.find_person(q.subject);
  if (!subject.has_value() || !subject_reachable) {
    m->fn += static_cast<int64_t>(gold.size());
    return;
  }
  std::set<std::string> retrieved = retrieve(g, *subject, q.hop, q.slot);
  for (const auto& r : retrieved) {
    if (gold.contains(r)) m->tp++;
    else m->fp++;
  }
  for (const auto& want : gold) {
    if (!retrieved.contains(want)) m->fn++;
  }
}

}  // namespace

HopMetrics evaluate_hop(const PropertyGraph& g, const std::vector<SlotQuery>& queries) {
  HopMetrics m;
  for (const auto& q : queries) {
    if (q.hop != queries.front().hop) {
      throw std::invalid_argument("evaluate_hop: queries must share one hop level");
    }
    score_query(g, q, true, &m);
  }
  return m;
}

HopMetrics hop_all(const HopMetrics& m0, const HopMetrics& m1) {
  return HopMetrics{m0.tp + m1.tp, m0.fp + m1.fp, m0.fn + m1.fn};
}

ColdStartResult evaluate_cold_start(const PropertyGraph& g,
                                    const std::vector<SlotQuery>& queries) {
  ColdStartResult result;

  // Hop-0 first; remember what was actually retrieved so hop-0 misses
  // propagate to the hop-1 queries that depend on them.
  std::set<std::string> retrieved_entities;
  for (const auto& q : queries) {
    if (q.hop != 0) continue;
    score_query(g, q, true, &result.hop0);
    auto subject = g.find_person(q.subject);
    if (subject.has_value()) {
      auto answers = retrieve(g, *subject, 0, q.slot);
      retrieved_entities.insert(answers.begin(), answers.end());
    }
  }
  for (const auto& q : queries) {
    if (q.hop != 1) continue;
    bool reachable = retrieved_entities.contains(graph::normalize_name(q.subject));
    score_query(g, q, reachable, &result.hop1);
  }
  result.hopall = hop_all(result.hop0, result.hop1);
  return result;
}

ProtectedReport protected_recall(const PropertyGraph& g, const ProtectedGold& gold) {
  if (gold.empty()) {
    throw std::invalid_argument("protected_recall: gold map is empty");
  }
  ProtectedReport report;
  for (const auto& [person, slots] : gold) {
    auto node = g.find_person(person);
    for (const auto& [attribute, values] : slots) {
      HopMetrics& m = report.per_attribute[attribute];
      std::set<std::string> want = normalize_all(values);
      std::set<std::string> have;
      if (node.has_value()) have = retrieve(g, *node, 1, attribute);
      for (const auto& v : have) {
        if (want.contains(v)) m.tp++;
        else m.fp++;
      }
      for (const auto& v : want) {
        if (!have.contains(v)) m.fn++;
      }
    }
  }
  for (const auto& [attribute, m] : report.per_attribute) {
    report.aggregate.tp += m.tp;
    report.aggregate.fp += m.fp;
    report.aggregate.fn += m.fn;
  }
  return report;
}

std::vector<SlotQuery> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<SlotQuery> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4 || (fields[0] != "hop0" && fields[0] != "hop1")) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) +
                               ": expected 'hop<0|1>\\t<subject>\\t<slot>\\t<gold|...>'");
    }
    SlotQuery q;
    q.hop = fields[0] == "hop0" ? 0 : 1;
    q.subject = trim(fields[1]);
    q.slot = trim(fields[2]);
    for (const auto& v : split(fields[3], '|')) {
      std::string t = trim(v);
      if (!t.empty()) q.gold.insert(std::move(t));
    }
    if (q.gold.empty()) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) +
                               ": empty gold set");
    }
    out.push_back(std::move(q));
  }
  return out;
}

void save_queries(const std::vector<SlotQuery>& queries,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& q : queries) {
    out << (q.hop == 0 ? "hop0" : "hop1") << '\t' << q.subject << '\t' << q.slot << '\t'
        << join({q.gold.begin(), q.gold.end()}, "|") << '\n';
  }
}

ProtectedGold load_protected_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  ProtectedGold gold;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) +
                               ": expected '<person>\\t<attribute>\\t<v1|v2|...>'");
    }
    auto& values = gold[trim(fields[0])][trim(fields[1])];
    for (const auto& v : split(fields[2], '|')) {
      std::string t = trim(v);
      if (!t.empty()) values.insert(std::move(t));
    }
  }
  return gold;
}

std::vector<SlotQuery> generate_queries(const PropertyGraph& g, uint64_t seed,
                                        int max_hop0, int max_hop1) {
  // Candidate hop-0 slots: every (subject, relation) with outgoing edges;
  // gold is exactly what the graph would answer.
  std::map<std::pair<std::string, std::string>, std::set<std::string>> hop0_slots;
  for (const auto& e : g.edges()) {
    const std::string& subject = g.node(e.src).canonical_name;
    const std::string& object = g.node(e.dst).canonical_name;
    hop0_slots[{subject, e.relation}].insert(object);
    if (graph::is_symmetric_relation(e.relation)) {
      hop0_slots[{object, e.relation}].insert(subject);
    }
  }
  std::vector<SlotQuery> hop0_candidates;
  for (const auto& [key, gold] : hop0_slots) {
    SlotQuery q;
    q.hop = 0;
    q.subject = key.first;
    q.slot = key.second;
    q.gold = gold;
    hop0_candidates.push_back(std::move(q));
  }

  num::Rng rng(num::derive_seed(seed, "query-gen"));
  rng.shuffle(hop0_candidates);
  if (static_cast<int>(hop0_candidates.size()) > max_hop0) {
    hop0_candidates.resize(static_cast<size_t>(max_hop0));
  }

  // Hop-1 queries over the attributes of the hop-0 answers.
  std::vector<SlotQuery> hop1_candidates;
  std::set<std::string> seen;
  for (const auto& q0 : hop0_candidates) {
    for (const auto& answer : q0.gold) {
      if (!seen.insert(answer).second) continue;
      auto node = g.find_person(answer);
      if (!node.has_value()) continue;
      for (const auto& [attribute, values] : g.node(*node).attributes) {
        if (values.empty()) continue;
        SlotQuery q;
        q.hop = 1;
        q.subject = answer;
        q.slot = attribute;
        q.gold = values;
        hop1_candidates.push_back(std::move(q));
      }
    }
  }
  rng.shuffle(hop1_candidates);
  if (static_cast<int>(hop1_candidates.size()) > max_hop1) {
    hop1_candidates.resize(static_cast<size_t>(max_hop1));
  }

  std::vector<SlotQuery> out = std::move(hop0_candidates);
  out.insert(out.end(), hop1_candidates.begin(), hop1_candidates.end());
  return out;
}

}  // namespace pkb::kbp
