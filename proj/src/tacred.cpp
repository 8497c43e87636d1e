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

#include "pkb/tacred.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pkb/strings.hpp"

namespace pkb::tacred {

using nlohmann::json;

std::string SentenceRecord::span_text(const TokenSpan& span) const {
  std::string out;
  for (int i = span.start; i <= span.end && i < static_cast<int>(tokens.size()); i++) {
    if (!out.empty()) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

const std::set<std::string>& default_relation_inventory() {
  static const std::set<std::string> kInventory = {
      "per:age",
      "per:alternate_names",
      "per:cause_of_death",
      "per:charges",
      "per:children",
      "per:cities_of_residence",
      "per:city_of_birth",
      "per:city_of_death",
      "per:countries_of_residence",
      "per:country_of_birth",
      "per:country_of_death",
      "per:date_of_birth",
      "per:date_of_death",
      "per:employee_of",
      "per:origin",
      "per:other_family",
      "per:parents",
      "per:religion",
      "per:schools_attended",
      "per:siblings",
      "per:spouse",
      "per:stateorprovince_of_birth",
      "per:stateorprovince_of_death",
      "per:stateorprovinces_of_residence",
      "per:title",
      "org:alternate_names",
      "org:city_of_headquarters",
      "org:country_of_headquarters",
      "org:dissolved",
      "org:founded",
      "org:founded_by",
      "org:member_of",
      "org:members",
      "org:number_of_employees/members",
      "org:parents",
      "org:political/religious_affiliation",
      "org:shareholders",
      "org:stateorprovince_of_headquarters",
      "org:subsidiaries",
      "org:top_members/employees",
      "org:website",
  };
  return kInventory;
}

namespace {

std::vector<std::string> string_array(const json& obj, const char* key,
                                      const std::string& record_id) {
  if (!obj.contains(key)) return {};
  const json& arr = obj.at(key);
  if (!arr.is_array()) {
    throw std::runtime_error("record " + record_id + ": field '" + key +
                             "' is not an array");
  }
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_string()) {
      throw std::runtime_error("record " + record_id + ": field '" + key +
                               "' has a non-string element");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

int int_field(const json& obj, const char* key, const std::string& record_id) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw std::runtime_error("record " + record_id + ": missing integer field '" +
                             std::string(key) + "'");
  }
  return obj.at(key).get<int>();
}

std::string str_field(const json& obj, const char* key, const std::string& record_id) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw std::runtime_error("record " + record_id + ": missing string field '" +
                             std::string(key) + "'");
  }
  return obj.at(key).get<std::string>();
}

Dataset from_json(const json& root) {
  if (!root.is_array()) {
    throw std::runtime_error("parse error: top-level value is not an array");
  }
  Dataset ds;
  std::unordered_set<std::string> seen_ids;
  for (const auto& obj : root) {
    if (!obj.is_object()) {
      throw std::runtime_error("parse error: record is not an object");
    }
    SentenceRecord r;
    r.id = str_field(obj, "id", "<unknown>");
    if (!seen_ids.insert(r.id).second) {
      throw std::runtime_error("record " + r.id + ": duplicate id");
    }
    r.tokens = string_array(obj, "token", r.id);
    r.subj_span = {int_field(obj, "subj_start", r.id), int_field(obj, "subj_end", r.id)};
    r.obj_span = {int_field(obj, "obj_start", r.id), int_field(obj, "obj_end", r.id)};
    r.subj_type = str_field(obj, "subj_type", r.id);
    r.obj_type = str_field(obj, "obj_type", r.id);
    r.relation = str_field(obj, "relation", r.id);
    r.pos_tags = string_array(obj, "stanford_pos", r.id);
    r.ner_tags = string_array(obj, "stanford_ner", r.id);

    // Structural invariants are fatal at ingest; relation inventory
    // membership is a warning handled below. An empty inventory disables
    // the relation check in validate_record.
    for (const auto& v : validate_record(r, {})) {
      throw std::runtime_error("record " + r.id + ": " + v);
    }

    if (r.relation != kNoRelation) {
      if (!default_relation_inventory().contains(r.relation)) {
        ds.warnings.push_back("record " + r.id + ": relation '" + r.relation +
                              "' outside the default inventory");
      }
      ds.relation_inventory.insert(r.relation);
    }
    ds.entity_type_inventory.insert(r.subj_type);
    ds.entity_type_inventory.insert(r.obj_type);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

}  // namespace

Dataset parse_tacred_string(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("parse error at byte " + std::to_string(e.byte) +
                             ": " + e.what());
  }
  return from_json(root);
}

Dataset parse_tacred(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tacred_string(buf.str());
}

std::string serialize_tacred(const Dataset& ds) {
  json root = json::array();
  for (const auto& r : ds.records) {
    json obj;
    obj["id"] = r.id;
    obj["token"] = r.tokens;
    obj["subj_start"] = r.subj_span.start;
    obj["subj_end"] = r.subj_span.end;
    obj["obj_start"] = r.obj_span.start;
    obj["obj_end"] = r.obj_span.end;
    obj["subj_type"] = r.subj_type;
    obj["obj_type"] = r.obj_type;
    obj["relation"] = r.relation;
    if (!r.pos_tags.empty()) obj["stanford_pos"] = r.pos_tags;
    if (!r.ner_tags.empty()) obj["stanford_ner"] = r.ner_tags;
    root.push_back(std::move(obj));
  }
  return root.dump(2);
}

std::vector<std::string> validate_record(const SentenceRecord& r,
                                         const std::set<std::string>& relation_inventory) {
  std::vector<std::string> out;
  const int n = static_cast<int>(r.tokens.size());
  auto check_span = [&](const TokenSpan& s, const char* name) {
    if (s.start < 0 || s.start > s.end || s.end >= n) {
      out.push_back(std::string("span out of bounds: ") + name + " (" +
                    std::to_string(s.start) + "," + std::to_string(s.end) +
                    ") over " + std::to_string(n) + " tokens");
      return false;
    }
    return true;
  };
  bool subj_ok = check_span(r.subj_span, "subj");
  bool obj_ok = check_span(r.obj_span, "obj");
  if (subj_ok && obj_ok && r.subj_span.overlaps(r.obj_span)) {
    out.push_back("span overlap between subj and obj");
  }
  if (!r.pos_tags.empty() && static_cast<int>(r.pos_tags.size()) != n) {
    out.push_back("tag-array length mismatch: stanford_pos");
  }
  if (!r.ner_tags.empty() && static_cast<int>(r.ner_tags.size()) != n) {
    out.push_back("tag-array length mismatch: stanford_ner");
  }
  if (!relation_inventory.empty() && r.relation != kNoRelation &&
      !relation_inventory.contains(r.relation)) {
    out.push_back("unknown relation '" + r.relation + "'");
  }
  return out;
}

int write_validation_report(const Dataset& ds,
                            const std::set<std::string>& relation_inventory,
                            std::ostream& out) {
  int count = 0;
  for (const auto& r : ds.records) {
    for (const auto& v : validate_record(r, relation_inventory)) {
      out << r.id << '\t' << v << '\n';
      count++;
    }
  }
  return count;
}

}  // namespace pkb::tacred
