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

#ifndef PKB_TACRED_H_
#define PKB_TACRED_H_

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pkb::tacred {

// Inclusive token index pair.
struct TokenSpan {
  int start = 0;
  int end = 0;

  bool operator==(const TokenSpan&) const = default;
  auto operator<=>(const TokenSpan&) const = default;

  bool overlaps(const TokenSpan& other) const {
    return start <= other.end && other.start <= end;
  }
};

// One sentence-level example. pos_tags/ner_tags are empty when the source
// file omits them; rules that need tags are skipped for such records.
struct SentenceRecord {
  std::string id;
  std::vector<std::string> tokens;
  TokenSpan subj_span;
  TokenSpan obj_span;
  std::string subj_type;
  std::string obj_type;
  std::string relation;
  std::vector<std::string> pos_tags;
  std::vector<std::string> ner_tags;

  bool operator==(const SentenceRecord&) const = default;

  std::string span_text(const TokenSpan& span) const;
};

struct Dataset {
  std::vector<SentenceRecord> records;
  std::set<std::string> relation_inventory;
  std::set<std::string> entity_type_inventory;
  // Non-fatal findings (e.g. relation labels outside the configured
  // inventory); surfaced by the CLI, never dropped records.
  std::vector<std::string> warnings;

  bool operator==(const Dataset& other) const {
    return records == other.records &&
           relation_inventory == other.relation_inventory &&
           entity_type_inventory == other.entity_type_inventory;
  }
};

// The 41 relation labels of the standard inventory.
const std::set<std::string>& default_relation_inventory();

inline constexpr std::string_view kNoRelation = "no_relation";

// Parses one file in the public release layout: an array of objects with
// fields "id", "token", "subj_start", "subj_end", "obj_start", "obj_end",
// "subj_type", "obj_type", "relation" and optional "stanford_pos",
// "stanford_ner". Dependency-parse fields are accepted and ignored.
//
// Malformed syntax raises std::runtime_error naming the byte offset;
// records violating span/tag invariants or duplicate ids raise
// std::runtime_error naming the record id. Relations outside the default
// inventory are accepted, collected into the dataset inventory, and noted
// in warnings.
Dataset parse_tacred(const std::filesystem::path& path);
Dataset parse_tacred_string(std::string_view text);

// Inverse of parsing; round-trips through parse_tacred_string.
std::string serialize_tacred(const Dataset& ds);

// Returns human-readable invariant violations; empty means valid.
std::vector<std::string> validate_record(const SentenceRecord& r,
                                         const std::set<std::string>& relation_inventory);

// Line-oriented report, one "<record-id>\t<violation>" per line.
// Returns the number of violations written.
int write_validation_report(const Dataset& ds,
                            const std::set<std::string>& relation_inventory,
                            std::ostream& out);

}  // namespace pkb::tacred

#endif  // PKB_TACRED_H_
