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

#ifndef PKB_ANNOTATE_H_
#define PKB_ANNOTATE_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pkb/tacred.hpp"

namespace pkb::annotate {

enum class Provenance { kDataset, kDictionary, kPattern, kRule, kPredicted };

std::string_view provenance_name(Provenance p);

// A typed span. coarse_type follows the dataset convention (PERSON,
// ORGANIZATION, ...); fine_type is a personal-data entity type from the
// configured inventory (religion, school, email, ...).
struct EntityMention {
  std::string record_id;
  tacred::TokenSpan span;
  std::string surface;
  std::string coarse_type;
  std::string fine_type;
  Provenance provenance = Provenance::kDictionary;

  bool operator==(const EntityMention&) const = default;
};

struct RelationAnnotation {
  std::string record_id;
  EntityMention subject;
  EntityMention object;
  std::string relation;
  Provenance provenance = Provenance::kRule;
  double confidence = 1.0;
};

// Single-token pattern over characters: literals, '.', escapes
// (\d \w \s and escaped punctuation), character classes with ranges and
// negation, and the ? * + quantifiers. Anchored at both token ends.
class TokenPattern {
 public:
  TokenPattern() = default;

  // Throws std::runtime_error naming the offending position on bad syntax.
  static TokenPattern compile(std::string_view expr);

  bool matches(std::string_view token) const;

  const std::string& source() const { return source_; }

 private:
  struct CharClass {
    bool any = false;
    bool negated = false;
    std::vector<std::pair<char, char>> ranges;

    bool contains(char c) const;
  };
  enum class Quant { kOne, kOpt, kStar, kPlus };
  struct Item {
    CharClass cls;
    Quant quant = Quant::kOne;
  };

  bool match_from(std::string_view token, size_t item, size_t pos) const;

  std::vector<Item> items_;
  std::string source_;
};

// One trigger-window labeling rule: a subject of the given coarse type and
// an object matching object_type (fine or coarse) within `window` tokens
// of one of the trigger phrases yield `relation`.
struct RelationRule {
  std::string subject_coarse;
  std::string object_type;
  std::string relation;
  int window = 0;
  std::vector<std::vector<std::string>> triggers;  // normalized token sequences
};

struct RuleSet {
  std::map<std::string, std::set<std::string>> dictionaries;  // fine_type -> phrases
  std::map<std::string, int> dictionary_max_tokens;
  std::map<std::string, TokenPattern> patterns;
  std::vector<RelationRule> relation_rules;
  std::set<std::string> entity_type_inventory;  // fine types
  std::set<std::string> relation_inventory;     // labels rules may emit
};

// Loads a rule pack directory (recursively):
//   *.dict            one normalized phrase per line, '#' comments
//   patterns.conf     "<fine_type>\t<pattern_expression>" lines
//   relations.rules   "<subj_coarse>\t<obj_type>\t<relation>\t<window>\t<t1,t2,...>"
//   entity_types.conf optional, one fine type per line
//   relations.inventory optional, extra relation labels beyond the default 41
// Duplicate dictionary stems, unknown rule labels, or a pack without
// dictionaries raise std::runtime_error.
RuleSet load_rules(const std::filesystem::path& dir);

// Fixed mapping from dataset coarse types to personal-data fine types.
std::string fine_for_coarse(const std::string& coarse);
std::string coarse_for_fine(const std::string& fine);

// All maximal-length dictionary matches (longest match wins, leftmost first
// on ties), all pattern matches, and the record's subject/object spans as
// dataset-provenance mentions. Matching ignores context: a dictionary hit
// fires regardless of how the phrase is used. No two returned mentions of
// the same fine type overlap. Output is sorted by (span start, fine type).
std::vector<EntityMention> annotate_entities(const tacred::SentenceRecord& r,
                                             const RuleSet& rules);

// The record's gold relation (when not no_relation) plus every
// trigger-window rule firing, deduplicated per (subject, object, relation)
// with dataset provenance winning. Sorted by (subject span, object span,
// relation).
std::vector<RelationAnnotation> annotate_relations(
    const tacred::SentenceRecord& r, const std::vector<EntityMention>& mentions,
    const RuleSet& rules);

}  // namespace pkb::annotate

#endif  // PKB_ANNOTATE_H_
