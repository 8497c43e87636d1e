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

#include "pkb/annotate.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "pkb/strings.hpp"

namespace pkb::annotate {

namespace fs = std::filesystem;
using tacred::SentenceRecord;
using tacred::TokenSpan;

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kDataset: return "dataset";
    case Provenance::kDictionary: return "dictionary";
    case Provenance::kPattern: return "pattern";
    case Provenance::kRule: return "rule";
    case Provenance::kPredicted: return "predicted";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// TokenPattern

bool TokenPattern::CharClass::contains(char c) const {
  if (any) return true;
  bool in = false;
  for (const auto& [lo, hi] : ranges) {
    if (c >= lo && c <= hi) {
      in = true;
      break;
    }
  }
  return negated ? !in : in;
}

TokenPattern TokenPattern::compile(std::string_view expr) {
  TokenPattern p;
  p.source_ = std::string(expr);
  auto fail = [&](size_t pos, const std::string& msg) {
    throw std::runtime_error("pattern '" + std::string(expr) + "' at position " +
                             std::to_string(pos) + ": " + msg);
  };
  size_t i = 0;
  while (i < expr.size()) {
    Item item;
    char c = expr[i];
    if (c == '?' || c == '*' || c == '+') fail(i, "quantifier without target");
    if (c == '.') {
      item.cls.any = true;
      i++;
    } else if (c == '\\') {
      if (i + 1 >= expr.size()) fail(i, "dangling escape");
      char e = expr[i + 1];
      if (e == 'd') {
        item.cls.ranges.push_back({'0', '9'});
      } else if (e == 'w') {
        item.cls.ranges.push_back({'a', 'z'});
        item.cls.ranges.push_back({'A', 'Z'});
        item.cls.ranges.push_back({'0', '9'});
        item.cls.ranges.push_back({'_', '_'});
      } else if (e == 's') {
        item.cls.ranges.push_back({' ', ' '});
        item.cls.ranges.push_back({'\t', '\t'});
      } else {
        item.cls.ranges.push_back({e, e});
      }
      i += 2;
    } else if (c == '[') {
      size_t start = i;
      i++;
      if (i < expr.size() && expr[i] == '^') {
        item.cls.negated = true;
        i++;
      }
      bool closed = false;
      while (i < expr.size()) {
        if (expr[i] == ']' && !item.cls.ranges.empty()) {
          closed = true;
          i++;
          break;
        }
        char lo = expr[i];
        if (lo == '\\' && i + 1 < expr.size()) {
          i++;
          lo = expr[i];
        }
        char hi = lo;
        if (i + 2 < expr.size() && expr[i + 1] == '-' && expr[i + 2] != ']') {
          hi = expr[i + 2];
          i += 2;
        }
        if (hi < lo) fail(start, "inverted range");
        item.cls.ranges.push_back({lo, hi});
        i++;
      }
      if (!closed) fail(start, "unterminated character class");
    } else {
      item.cls.ranges.push_back({c, c});
      i++;
    }
    if (i < expr.size()) {
      char q = expr[i];
      if (q == '?') {
        item.quant = Quant::kOpt;
        i++;
      } else if (q == '*') {
        item.quant = Quant::kStar;
        i++;
      } else if (q == '+') {
        item.quant = Quant::kPlus;
        i++;
      }
    }
    p.items_.push_back(std::move(item));
  }
  if (p.items_.empty()) fail(0, "empty pattern");
  return p;
}

bool TokenPattern::match_from(std::string_view token, size_t item, size_t pos) const {
  if (item == items_.size()) return pos == token.size();
  const Item& it = items_[item];
  switch (it.quant) {
    case Quant::kOne:
      return pos < token.size() && it.cls.contains(token[pos]) &&
             match_from(token, item + 1, pos + 1);
    case Quant::kOpt:
      if (pos < token.size() && it.cls.contains(token[pos]) &&
          match_from(token, item + 1, pos + 1)) {
        return true;
      }
      return match_from(token, item + 1, pos);
    case Quant::kPlus:
      if (pos >= token.size() || !it.cls.contains(token[pos])) return false;
      pos++;
      [[fallthrough]];
    case Quant::kStar: {
      // Greedy with backtracking.
      size_t end = pos;
      while (end < token.size() && it.cls.contains(token[end])) end++;
      for (size_t back = end + 1; back > pos; back--) {
        if (match_from(token, item + 1, back - 1)) return true;
      }
      return false;
    }
  }
  return false;
}

bool TokenPattern::matches(std::string_view token) const {
  if (items_.empty()) return false;
  return match_from(token, 0, 0);
}

// ---------------------------------------------------------------------------
// Coarse/fine type mapping

std::string fine_for_coarse(const std::string& coarse) {
  static const std::map<std::string, std::string> kMap = {
      {"PERSON", "name"},
      {"ORGANIZATION", "organization"},
      {"LOCATION", "location"},
      {"CITY", "location"},
      {"COUNTRY", "location"},
      {"STATE_OR_PROVINCE", "location"},
      {"NATIONALITY", "ethnicity"},
      {"RELIGION", "religion"},
      {"IDEOLOGY", "religion"},
      {"DATE", "date"},
      {"NUMBER", "number"},
      {"DURATION", "number"},
      {"TITLE", "title"},
      {"URL", "url"},
      {"CAUSE_OF_DEATH", "cause_of_death"},
      {"CRIMINAL_CHARGE", "charge"},
  };
  auto it = kMap.find(coarse);
  return it != kMap.end() ? it->second : "other";
}

std::string coarse_for_fine(const std::string& fine) {
  static const std::map<std::string, std::string> kMap = {
      {"name", "PERSON"},
      {"organization", "ORGANIZATION"},
      {"employer", "ORGANIZATION"},
      {"school", "ORGANIZATION"},
      {"location", "LOCATION"},
      {"residence", "LOCATION"},
      {"city_of_birth", "LOCATION"},
      {"city_of_death", "LOCATION"},
      {"country_of_birth", "LOCATION"},
      {"country_of_death", "LOCATION"},
      {"state_of_birth", "LOCATION"},
      {"state_of_death", "LOCATION"},
      {"date", "DATE"},
      {"date_of_birth", "DATE"},
      {"date_of_death", "DATE"},
      {"url", "URL"},
      {"title", "TITLE"},
      {"religion", "RELIGION"},
      {"age", "NUMBER"},
      {"number", "NUMBER"},
      {"charge", "CRIMINAL_CHARGE"},
      {"cause_of_death", "CAUSE_OF_DEATH"},
      {"ethnicity", "NATIONALITY"},
  };
  auto it = kMap.find(fine);
  return it != kMap.end() ? it->second : "MISC";
}

// ---------------------------------------------------------------------------
// Rule pack loading

namespace {

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_comment_or_blank(const std::string& line) {
  std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

}  // namespace

RuleSet load_rules(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("rules directory not found: " + dir.string());
  }
  RuleSet rules;
  rules.relation_inventory = tacred::default_relation_inventory();

  std::vector<fs::path> dict_files;
  fs::path patterns_file, relations_file, types_file, inventory_file;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() == ".dict") {
      dict_files.push_back(p);
    } else if (p.filename() == "patterns.conf") {
      patterns_file = p;
    } else if (p.filename() == "relations.rules") {
      relations_file = p;
    } else if (p.filename() == "entity_types.conf") {
      types_file = p;
    } else if (p.filename() == "relations.inventory") {
      inventory_file = p;
    }
  }
  std::sort(dict_files.begin(), dict_files.end());

  if (dict_files.empty()) {
    throw std::runtime_error("no dictionaries found in " + dir.string());
  }

  for (const auto& file : dict_files) {
    std::string fine_type = file.stem().string();
    if (rules.dictionaries.contains(fine_type)) {
      throw std::runtime_error("duplicate dictionary fine type '" + fine_type +
                               "' (" + file.string() + ")");
    }
    auto& dict = rules.dictionaries[fine_type];
    int max_tokens = 1;
    for (const auto& line : read_lines(file)) {
      if (is_comment_or_blank(line)) continue;
      std::string phrase = normalize_phrase(line);
      if (phrase.empty()) continue;
      max_tokens = std::max(max_tokens,
                            static_cast<int>(std::count(phrase.begin(), phrase.end(), ' ')) + 1);
      dict.insert(std::move(phrase));
    }
    rules.dictionary_max_tokens[fine_type] = max_tokens;
    rules.entity_type_inventory.insert(fine_type);
  }

  if (!patterns_file.empty()) {
    int lineno = 0;
    for (const auto& line : read_lines(patterns_file)) {
      lineno++;
      if (is_comment_or_blank(line)) continue;
      auto fields = split(line, '\t');
      if (fields.size() != 2) {
        throw std::runtime_error(patterns_file.string() + " line " +
                                 std::to_string(lineno) + ": expected 2 tab-separated fields");
      }
      std::string fine_type = trim(fields[0]);
      try {
        rules.patterns.emplace(fine_type, TokenPattern::compile(trim(fields[1])));
      } catch (const std::exception& e) {
        throw std::runtime_error(patterns_file.string() + " line " +
                                 std::to_string(lineno) + ": " + e.what());
      }
      rules.entity_type_inventory.insert(fine_type);
    }
  }

  if (!inventory_file.empty()) {
    for (const auto& line : read_lines(inventory_file)) {
      if (is_comment_or_blank(line)) continue;
      rules.relation_inventory.insert(trim(line));
    }
  }

  if (!relations_file.empty()) {
    int lineno = 0;
    for (const auto& line : read_lines(relations_file)) {
      lineno++;
      if (is_comment_or_blank(line)) continue;
      auto fields = split(line, '\t');
      if (fields.size() != 5) {
        throw std::runtime_error(relations_file.string() + " line " +
                                 std::to_string(lineno) + ": expected 5 tab-separated fields");
      }
      RelationRule rule;
      rule.subject_coarse = trim(fields[0]);
      rule.object_type = trim(fields[1]);
      rule.relation = trim(fields[2]);
      try {
        rule.window = std::stoi(trim(fields[3]));
      } catch (const std::exception&) {
        throw std::runtime_error(relations_file.string() + " line " +
                                 std::to_string(lineno) + ": bad window");
      }
      if (rule.window < 0) {
        throw std::runtime_error(relations_file.string() + " line " +
                                 std::to_string(lineno) + ": bad window");
      }
      if (!rules.relation_inventory.contains(rule.relation)) {
        throw std::runtime_error(relations_file.string() + " line " +
                                 std::to_string(lineno) + ": relation '" + rule.relation +
                                 "' not in the relation inventory");
      }
      for (const auto& trig : split(trim(fields[4]), ',')) {
        std::string norm = normalize_phrase(trig);
        if (norm.empty()) continue;
        rule.triggers.push_back(split(norm, ' '));
      }
      if (rule.triggers.empty()) {
        throw std::runtime_error(relations_file.string() + " line " +
                                 std::to_string(lineno) + ": no trigger phrases");
      }
      rules.relation_rules.push_back(std::move(rule));
    }
  }

  if (!types_file.empty()) {
    for (const auto& line : read_lines(types_file)) {
      if (is_comment_or_blank(line)) continue;
      rules.entity_type_inventory.insert(trim(line));
    }
  }

  // Coarse-type fallbacks must always be legal fine types.
  for (const char* fine : {"name", "organization", "location", "ethnicity", "religion",
                           "date", "number", "title", "url", "cause_of_death", "charge",
                           "other"}) {
    rules.entity_type_inventory.insert(fine);
  }
  return rules;
}

// ---------------------------------------------------------------------------
// Entity annotation

namespace {

std::vector<std::string> normalized_tokens(const SentenceRecord& r) {
  std::vector<std::string> out;
  out.reserve(r.tokens.size());
  for (const auto& t : r.tokens) out.push_back(normalize_phrase(t));
  return out;
}

struct MentionOrder {
  bool operator()(const EntityMention& a, const EntityMention& b) const {
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    if (a.fine_type != b.fine_type) return a.fine_type < b.fine_type;
    if (a.span.end != b.span.end) return a.span.end < b.span.end;
    return static_cast<int>(a.provenance) < static_cast<int>(b.provenance);
  }
};

}  // namespace

std::vector<EntityMention> annotate_entities(const SentenceRecord& r,
                                             const RuleSet& rules) {
  std::vector<EntityMention> out;
  const int n = static_cast<int>(r.tokens.size());

  auto overlaps_same_type = [&](const TokenSpan& span, const std::string& fine) {
    for (const auto& m : out) {
      if (m.fine_type == fine && m.span.overlaps(span)) return true;
    }
    return false;
  };

  // Dataset spans first: they take precedence within their fine type.
  for (const auto& [span, coarse] :
       {std::pair{r.subj_span, r.subj_type}, std::pair{r.obj_span, r.obj_type}}) {
    EntityMention m;
    m.record_id = r.id;
    m.span = span;
    m.surface = r.span_text(span);
    m.coarse_type = coarse;
    m.fine_type = fine_for_coarse(coarse);
    m.provenance = Provenance::kDataset;
    if (!overlaps_same_type(m.span, m.fine_type)) out.push_back(std::move(m));
  }

  const auto norm = normalized_tokens(r);

  // Dictionary pass: per type, longest match wins, leftmost first; the scan
  // resumes after each match so same-type matches never overlap.
  for (const auto& [fine_type, phrases] : rules.dictionaries) {
    const int max_tokens = rules.dictionary_max_tokens.at(fine_type);
    int i = 0;
    while (i < n) {
      int best_end = -1;
      std::string candidate;
      for (int j = i; j < std::min(n, i + max_tokens); j++) {
        if (!candidate.empty()) candidate.push_back(' ');
        candidate += norm[j];
        if (phrases.contains(candidate)) best_end = j;
      }
      if (best_end >= 0) {
        EntityMention m;
        m.record_id = r.id;
        m.span = {i, best_end};
        m.surface = r.span_text(m.span);
        m.coarse_type = coarse_for_fine(fine_type);
        m.fine_type = fine_type;
        m.provenance = Provenance::kDictionary;
        if (!overlaps_same_type(m.span, fine_type)) out.push_back(std::move(m));
        i = best_end + 1;
      } else {
        i++;
      }
    }
  }

  // Pattern pass: single-token, anchored. Patterns see the raw token.
  for (const auto& [fine_type, pattern] : rules.patterns) {
    for (int i = 0; i < n; i++) {
      if (!pattern.matches(r.tokens[i])) continue;
      TokenSpan span{i, i};
      if (overlaps_same_type(span, fine_type)) continue;
      EntityMention m;
      m.record_id = r.id;
      m.span = span;
      m.surface = r.tokens[i];
      m.coarse_type = coarse_for_fine(fine_type);
      m.fine_type = fine_type;
      m.provenance = Provenance::kPattern;
      out.push_back(std::move(m));
    }
  }

  std::sort(out.begin(), out.end(), MentionOrder{});
  return out;
}

// ---------------------------------------------------------------------------
// Relation annotation

namespace {

// Token gap between two spans; 0 when adjacent or overlapping.
int span_gap(const TokenSpan& a, const TokenSpan& b) {
  if (a.overlaps(b)) return 0;
  if (a.end < b.start) return b.start - a.end - 1;
  return a.start - b.end - 1;
}

// All occurrences of a normalized trigger token sequence.
std::vector<TokenSpan> find_trigger(const std::vector<std::string>& norm,
                                    const std::vector<std::string>& trigger) {
  std::vector<TokenSpan> hits;
  const int n = static_cast<int>(norm.size());
  const int k = static_cast<int>(trigger.size());
  for (int i = 0; i + k <= n; i++) {
    bool ok = true;
    for (int j = 0; j < k; j++) {
      if (norm[i + j] != trigger[j]) {
        ok = false;
        break;
      }
    }
    if (ok) hits.push_back({i, i + k - 1});
  }
  return hits;
}

struct TripleKey {
  TokenSpan subj, obj;
  std::string relation;

  auto operator<=>(const TripleKey&) const = default;
};

}  // namespace

std::vector<RelationAnnotation> annotate_relations(
    const SentenceRecord& r, const std::vector<EntityMention>& mentions,
    const RuleSet& rules) {
  std::map<TripleKey, RelationAnnotation> dedup;

  auto emit = [&](RelationAnnotation ann) {
    TripleKey key{ann.subject.span, ann.object.span, ann.relation};
    auto it = dedup.find(key);
    if (it == dedup.end()) {
      dedup.emplace(std::move(key), std::move(ann));
    } else if (it->second.provenance != Provenance::kDataset &&
               ann.provenance == Provenance::kDataset) {
      it->second = std::move(ann);
    }
  };

  // Gold relation from the dataset.
  if (r.relation != tacred::kNoRelation) {
    const EntityMention* subj = nullptr;
    const EntityMention* obj = nullptr;
    for (const auto& m : mentions) {
      if (m.provenance != Provenance::kDataset) continue;
      if (m.span == r.subj_span) subj = &m;
      if (m.span == r.obj_span) obj = &m;
    }
    if (subj != nullptr && obj != nullptr) {
      RelationAnnotation ann;
      ann.record_id = r.id;
      ann.subject = *subj;
      ann.object = *obj;
      ann.relation = r.relation;
      ann.provenance = Provenance::kDataset;
      ann.confidence = 1.0;
      emit(std::move(ann));
    }
  }

  const auto norm = normalized_tokens(r);

  for (const auto& rule : rules.relation_rules) {
    std::vector<TokenSpan> trigger_hits;
    for (const auto& trigger : rule.triggers) {
      auto hits = find_trigger(norm, trigger);
      trigger_hits.insert(trigger_hits.end(), hits.begin(), hits.end());
    }
    if (trigger_hits.empty()) continue;

    for (const auto& subj : mentions) {
      if (subj.coarse_type != rule.subject_coarse) continue;
      for (const auto& obj : mentions) {
        if (obj.span.overlaps(subj.span)) continue;
        if (obj.fine_type != rule.object_type && obj.coarse_type != rule.object_type) {
          continue;
        }
        // Person-person rules fire once per pair, leftmost mention as subject.
        if (obj.coarse_type == rule.subject_coarse && obj.span < subj.span) continue;
        bool fired = false;
        for (const auto& t : trigger_hits) {
          if (span_gap(subj.span, t) <= rule.window &&
              span_gap(obj.span, t) <= rule.window) {
            fired = true;
            break;
          }
        }
        if (!fired) continue;
        RelationAnnotation ann;
        ann.record_id = r.id;
        ann.subject = subj;
        ann.object = obj;
        ann.relation = rule.relation;
        ann.provenance = Provenance::kRule;
        ann.confidence = 1.0;
        emit(std::move(ann));
      }
    }
  }

  std::vector<RelationAnnotation> out;
  out.reserve(dedup.size());
  for (auto& [key, ann] : dedup) out.push_back(std::move(ann));
  return out;
}

}  // namespace pkb::annotate
