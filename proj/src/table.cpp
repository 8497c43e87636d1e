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

#include "pkb/table.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pkb {

namespace {

bool parses_as_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); i++) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

int DataTable::column_index(const std::string& name) const {
  for (int i = 0; i < cols(); i++) {
    if (column_names[i] == name) return i;
  }
  return -1;
}

void DataTable::infer_kinds() {
  kinds.assign(column_names.size(), ColumnKind::kCategorical);
  for (int c = 0; c < cols(); c++) {
    int non_missing = 0;
    bool numeric = true;
    std::set<std::string> distinct;
    for (const auto& row : rows) {
      const std::string& cell = row[c];
      if (cell == kMissingMarker) continue;
      non_missing++;
      distinct.insert(cell);
      if (numeric && !parses_as_number(cell)) numeric = false;
    }
    if (non_missing == 0) {
      kinds[c] = ColumnKind::kCategorical;
    } else if (numeric) {
      kinds[c] = ColumnKind::kNumeric;
    } else if (non_missing >= 5 &&
               distinct.size() > static_cast<size_t>(0.8 * non_missing)) {
      kinds[c] = ColumnKind::kText;
    }
  }
}

void DataTable::write_csv(std::ostream& out) const {
  out << "person_id";
  for (const auto& name : column_names) out << ',' << csv_quote(name);
  out << '\n';
  for (int i = 0; i < row_count(); i++) {
    out << row_ids[i];
    for (const auto& cell : rows[i]) out << ',' << csv_quote(cell);
    out << '\n';
  }
}

void DataTable::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out);
}

DataTable DataTable::read_csv(std::istream& in) {
  DataTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = csv_split(line);
  if (header.empty() || header[0] != "person_id") {
    throw std::runtime_error("csv missing person_id column");
  }
  t.column_names.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("csv row has " + std::to_string(fields.size()) +
                               " fields, expected " + std::to_string(header.size()));
    }
    t.row_ids.push_back(std::stoll(fields[0]));
    t.rows.emplace_back(fields.begin() + 1, fields.end());
  }
  t.infer_kinds();
  return t;
}

DataTable DataTable::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

std::vector<int> DataTable::take_int_column(const std::string& name) {
  int c = column_index(name);
  if (c < 0) throw std::invalid_argument("no column named '" + name + "'");
  std::vector<int> values;
  values.reserve(rows.size());
  for (auto& row : rows) {
    values.push_back(std::stoi(row[c]));
    row.erase(row.begin() + c);
  }
  column_names.erase(column_names.begin() + c);
  if (static_cast<int>(kinds.size()) > c) kinds.erase(kinds.begin() + c);
  return values;
}

}  // namespace pkb
