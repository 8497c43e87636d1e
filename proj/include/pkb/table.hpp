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

#ifndef PKB_TABLE_H_
#define PKB_TABLE_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pkb {

inline constexpr const char* kMissingMarker = "__NA__";

enum class ColumnKind { kNumeric, kCategorical, kText };

// A small string-celled table keyed by person id. The bridge between the
// property graph and the numeric stages.
struct DataTable {
  std::vector<std::string> column_names;
  std::vector<ColumnKind> kinds;  // parallel to column_names
  std::vector<int64_t> row_ids;
  std::vector<std::vector<std::string>> rows;

  int cols() const { return static_cast<int>(column_names.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }

  int column_index(const std::string& name) const;  // -1 when absent

  // Re-derives kinds from cell content: a column where every non-missing
  // cell parses as a number is numeric; a non-numeric column where nearly
  // every value is distinct (>80% of at least 5 non-missing cells) is
  // treated as free text; everything else is categorical.
  void infer_kinds();

  // Header row then one line per row; the row id is emitted as a leading
  // "person_id" column. RFC-style quoting.
  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;

  static DataTable read_csv(std::istream& in);
  static DataTable load_csv(const std::string& path);

  // Splits off a named column (dropping it from the table) as integers;
  // used for the binary target.
  std::vector<int> take_int_column(const std::string& name);
};

}  // namespace pkb

#endif  // PKB_TABLE_H_
