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

#ifndef PKB_STRINGS_H_
#define PKB_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace pkb {

// ASCII lower-casing; non-ASCII bytes pass through unchanged.
std::string to_lower(std::string_view s);

// Case-folds and collapses runs of whitespace to single spaces,
// trimming at both ends. This is the normalization used everywhere a
// surface string is compared (dictionaries, entity resolution, slot
// filler matching).
std::string normalize_phrase(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Splits on whitespace, dropping empty fields.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string trim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace pkb

#endif  // PKB_STRINGS_H_
