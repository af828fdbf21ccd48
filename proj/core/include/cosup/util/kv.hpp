// Copyright 2026 The cosup Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cosup::kv {

// One `key = value` line of a flat config file.
struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

// Grammar: one `key = value` per line; `#` starts a comment anywhere on a
// line; blank lines are ignored; keys are [A-Za-z0-9_.]+; surrounding
// whitespace is trimmed. Duplicate keys are an error.
std::vector<Entry> parse(std::string_view text, std::string_view source);

std::string trim(std::string_view text);
std::vector<std::string> split_list(std::string_view text);

// Typed conversions; `what` names the key in error messages.
double to_double(const Entry& entry);
std::int64_t to_int(const Entry& entry);
bool to_bool(const Entry& entry);
std::vector<double> to_double_list(const Entry& entry);
std::vector<std::int64_t> to_int_list(const Entry& entry);

// Levenshtein distance, for "did you mean" hints.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace cosup::kv
