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

#include "cosup/util/kv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "cosup/util/errors.hpp"

namespace cosup::kv {
namespace {

[[noreturn]] void fail(const Entry& entry, const std::string& message) {
  throw ConfigError("line " + std::to_string(entry.line) + ": key '" +
                    entry.key + "': " + message);
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

}  // namespace

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    items.push_back(trim(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<Entry> parse(std::string_view text, std::string_view source) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    const auto eq = stripped.find('=');
    const std::string where =
        std::string(source) + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    Entry entry{trim(std::string_view(stripped).substr(0, eq)),
                trim(std::string_view(stripped).substr(eq + 1)), line_no};
    if (!valid_key(entry.key)) {
      throw ConfigError(where + ": invalid key '" + entry.key + "'");
    }
    if (!seen.insert(entry.key).second) {
      throw ConfigError(where + ": duplicate key '" + entry.key + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

double to_double(const Entry& entry) {
  const std::string& v = entry.value;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    fail(entry, "expected a number, got '" + v + "'");
  }
  return out;
}

std::int64_t to_int(const Entry& entry) {
  const std::string& v = entry.value;
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    fail(entry, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const Entry& entry) {
  std::string v = entry.value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(entry, "expected a boolean, got '" + entry.value + "'");
}

std::vector<double> to_double_list(const Entry& entry) {
  std::vector<double> out;
  for (const auto& item : split_list(entry.value)) {
    out.push_back(to_double(Entry{entry.key, item, entry.line}));
  }
  return out;
}

std::vector<std::int64_t> to_int_list(const Entry& entry) {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(entry.value)) {
    out.push_back(to_int(Entry{entry.key, item, entry.line}));
  }
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace cosup::kv
