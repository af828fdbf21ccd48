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

#include "cosup/harness/results.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <sstream>

#include "cosup/util/errors.hpp"
#include "cosup/util/kv.hpp"

namespace cosup::harness {

namespace {

constexpr std::string_view kPlusMinus = "±";

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(kv::trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!kv::trim(line).empty()) out.push_back(line);
  }
  return out;
}

double to_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(fmt::format("'{}' is not a number", s));
}

std::string fraction_label(double fraction) { return fmt::format("{:g}", fraction * 100.0); }

// Percent rounded to one decimal, ties to even.
double round_percent(double fraction) {
  std::fesetround(FE_TONEAREST);
  return std::nearbyint(fraction * 1000.0) / 10.0;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

void ResultsTable::add(const RunResult& run) {
  if (run.accuracy && !(*run.accuracy >= 0.0 && *run.accuracy <= 1.0)) {
    throw ArgumentError(fmt::format("accuracy {} is outside [0, 1]", *run.accuracy));
  }
  for (const auto& r : runs_) {
    if (r.fraction == run.fraction && r.method == run.method && r.seed == run.seed) {
      throw ArgumentError("duplicate (fraction, method, seed) result");
    }
  }
  runs_.push_back(run);
}

std::vector<double> ResultsTable::fractions() const {
  std::vector<double> out;
  for (const auto& r : runs_) out.push_back(r.fraction);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<trainer::Method> ResultsTable::methods() const {
  std::vector<trainer::Method> out;
  for (const auto& r : runs_) {
    if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
  }
  return out;
}

std::optional<Aggregate> ResultsTable::aggregate(double fraction,
                                                 trainer::Method method) const {
  Aggregate a{fraction, method, 0.0, 0.0, 0, 0};
  std::vector<double> values;
  for (const auto& r : runs_) {
    if (r.fraction != fraction || r.method != method) continue;
    if (r.accuracy) {
      values.push_back(*r.accuracy);
    } else {
      ++a.failed;
    }
  }
  if (values.empty() && a.failed == 0) return std::nullopt;
  a.runs = values.size();
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double sq = 0.0;
      for (double v : values) sq += (v - a.mean) * (v - a.mean);
      a.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
  }
  return a;
}

std::vector<Aggregate> ResultsTable::aggregates() const {
  std::vector<Aggregate> out;
  for (double f : fractions()) {
    for (auto m : methods()) {
      if (auto a = aggregate(f, m)) out.push_back(*a);
    }
  }
  return out;
}

TableFormat parse_table_format(std::string_view name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "markdown" || name == "md") return TableFormat::kMarkdown;
  throw ArgumentError(fmt::format("unknown table format '{}' (expected csv or markdown)", name));
}

std::string format_percent(double fraction) {
  return fmt::format("{:.1f}", round_percent(fraction));
}

std::string emit_results_table(const ResultsTable& table, TableFormat format) {
  if (table.empty()) throw ArgumentError("cannot render an empty results table");
  const auto methods = table.methods();
  std::string out;
  if (format == TableFormat::kMarkdown) {
    out += "| fraction (%) |";
    for (auto m : methods) out += fmt::format(" {} |", trainer::method_name(m));
    out += "\n| --- |";
    for (std::size_t i = 0; i < methods.size(); ++i) out += " --- |";
    out += "\n";
    for (double f : table.fractions()) {
      out += fmt::format("| {} |", fraction_label(f));
      for (auto m : methods) {
        const auto a = table.aggregate(f, m);
        std::string cell = "-";
        if (a && a->runs == 0) {
          cell = "failed";
        } else if (a) {
          cell = fmt::format("{}{}{}", format_percent(a->mean), kPlusMinus,
                             format_percent(a->stddev));
          if (a->failed > 0) cell += fmt::format(" ({} failed)", a->failed);
        }
        out += fmt::format(" {} |", cell);
      }
      out += "\n";
    }
    return out;
  }
  out += "fraction_pct,method,mean_pct,std_pct,runs,failed\n";
  for (const auto& a : table.aggregates()) {
    const bool ok = a.runs > 0;
    out += fmt::format("{},{},{},{},{},{}\n", fraction_label(a.fraction),
                       trainer::method_name(a.method), ok ? format_percent(a.mean) : "",
                       ok ? format_percent(a.stddev) : "", a.runs, a.failed);
  }
  return out;
}

std::vector<RenderedCell> parse_rendered_table(std::string_view text, TableFormat format) {
  const auto lines = lines_of(text);
  std::vector<RenderedCell> cells;
  if (format == TableFormat::kCsv) {
    if (lines.empty() || split(lines[0], ',').size() != 6) {
      throw FormatError("results csv lacks its header");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i], ',');
      if (f.size() != 6) throw FormatError(fmt::format("bad results row '{}'", lines[i]));
      RenderedCell c{to_number(f[0]), f[1], std::nullopt, std::nullopt};
      if (!f[2].empty()) c.mean_percent = to_number(f[2]);
      if (!f[3].empty()) c.std_percent = to_number(f[3]);
      cells.push_back(c);
    }
    return cells;
  }
  auto row_cells = [](const std::string& line) {
    auto f = split(line, '|');
    if (f.size() < 3 || !f.front().empty() || !f.back().empty()) {
      throw FormatError(fmt::format("bad markdown row '{}'", line));
    }
    return std::vector<std::string>(f.begin() + 1, f.end() - 1);
  };
  if (lines.size() < 2) throw FormatError("markdown table lacks its header");
  const auto header = row_cells(lines[0]);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto f = row_cells(lines[i]);
    if (f.size() != header.size()) {
      throw FormatError(fmt::format("bad markdown row '{}'", lines[i]));
    }
    for (std::size_t j = 1; j < f.size(); ++j) {
      if (f[j] == "-") continue;
      RenderedCell c{to_number(f[0]), header[j], std::nullopt, std::nullopt};
      if (f[j] != "failed") {
        std::string cell = f[j].substr(0, f[j].find(' '));
        const auto pm = cell.find(kPlusMinus);
        if (pm == std::string::npos) throw FormatError(fmt::format("bad cell '{}'", f[j]));
        c.mean_percent = to_number(cell.substr(0, pm));
        c.std_percent = to_number(cell.substr(pm + kPlusMinus.size()));
      }
      cells.push_back(c);
    }
  }
  return cells;
}

std::string emit_runs_csv(const ResultsTable& table) {
  std::string out = "fraction,method,seed,accuracy,error\n";
  for (const auto& r : table.runs()) {
    out += fmt::format("{},{},{},{},{}\n", r.fraction, trainer::method_name(r.method), r.seed,
                       r.accuracy ? fmt::format("{}", *r.accuracy) : "", sanitize(r.error));
  }
  return out;
}

ResultsTable parse_runs_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != "fraction,method,seed,accuracy,error") {
    throw FormatError("runs csv lacks its header");
  }
  ResultsTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 5) throw FormatError(fmt::format("bad runs row '{}'", lines[i]));
    RunResult r;
    r.fraction = to_number(f[0]);
    r.method = trainer::parse_method(f[1]);
    r.seed = static_cast<std::uint64_t>(std::stoull(f[2]));
    if (!f[3].empty()) r.accuracy = to_number(f[3]);
    r.error = f[4];
    table.add(r);
  }
  return table;
}

}  // namespace cosup::harness
