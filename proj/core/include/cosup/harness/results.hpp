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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cosup/trainer/train_config.hpp"

namespace cosup::harness {

struct RunResult {
  double fraction = 0.0;
  trainer::Method method = trainer::Method::kBaseline;
  std::uint64_t seed = 0;
  std::optional<double> accuracy;  // empty when the run failed
  std::string error;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// Mean and sample standard deviation over the successful seeds of one
// (fraction, method) cell.
struct Aggregate {
  double fraction = 0.0;
  trainer::Method method = trainer::Method::kBaseline;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t runs = 0;
  std::size_t failed = 0;
};

class ResultsTable {
 public:
  // Throws ArgumentError on an accuracy outside [0, 1] or a duplicate key.
  void add(const RunResult& run);
  const std::vector<RunResult>& runs() const { return runs_; }
  // Sorted distinct fractions; methods in first-seen order.
  std::vector<double> fractions() const;
  std::vector<trainer::Method> methods() const;
  std::vector<Aggregate> aggregates() const;
  std::optional<Aggregate> aggregate(double fraction, trainer::Method method) const;
  bool empty() const { return runs_.empty(); }

  friend bool operator==(const ResultsTable&, const ResultsTable&) = default;

 private:
  std::vector<RunResult> runs_;
};

enum class TableFormat { kCsv, kMarkdown };
TableFormat parse_table_format(std::string_view name);

// Percent with one decimal, ties to even.
std::string format_percent(double fraction);

// Fractions as rows and methods as columns. Markdown cells read
// "mean±std" in percent; the csv has one row per cell with separate
// mean and std columns. Cells without a successful run read "failed".
std::string emit_results_table(const ResultsTable& table, TableFormat format);

// One rendered cell as read back from either rendering.
struct RenderedCell {
  double fraction_percent = 0.0;
  std::string method;
  std::optional<double> mean_percent;
  std::optional<double> std_percent;

  friend bool operator==(const RenderedCell&, const RenderedCell&) = default;
};
std::vector<RenderedCell> parse_rendered_table(std::string_view text, TableFormat format);

// Per-run rows (fraction, method, seed, accuracy, error) with full
// precision; parse_runs_csv inverts it.
std::string emit_runs_csv(const ResultsTable& table);
ResultsTable parse_runs_csv(std::string_view text);

}  // namespace cosup::harness
