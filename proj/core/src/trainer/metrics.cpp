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

#include "cosup/trainer/metrics.hpp"

#include <fmt/format.h>

#include <charconv>
#include <sstream>

#include "cosup/util/errors.hpp"
#include "cosup/util/kv.hpp"

namespace cosup::trainer {

std::string format_metrics_row(const MetricsRecord& r) {
  std::string row = fmt::format("{},{},{},{},{},{},{},", r.iteration, r.loss_d,
                                r.loss_g, r.loss_c_real, r.loss_c_syn,
                                r.k_prime_fraction, r.gan_value);
  if (r.test_accuracy) row += fmt::format("{}", *r.test_accuracy);
  return row;
}

namespace {

double parse_double(const std::string& field, const std::string& line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw FormatError(fmt::format("bad metrics field '{}' in row '{}'", field, line));
  }
}

}  // namespace

MetricsRecord parse_metrics_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(kv::trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (fields.size() != 8) {
    throw FormatError(fmt::format("metrics row has {} fields: '{}'", fields.size(), line));
  }
  MetricsRecord r;
  r.iteration = static_cast<std::int64_t>(parse_double(fields[0], line));
  r.loss_d = parse_double(fields[1], line);
  r.loss_g = parse_double(fields[2], line);
  r.loss_c_real = parse_double(fields[3], line);
  r.loss_c_syn = parse_double(fields[4], line);
  r.k_prime_fraction = parse_double(fields[5], line);
  r.gan_value = parse_double(fields[6], line);
  if (!fields[7].empty()) r.test_accuracy = parse_double(fields[7], line);
  return r;
}

MetricsCsvWriter::MetricsCsvWriter(const std::filesystem::path& path) : path_(path) {
  bool fresh = true;
  if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    if (header != kMetricsHeader) {
      throw FormatError(fmt::format("'{}' is not a metrics log", path.string()));
    }
    fresh = false;
  }
  out_.open(path, std::ios::app);
  if (!out_) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  if (fresh) {
    out_ << kMetricsHeader << '\n';
    out_.flush();
  }
}

void MetricsCsvWriter::write(const MetricsRecord& record) {
  out_ << format_metrics_row(record) << '\n';
  out_.flush();
  if (!out_) throw IoError(fmt::format("write to '{}' failed", path_.string()));
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw FormatError(fmt::format("'{}' is not a metrics log", path.string()));
  }
  std::vector<MetricsRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_metrics_row(line));
  }
  return rows;
}

void truncate_metrics_csv(const std::filesystem::path& path,
                          std::int64_t last_iteration) {
  if (!std::filesystem::exists(path)) return;
  std::vector<MetricsRecord> rows = read_metrics_csv(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot rewrite '{}'", path.string()));
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    if (r.iteration <= last_iteration) out << format_metrics_row(r) << '\n';
  }
}

}  // namespace cosup::trainer
