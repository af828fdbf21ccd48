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
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace cosup::trainer {

// Diagnostics of one training iteration. Fields a method does not produce
// are 0; test_accuracy is set only on evaluation iterations.
struct MetricsRecord {
  std::int64_t iteration = 0;
  double loss_d = 0.0;
  double loss_g = 0.0;
  double loss_c_real = 0.0;
  double loss_c_syn = 0.0;
  double k_prime_fraction = 0.0;
  double gan_value = 0.0;
  std::optional<double> test_accuracy;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

inline constexpr const char* kMetricsHeader =
    "iter,loss_d,loss_g,loss_c_real,loss_c_syn,k_prime_frac,gan_value,test_acc";

std::string format_metrics_row(const MetricsRecord& record);
MetricsRecord parse_metrics_row(const std::string& line);

// Append-only CSV sink. Opening an existing file keeps its rows (and checks
// the header); a new file gets the header first. Rows are flushed per write.
class MetricsCsvWriter {
 public:
  explicit MetricsCsvWriter(const std::filesystem::path& path);
  void write(const MetricsRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

// Rewrites the file keeping only rows with iteration <= `last_iteration`;
// used when resuming from a checkpoint older than the log.
void truncate_metrics_csv(const std::filesystem::path& path,
                          std::int64_t last_iteration);

}  // namespace cosup::trainer
