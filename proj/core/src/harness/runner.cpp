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

#include "cosup/harness/runner.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "cosup/data/sampling.hpp"
#include "cosup/harness/image_grid.hpp"
#include "cosup/trainer/checkpoint.hpp"
#include "cosup/trainer/trainer.hpp"
#include "cosup/util/errors.hpp"

namespace cosup::harness {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
}

// result.txt holds either "accuracy = <value>" or "error = <message>".
std::optional<double> finished_accuracy(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  for (const auto& e : kv::parse(read_file(path), path.string())) {
    if (e.key == "accuracy") return kv::to_double(e);
  }
  return std::nullopt;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == '#') c = ' ';
  }
  return s;
}

}  // namespace

std::string run_directory_name(double fraction, trainer::Method method, std::uint64_t seed) {
  return fmt::format("f{:g}_{}_s{}", fraction, trainer::method_name(method), seed);
}

RunResult run_single(const RunRequest& request, const data::Dataset& train_subset,
                     const data::Dataset& test) {
  const trainer::TrainConfig& config = request.config;
  RunResult result{request.fraction, config.method, config.master_seed, std::nullopt, {}};
  const fs::path dir = request.directory;
  const fs::path result_path = dir / "result.txt";
  try {
    fs::create_directories(dir);
    if (auto acc = finished_accuracy(result_path)) {
      result.accuracy = *acc;
      return result;
    }
    const std::string config_text = config.to_text();
    const fs::path config_path = dir / "config.txt";
    if (fs::exists(config_path) && read_file(config_path) != config_text) {
      throw ConsistencyError(fmt::format(
          "'{}' holds a run with a different configuration", dir.string()));
    }
    write_file(config_path, config_text);

    const fs::path checkpoint_path = dir / "checkpoint.bin";
    std::unique_ptr<trainer::Trainer<float>> trainer;
    if (fs::exists(checkpoint_path)) {
      trainer = std::make_unique<trainer::Trainer<float>>(
          trainer::restore_trainer(trainer::load_checkpoint(checkpoint_path)));
      if (!(trainer->config() == config)) {
        throw ConsistencyError("checkpoint configuration does not match the run");
      }
      spdlog::info("{}: resuming at iteration {}", dir.filename().string(),
                   trainer->iteration());
    } else {
      trainer = std::make_unique<trainer::Trainer<float>>(config);
    }

    const fs::path metrics_path = dir / "metrics.csv";
    trainer::truncate_metrics_csv(metrics_path, trainer->iteration());
    trainer::MetricsCsvWriter writer(metrics_path);
    trainer::TrainHooks<float> hooks;
    hooks.on_record = [&writer](const trainer::MetricsRecord& r) { writer.write(r); };
    hooks.on_step = [&](trainer::Trainer<float>& t) {
      if (request.checkpoint_every > 0 && t.iteration() % request.checkpoint_every == 0 &&
          t.iteration() < config.iterations) {
        trainer::save_checkpoint(checkpoint_path, trainer::make_bundle(t));
      }
    };
    std::vector<trainer::MetricsRecord> history;
    try {
      trainer::run_training(*trainer, train_subset, test, history, hooks);
    } catch (const trainer::TrainingDiverged& e) {
      writer.write(e.record());
      throw;
    }
    trainer::save_checkpoint(checkpoint_path, trainer::make_bundle(*trainer));

    double accuracy = 0.0;
    if (!history.empty() && history.back().test_accuracy) {
      accuracy = *history.back().test_accuracy;
    } else {
      accuracy = trainer::evaluate(trainer->networks().classifier, test);
    }
    if (request.grid_per_class > 0 && config.method != trainer::Method::kBaseline) {
      export_image_grid(trainer->networks().generator, request.grid_per_class,
                        config.master_seed, dir / "grid.png");
    }
    write_file(result_path, fmt::format("accuracy = {}\n", accuracy));
    result.accuracy = accuracy;
  } catch (const std::exception& e) {
    result.error = e.what();
    spdlog::error("{}: {}", dir.string(), result.error);
    try {
      fs::create_directories(dir);
      write_file(result_path, fmt::format("error = {}\n", one_line(result.error)));
    } catch (const std::exception&) {
    }
  }
  return result;
}

ResultsTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const LoadedData data = load_datasets(spec.dataset, spec.base);
  fs::create_directories(spec.output_dir / "runs");
  ResultsTable table;
  for (double fraction : spec.fractions) {
    for (std::uint64_t seed : spec.seeds) {
      const data::Dataset subset = data::subset_fraction(data.train, fraction, seed);
      for (auto method : spec.methods) {
        RunRequest request;
        request.config = spec.config_for(method, seed);
        request.fraction = fraction;
        request.directory = spec.output_dir / "runs" / run_directory_name(fraction, method, seed);
        request.checkpoint_every = spec.checkpoint_every;
        request.grid_per_class = spec.grid_per_class;
        spdlog::info("run {} ({} labeled images)", request.directory.filename().string(),
                     subset.size());
        table.add(run_single(request, subset, data.test));
      }
    }
  }
  write_file(spec.output_dir / "runs.csv", emit_runs_csv(table));
  write_file(spec.output_dir / "results.md", emit_results_table(table, TableFormat::kMarkdown));
  write_file(spec.output_dir / "results.csv", emit_results_table(table, TableFormat::kCsv));
  return table;
}

}  // namespace cosup::harness
