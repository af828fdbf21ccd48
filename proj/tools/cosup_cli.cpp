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

// Command-line front end: train, sweep, report and grid.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "cosup/data/sampling.hpp"
#include "cosup/harness/experiment.hpp"
#include "cosup/harness/image_grid.hpp"
#include "cosup/harness/results.hpp"
#include "cosup/harness/runner.hpp"
#include "cosup/trainer/checkpoint.hpp"
#include "cosup/util/errors.hpp"

namespace fs = std::filesystem;
using namespace cosup;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRunFailure = 2;

struct TrainArgs {
  fs::path config;
  std::optional<std::string> method;
  std::optional<double> fraction;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
};

int cmd_train(const TrainArgs& args) {
  const auto spec = harness::parse_config(args.config);
  const auto method = args.method ? trainer::parse_method(*args.method) : spec.methods.front();
  const double fraction = args.fraction.value_or(spec.fractions.front());
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("--fraction must lie in (0, 1]");
  }
  const std::uint64_t seed = args.seed.value_or(spec.seeds.front());

  harness::RunRequest request;
  request.config = spec.config_for(method, seed);
  request.fraction = fraction;
  request.directory = args.out.value_or(
      spec.output_dir / "runs" / harness::run_directory_name(fraction, method, seed));
  request.checkpoint_every = spec.checkpoint_every;
  request.grid_per_class = spec.grid_per_class;

  const auto data = harness::load_datasets(spec.dataset, spec.base);
  const auto subset = data::subset_fraction(data.train, fraction, seed);
  const auto result = harness::run_single(request, subset, data.test);
  if (!result.accuracy) {
    fmt::print(stderr, "run failed: {}\n", result.error);
    return kRunFailure;
  }
  fmt::print("{} accuracy {}% ({})\n", request.directory.string(),
             harness::format_percent(*result.accuracy), *result.accuracy);
  return kOk;
}

int cmd_sweep(const fs::path& config, const std::optional<fs::path>& out) {
  auto spec = harness::parse_config(config);
  if (out) spec.output_dir = *out;
  const auto table = harness::run_experiment(spec);
  fmt::print("{}", harness::emit_results_table(table, harness::TableFormat::kMarkdown));
  for (const auto& r : table.runs()) {
    if (!r.accuracy) return kRunFailure;
  }
  return kOk;
}

int cmd_report(const fs::path& in, const std::string& format) {
  const auto fmt_kind = harness::parse_table_format(format);
  const fs::path runs = in / "runs.csv";
  std::ifstream file(runs);
  if (!file) throw IoError(fmt::format("cannot open '{}'", runs.string()));
  std::ostringstream text;
  text << file.rdbuf();
  fmt::print("{}", harness::emit_results_table(harness::parse_runs_csv(text.str()), fmt_kind));
  return kOk;
}

int cmd_grid(const fs::path& checkpoint, std::size_t per_class,
             const std::optional<std::uint64_t>& seed, const fs::path& out) {
  auto t = trainer::restore_trainer(trainer::load_checkpoint(checkpoint));
  harness::export_image_grid(t.networks().generator, per_class,
                             seed.value_or(t.config().master_seed), out);
  fmt::print("wrote {}\n", out.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-supervised conditional GAN training and experiment harness"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one (method, fraction, seed) run");
  train_cmd->add_option("--config", train.config, "Experiment config file")->required();
  train_cmd->add_option("--method", train.method, "sec_cgan, ec_gan or baseline");
  train_cmd->add_option("--fraction", train.fraction, "Labeled fraction in (0, 1]");
  train_cmd->add_option("--seed", train.seed, "Master seed");
  train_cmd->add_option("--out", train.out, "Run directory");

  fs::path sweep_config;
  std::optional<fs::path> sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run every fraction x method x seed");
  sweep_cmd->add_option("--config", sweep_config, "Experiment config file")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory (overrides output_dir)");

  fs::path report_in;
  std::string report_format = "markdown";
  auto* report_cmd = app.add_subcommand("report", "Render the results table of a sweep");
  report_cmd->add_option("--in", report_in, "Sweep output directory")->required();
  report_cmd->add_option("--format", report_format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));

  fs::path grid_checkpoint;
  fs::path grid_out;
  std::size_t grid_per_class = 8;
  std::optional<std::uint64_t> grid_seed;
  auto* grid_cmd = app.add_subcommand("grid", "Export a class-per-column sample grid");
  grid_cmd->add_option("--checkpoint", grid_checkpoint, "Checkpoint file")->required();
  grid_cmd->add_option("--per-class", grid_per_class, "Rows (samples per class)")
      ->check(CLI::PositiveNumber);
  grid_cmd->add_option("--seed", grid_seed, "Noise seed (default: the run's seed)");
  grid_cmd->add_option("--out", grid_out, "PNG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*sweep_cmd) return cmd_sweep(sweep_config, sweep_out);
    if (*report_cmd) return cmd_report(report_in, report_format);
    if (*grid_cmd) return cmd_grid(grid_checkpoint, grid_per_class, grid_seed, grid_out);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const ArgumentError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRunFailure;
  }
  return kUsage;
}
