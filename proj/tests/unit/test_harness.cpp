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

#include <doctest.h>

#include <opencv2/imgcodecs.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cosup/harness/experiment.hpp"
#include "cosup/harness/image_grid.hpp"
#include "cosup/harness/results.hpp"
#include "cosup/harness/runner.hpp"
#include "cosup/util/errors.hpp"
#include "trainer_checks.hpp"

using namespace cosup;
using namespace cosup::harness;
using trainer::Method;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cosup_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string data_lines() {
  const fs::path root = fs::path(COSUP_DATA_DIR) / "digits32";
  return "dataset = digits32\n"
         "train_images = " + (root / "train-images-idx3-ubyte.gz").string() + "\n" +
         "train_labels = " + (root / "train-labels-idx1-ubyte.gz").string() + "\n" +
         "test_images = " + (root / "test-images-idx3-ubyte.gz").string() + "\n" +
         "test_labels = " + (root / "test-labels-idx1-ubyte.gz").string() + "\n";
}

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text, "test.cfg", ".");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ResultsTable sample_table() {
  ResultsTable t;
  t.add({0.05, Method::kBaseline, 1, 0.871, {}});
  t.add({0.05, Method::kBaseline, 2, 0.8804, {}});
  t.add({0.05, Method::kBaseline, 3, 0.8652, {}});
  t.add({0.05, Method::kSecCgan, 1, 0.9026, {}});
  t.add({0.05, Method::kSecCgan, 2, std::nullopt, "diverged"});
  t.add({0.05, Method::kSecCgan, 3, 0.8999, {}});
  t.add({0.25, Method::kBaseline, 1, 0.95, {}});
  t.add({0.25, Method::kSecCgan, 1, std::nullopt, "io"});
  return t;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto spec = parse_config_text(
      data_lines() + "fractions = 0.05\nmethods = sec_cgan\nseeds = 1\n", "test.cfg", "/tmp/x");
  CHECK(spec.fractions == std::vector<double>{0.05});
  CHECK(spec.methods == std::vector<Method>{Method::kSecCgan});
  CHECK(spec.seeds == std::vector<std::uint64_t>{1});
  CHECK(spec.base.lambda == 0.6);
  CHECK(spec.base.beta == 0.7);
  CHECK(spec.base.batch_size == 64);
  CHECK(spec.base.lr_g == 2e-4);
  CHECK(spec.base.lr_d == 2e-4);
  CHECK(spec.base.lr_c == 2e-4);
  CHECK(spec.base.net.image_size == 32);
  CHECK(spec.output_dir == fs::path("/tmp/x") / "out");
  const auto run = spec.config_for(Method::kSecCgan, 7);
  CHECK(run.master_seed == 7);
  CHECK(run.method == Method::kSecCgan);
}

TEST_CASE("weather defaults use a slower discriminator") {
  const auto c = profile_defaults(Profile::kWeather128);
  CHECK(c.net.image_size == 128);
  CHECK(c.net.num_classes == 4);
  CHECK(c.lr_d < c.lr_g);
}

TEST_CASE("config errors") {
  const std::string base = data_lines();
  CHECK(config_error(base + "fractions = 0.10, 0.05\nmethods = baseline\nseeds = 1\n")
            .find("fractions") != std::string::npos);
  const auto typo = config_error(base + "fractions = 0.05\nmethods = baseline\nseeds = 1\nlamda = 0.5\n");
  CHECK(typo.find("lamda") != std::string::npos);
  CHECK(typo.find("did you mean 'lambda'") != std::string::npos);
  CHECK(typo.find("test.cfg:9") != std::string::npos);
  CHECK(!config_error(base + "methods = baseline\nseeds = 1\n").empty());
  CHECK(!config_error(base + "fractions = 0.05\nmethods = gan\nseeds = 1\n").empty());
  CHECK(!config_error(base + "fractions = 0.05\nmethods = baseline\nseeds = 1\nlambda = x\n").empty());
  CHECK(!config_error(base + "fractions = 0.05\nmethods = baseline\nseeds = 1\nmaster_seed = 3\n").empty());
  CHECK(!config_error(base + "fractions = 1.5\nmethods = baseline\nseeds = 1\n").empty());
  CHECK(!config_error("dataset = digits32\nfractions = 0.05\nmethods = baseline\nseeds = 1\n").empty());
}

TEST_CASE("per-method overrides") {
  const auto spec = parse_config_text(
      data_lines() +
          "fractions = 0.05\nmethods = baseline, ec_gan\nseeds = 1\nlambda = 0.5\n"
          "ec_gan.lambda = 0.2\nec_gan.pseudo_label_threshold = 0.9\n",
      "test.cfg", ".");
  CHECK(spec.config_for(Method::kBaseline, 1).lambda == 0.5);
  CHECK(spec.config_for(Method::kEcGan, 1).lambda == 0.2);
  CHECK(spec.config_for(Method::kEcGan, 1).pseudo_label_threshold == 0.9);
}

TEST_CASE("percent formatting") {
  CHECK(format_percent(0.9026) == "90.3");
  CHECK(format_percent(0.87249) == "87.2");
  CHECK(format_percent(1.0) == "100.0");
  ResultsTable t;
  t.add({0.05, Method::kSecCgan, 1, 0.9026, {}});
  const std::string md = emit_results_table(t, TableFormat::kMarkdown);
  CHECK(md.find("90.3±0.0") != std::string::npos);
}

TEST_CASE("aggregates") {
  const ResultsTable t = sample_table();
  CHECK(t.fractions() == std::vector<double>{0.05, 0.25});
  CHECK(t.methods() == std::vector<Method>{Method::kBaseline, Method::kSecCgan});
  const auto base = t.aggregate(0.05, Method::kBaseline);
  REQUIRE(base.has_value());
  const double mean = (0.871 + 0.8804 + 0.8652) / 3.0;
  const double var = ((0.871 - mean) * (0.871 - mean) + (0.8804 - mean) * (0.8804 - mean) +
                      (0.8652 - mean) * (0.8652 - mean)) / 2.0;
  CHECK(std::fabs(base->mean - mean) <= 1e-12);
  CHECK(std::fabs(base->stddev - std::sqrt(var)) <= 1e-12);
  CHECK(base->runs == 3);
  const auto sec = t.aggregate(0.05, Method::kSecCgan);
  CHECK(sec->runs == 2);
  CHECK(sec->failed == 1);
  const auto lone = t.aggregate(0.25, Method::kBaseline);
  CHECK(lone->stddev == 0.0);
  CHECK(t.aggregate(0.25, Method::kSecCgan)->runs == 0);
  CHECK(!t.aggregate(0.5, Method::kSecCgan).has_value());

  ResultsTable bad;
  CHECK_THROWS_AS(bad.add({0.05, Method::kBaseline, 1, 1.5, {}}), ArgumentError);
  bad.add({0.05, Method::kBaseline, 1, 0.5, {}});
  CHECK_THROWS_AS(bad.add({0.05, Method::kBaseline, 1, 0.6, {}}), ArgumentError);
}

TEST_CASE("rendered tables re-parse to the same values") {
  const ResultsTable t = sample_table();
  for (TableFormat f : {TableFormat::kMarkdown, TableFormat::kCsv}) {
    const auto cells = parse_rendered_table(emit_results_table(t, f), f);
    REQUIRE(cells.size() == 4);
    for (const auto& cell : cells) {
      const Method m = trainer::parse_method(cell.method);
      const auto agg = t.aggregate(cell.fraction_percent / 100.0, m);
      REQUIRE(agg.has_value());
      if (agg->runs == 0) {
        CHECK(!cell.mean_percent.has_value());
        continue;
      }
      REQUIRE(cell.mean_percent.has_value());
      CHECK(format_percent(agg->mean) == format_percent(*cell.mean_percent / 100.0));
      CHECK(format_percent(agg->stddev) == format_percent(*cell.std_percent / 100.0));
    }
  }
  const std::string md = emit_results_table(t, TableFormat::kMarkdown);
  CHECK(md.find("(1 failed)") != std::string::npos);
  CHECK(md.find("| failed") != std::string::npos);
  CHECK(parse_table_format("csv") == TableFormat::kCsv);
  CHECK_THROWS(parse_table_format("html"));
}

TEST_CASE("runs csv round-trips") {
  const ResultsTable t = sample_table();
  const ResultsTable back = parse_runs_csv(emit_runs_csv(t));
  CHECK(back == t);
  CHECK_THROWS(parse_runs_csv("fraction,method\n0.05,baseline\n"));
}

TEST_CASE("image grid") {
  models::NetConfig cfg;
  RngStream rng(1, "init");
  auto nets = models::init_networks<float>(cfg, rng);
  const auto grid = render_image_grid(nets.generator, 8, 3);
  CHECK(grid.shape() == Shape{256, 320, 1});
  const auto dir = scratch_dir("grid");
  export_image_grid(nets.generator, 8, 3, dir / "a.png");
  export_image_grid(nets.generator, 8, 3, dir / "b.png");
  const auto a = cosup::testing::read_text(dir / "a.png");
  CHECK(!a.empty());
  CHECK(a == cosup::testing::read_text(dir / "b.png"));
  const cv::Mat img = cv::imread((dir / "a.png").string(), cv::IMREAD_UNCHANGED);
  CHECK(img.cols == 320);
  CHECK(img.rows == 256);
  CHECK(img.channels() == 1);
  CHECK(img.at<unsigned char>(0, 0) == grid[0]);
  CHECK_THROWS_AS(export_image_grid(nets.generator, 8, 3, dir / "no" / "such" / "x.png"), IoError);

  models::NetConfig rgb = cfg;
  rgb.image_size = 64;
  rgb.channels = 3;
  rgb.num_classes = 4;
  rgb.base_width = 2;
  models::Generator<float> g(rgb);
  CHECK(render_image_grid(g, 2, 1).shape() == Shape{128, 256, 3});
}

TEST_CASE("a small sweep is complete, deterministic and resumable") {
  const auto dir = scratch_dir("sweep");
  const std::string text = data_lines() +
      "fractions = 0.01, 0.02\nmethods = baseline, sec_cgan\nseeds = 1, 2\n"
      "iterations = 4\neval_every = 0\ncheckpoint_every = 2\ngrid_per_class = 2\n"
      "batch_size = 8\nsynthetic_batch_size = 8\nbase_width = 4\nz_dim = 8\n"
      "classifier_width = 4\noutput_dir = out\n";
  auto spec = parse_config_text(text, "sweep.cfg", dir);
  CHECK(spec.output_dir == dir / "out");
  const ResultsTable first = run_experiment(spec);
  CHECK(first.runs().size() == 8);
  for (const auto& r : first.runs()) {
    INFO(r.error);
    CHECK(r.accuracy.has_value());
  }
  CHECK(first.aggregates().size() == 4);
  for (const char* f : {"results.md", "results.csv", "runs.csv"}) CHECK(fs::exists(dir / "out" / f));
  const fs::path sec = dir / "out" / "runs" / run_directory_name(0.01, Method::kSecCgan, 1);
  CHECK(fs::exists(sec / "grid.png"));
  CHECK(fs::exists(sec / "metrics.csv"));
  CHECK(!fs::exists(dir / "out" / "runs" / run_directory_name(0.01, Method::kBaseline, 1) / "grid.png"));
  CHECK(parse_runs_csv(cosup::testing::read_text(dir / "out" / "runs.csv")) == first);

  // Drop one result so that it is recomputed from its final checkpoint,
  // wipe another run completely: the table must not change.
  fs::remove(sec / "result.txt");
  fs::remove_all(dir / "out" / "runs" / run_directory_name(0.02, Method::kBaseline, 2));
  const std::string metrics_before = cosup::testing::read_text(sec / "metrics.csv");
  const ResultsTable second = run_experiment(spec);
  CHECK(second == first);
  CHECK(cosup::testing::read_text(sec / "metrics.csv") == metrics_before);

  // A run directory holding a different configuration fails on its own.
  std::ofstream(dir / "out" / "runs" / run_directory_name(0.02, Method::kSecCgan, 1) / "config.txt")
      << "lambda = 0.1\n";
  fs::remove(dir / "out" / "runs" / run_directory_name(0.02, Method::kSecCgan, 1) / "result.txt");
  const ResultsTable third = run_experiment(spec);
  std::size_t failed = 0;
  for (const auto& r : third.runs()) failed += r.accuracy ? 0 : 1;
  CHECK(failed == 1);
  CHECK(third.runs().size() == 8);
}
