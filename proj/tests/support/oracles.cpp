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

#include "oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "cosup/data/sampling.hpp"
#include "cosup/objectives/losses.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::testing {

long double oracle_bce(long double p, int target) {
  const long double eps = 1e-7L;
  if (p < eps) p = eps;
  if (p > 1.0L - eps) p = 1.0L - eps;
  return target == 1 ? -std::log(p) : -std::log(1.0L - p);
}

long double oracle_ce(std::span<const double> logits, int label) {
  long double peak = logits[0];
  for (double v : logits) peak = std::max<long double>(peak, v);
  long double total = 0.0L;
  for (double v : logits) total += std::exp(static_cast<long double>(v) - peak);
  const long double p_label =
      std::exp(static_cast<long double>(logits[static_cast<std::size_t>(label)]) - peak) / total;
  return -std::log(p_label);
}

namespace {

double confidence(RngStream& rng) {
  const double u = rng.uniform();
  if (u < 0.05) return 1e-9 * rng.uniform();          // below the clamp
  if (u < 0.10) return 1.0 - 1e-9 * rng.uniform();    // above the clamp
  return rng.uniform(1e-6, 1.0 - 1e-6);
}

void track(LossOracleReport& r, const char* what, double got, long double want) {
  const double dev = std::abs(static_cast<double>(static_cast<long double>(got) - want));
  if (dev > r.max_abs_deviation) {
    r.max_abs_deviation = dev;
    r.worst = fmt::format("{}: {} vs {}", what, got, static_cast<double>(want));
  }
}

long double mean_of(const std::vector<long double>& v) {
  long double s = 0.0L;
  for (auto x : v) s += x;
  return s / static_cast<long double>(v.size());
}

}  // namespace

LossOracleReport compare_losses_with_oracle(std::size_t batches, std::uint64_t seed) {
  RngStream rng(seed, "loss-oracle");
  LossOracleReport report;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t m = 1 + rng.uniform_index(64);
    const std::size_t k = 1 + rng.uniform_index(64);
    const std::size_t classes = 2 + rng.uniform_index(9);
    const double lambda = rng.uniform();
    const double beta = rng.uniform(0.0, 1.1);
    const double scale = rng.uniform(0.1, 8.0);

    std::vector<double> real(m), fake(k);
    for (auto& c : real) c = confidence(rng);
    for (auto& c : fake) c = confidence(rng);
    Tensor<double> logits_real({m, classes}), logits_fake({k, classes});
    for (auto& v : logits_real.values()) v = scale * rng.normal();
    for (auto& v : logits_fake.values()) v = scale * rng.normal();
    std::vector<int> labels_real(m), labels_fake(k);
    for (auto& l : labels_real) l = static_cast<int>(rng.uniform_index(classes));
    for (auto& l : labels_fake) l = static_cast<int>(rng.uniform_index(classes));

    // Oracle.
    std::vector<long double> bce_real1, bce_fake0, bce_fake1, ce_real, ce_syn;
    for (double c : real) bce_real1.push_back(oracle_bce(c, 1));
    for (double c : fake) bce_fake0.push_back(oracle_bce(c, 0));
    for (double c : fake) bce_fake1.push_back(oracle_bce(c, 1));
    for (std::size_t i = 0; i < m; ++i) {
      ce_real.push_back(oracle_ce(logits_real.slice(i), labels_real[i]));
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (fake[i] >= beta) ce_syn.push_back(oracle_ce(logits_fake.slice(i), labels_fake[i]));
    }
    const long double want_d = mean_of(bce_real1) + mean_of(bce_fake0);
    const long double want_g = mean_of(bce_fake1);
    const long double want_c =
        mean_of(ce_real) + (ce_syn.empty() ? 0.0L : lambda * mean_of(ce_syn));

    // Library.
    const std::span<const double> rs(real), fs(fake);
    track(report, "bce_mean", objectives::bce_mean(rs, 1), mean_of(bce_real1));
    track(report, "ce_mean", objectives::ce_mean(logits_real, labels_real), mean_of(ce_real));
    track(report, "discriminator_loss", objectives::discriminator_loss(rs, fs), want_d);
    track(report, "generator_loss", objectives::generator_loss(fs), want_g);
    track(report, "gan_value_diagnostic", objectives::gan_value_diagnostic(rs, fs), -want_d);

    objectives::SyntheticBatch<double> syn;
    syn.images = logits_fake;  // rows stand in for images; only the subset matters
    syn.labels = labels_fake;
    syn.confidences = fake;
    const auto kept = objectives::filter_qualified(syn, beta);
    Tensor<double> kept_logits = kept.size() > 0 ? kept.images : Tensor<double>({0, classes});
    const auto [total, parts] = objectives::classifier_loss(logits_real, labels_real,
                                                            kept_logits, kept.labels, lambda);
    track(report, "classifier_loss", total, want_c);
    if (parts.k_prime != ce_syn.size()) {
      report.max_abs_deviation = std::numeric_limits<double>::infinity();
      report.worst = "classifier_loss: k' disagrees with the oracle";
    }
    ++report.batches;
  }
  return report;
}

FilterOracleReport compare_filter_with_brute_force(std::size_t cases, std::uint64_t seed) {
  RngStream rng(seed, "filter-oracle");
  FilterOracleReport report;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t k = rng.uniform_index(40);  // empty batches included
    const bool grid = rng.uniform() < 0.5;
    auto draw = [&] {
      return grid ? static_cast<double>(rng.uniform_index(11)) / 10.0 : rng.uniform();
    };
    std::vector<double> conf(k);
    for (auto& v : conf) v = draw();
    double beta = draw();
    if (rng.uniform() < 0.1) beta = 1.0 + rng.uniform();  // beyond 1: nothing qualifies

    objectives::SyntheticBatch<double> batch;
    batch.images = Tensor<double>({k, 1});
    for (std::size_t i = 0; i < k; ++i) batch.images[i] = static_cast<double>(i);
    batch.labels.resize(k);
    for (std::size_t i = 0; i < k; ++i) batch.labels[i] = static_cast<int>(i % 7);
    batch.confidences = conf;
    const auto got = objectives::filter_qualified(batch, beta);

    // Brute force: test every index on its own, keep original order.
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < k; ++i) {
      if (!(conf[i] < beta)) want.push_back(i);
    }
    bool same = got.size() == want.size() && got.confidences.size() == want.size();
    for (std::size_t j = 0; same && j < want.size(); ++j) {
      same = got.images[j] == static_cast<double>(want[j]) &&
             got.labels[j] == batch.labels[want[j]] && got.confidences[j] == conf[want[j]];
    }
    if (!same) ++report.mismatches;
    ++report.cases;
  }
  return report;
}

BalanceReport check_noise_label_balance(std::size_t cases, std::uint64_t seed) {
  RngStream rng(seed, "balance-oracle");
  RngStream noise(seed, "noise");
  BalanceReport report;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t k = 1 + rng.uniform_index(200);
    const int classes = 1 + static_cast<int>(rng.uniform_index(20));
    const auto batch = data::sample_noise_labels<float>(k, classes, 2, noise);
    std::vector<std::size_t> count(static_cast<std::size_t>(classes), 0);
    for (int l : batch.labels) ++count.at(static_cast<std::size_t>(l));
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    if (*hi - *lo > 1 || batch.labels.size() != k) ++report.violations;
    ++report.cases;
  }
  return report;
}

SamplerFrequencyReport weighted_sampling_frequencies(std::size_t draws, std::uint64_t seed) {
  // 900 images of class 0 and 100 of class 1, 4x4 single channel.
  data::Dataset d;
  d.num_classes = 2;
  d.images = Tensor<float>({1000, 1, 4, 4}, 0.5f);
  for (std::size_t i = 0; i < 1000; ++i) d.labels.push_back(i < 900 ? 0 : 1);
  d.class_counts = {900, 100};
  d.class_names = {"0", "1"};

  const data::WeightedBatchSampler sampler(d, data::compute_class_weights(d), {});
  RngStream sampling(seed, "real-sampling");
  RngStream augmentation(seed, "augmentation");
  std::vector<std::size_t> count(2, 0);
  std::size_t drawn = 0;
  while (drawn < draws) {
    const std::size_t m = std::min<std::size_t>(64, draws - drawn);
    const auto batch = sampler.sample<float>(m, sampling, augmentation);
    for (int l : batch.labels) ++count[static_cast<std::size_t>(l)];
    drawn += m;
  }
  SamplerFrequencyReport report;
  report.draws = drawn;
  for (std::size_t c = 0; c < 2; ++c) {
    const double share = static_cast<double>(count[c]) / static_cast<double>(drawn);
    report.class_share.push_back(share);
    report.max_deviation = std::max(report.max_deviation, std::abs(share - 0.5));
  }
  return report;
}

}  // namespace cosup::testing
