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

#include <functional>
#include <span>
#include <vector>

#include "cosup/data/dataset.hpp"
#include "cosup/data/sampling.hpp"
#include "cosup/models/networks.hpp"
#include "cosup/trainer/adam.hpp"
#include "cosup/trainer/metrics.hpp"
#include "cosup/trainer/train_config.hpp"
#include "cosup/util/errors.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::trainer {

// Raised when a loss turns non-finite; carries the iteration's diagnostics.
// Parameters are left as they were before the failing update.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, MetricsRecord record)
      : Error(what), record_(record) {}
  const MetricsRecord& record() const { return record_; }

 private:
  MetricsRecord record_;
};

// The named streams of one run, all derived from the master seed.
struct RngStreams {
  RngStream init;
  RngStream real_sampling;
  RngStream noise;
  RngStream augmentation;

  explicit RngStreams(std::uint64_t master_seed)
      : init(master_seed, "init"),
        real_sampling(master_seed, "real-sampling"),
        noise(master_seed, "noise"),
        augmentation(master_seed, "augmentation") {}
  friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

// Co-supervised trainer. A sec_cgan iteration performs, in order:
//   1. discriminator step on a real batch (target real),
//   2. discriminator step on a generated batch (target fake),
//   3. generator step through the discriminator (target real),
//   4. classifier step on the real batch,
//   5. classifier step, weighted by lambda, on the generated samples whose
//      discriminator confidence from step 3 is at least beta.
// Step 5 is skipped when no sample qualifies or lambda is 0, which makes
// lambda = 0 identical to the classifier-only baseline. ec_gan replaces
// the filter of step 5 by pseudo-labels from the classifier and trains an
// unconditional GAN (every label is 0).
template <typename T>
class Trainer {
 public:
  // Fresh networks initialized from the "init" stream of the master seed.
  explicit Trainer(const TrainConfig& config);

  MetricsRecord step_sec_cgan(const data::LabeledBatch<T>& real,
                              const data::NoiseLabelBatch<T>& noise);
  MetricsRecord step_ec_gan(const data::LabeledBatch<T>& real,
                            const data::NoiseLabelBatch<T>& noise);
  MetricsRecord step_baseline(const data::LabeledBatch<T>& real);

  // Draws the batches the configured method needs from this trainer's
  // streams and runs one iteration.
  MetricsRecord step(const data::WeightedBatchSampler& sampler);

  // The individual updates. Each touches only its own network's
  // parameters and optimizer state. `confidences`, when given, receives
  // the discriminator's probabilities of the batch.
  double update_discriminator(const Tensor<T>& images, std::span<const int> labels,
                              int target, std::vector<T>* confidences);
  // Generator forward in train mode; its cache feeds update_generator.
  Tensor<T> generate(const Tensor<T>& z, std::span<const int> labels);
  double update_generator(const Tensor<T>& generated, std::span<const int> labels,
                          std::vector<T>* confidences);
  // Mean cross-entropy step with the gradient scaled by `weight`; returns
  // the unweighted loss.
  double update_classifier(const Tensor<T>& images, std::span<const int> labels,
                           double weight);

  const TrainConfig& config() const { return config_; }
  models::Networks<T>& networks() { return nets_; }
  const models::Networks<T>& networks() const { return nets_; }
  AdamState<T>& optimizer_g() { return opt_g_; }
  AdamState<T>& optimizer_d() { return opt_d_; }
  AdamState<T>& optimizer_c() { return opt_c_; }
  RngStreams& streams() { return streams_; }
  std::int64_t iteration() const { return iteration_; }
  void set_iteration(std::int64_t it) { iteration_ = it; }

 private:
  void check_finite(double loss, const char* what, const MetricsRecord& record) const;

  TrainConfig config_;
  RngStreams streams_;
  models::Networks<T> nets_;
  AdamState<T> opt_g_;
  AdamState<T> opt_d_;
  AdamState<T> opt_c_;
  std::int64_t iteration_ = 0;
  MetricsRecord pending_;
};

// Accuracy of argmax predictions over `test`, in eval mode, in chunks.
template <typename T>
double evaluate(models::Classifier<T>& classifier, const data::Dataset& test,
                std::size_t chunk = 250);

// Same, for any function mapping a normalized (n, C, H, W) batch to (n, K)
// logits.
double evaluate_with(
    const std::function<Tensor<float>(const Tensor<float>&)>& predict_logits,
    const data::Dataset& test, std::size_t chunk = 250);

template <typename T>
struct TrainHooks {
  std::function<void(const MetricsRecord&)> on_record;
  // Called after every iteration (and its evaluation, if any).
  std::function<void(Trainer<T>&)> on_step;
};

// Runs the trainer from its current iteration up to config().iterations,
// evaluating on `test` every eval_every iterations and at the last one.
// Records are appended to `history` as they are produced, so a failure
// leaves the partial history in place.
template <typename T>
void run_training(Trainer<T>& trainer, const data::Dataset& train_set,
                  const data::Dataset& test_set, std::vector<MetricsRecord>& history,
                  const TrainHooks<T>& hooks = {});

}  // namespace cosup::trainer
