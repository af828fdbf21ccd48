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

#include "cosup/trainer/trainer.hpp"

#include <fmt/format.h>

#include <cmath>

#include "cosup/nn/functional.hpp"
#include "cosup/objectives/losses.hpp"

namespace cosup::trainer {

namespace {

const TrainConfig& validated(const TrainConfig& c) {
  c.validate();
  return c;
}

AdamHyper hyper(const TrainConfig& c, double lr) {
  return AdamHyper{lr, c.adam_beta1, c.adam_beta2, c.adam_eps};
}

template <typename T>
std::vector<T> probabilities(const Tensor<T>& logits) {
  std::vector<T> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = nn::sigmoid(logits[i]);
  return p;
}

template <typename T>
void check_batch(const data::LabeledBatch<T>& b, const char* who) {
  if (b.images.rank() != 4 || b.images.dim(0) != b.labels.size() || b.labels.empty()) {
    throw ArgumentError(fmt::format("{}: malformed labeled batch", who));
  }
}

template <typename T>
void check_noise(const data::NoiseLabelBatch<T>& b, const models::NetConfig& net,
                 const char* who) {
  if (b.z.rank() != 2 || b.z.dim(0) != b.labels.size() || b.z.dim(1) != net.z_dim ||
      b.labels.empty()) {
    throw ArgumentError(fmt::format("{}: malformed noise batch", who));
  }
}

}  // namespace

template <typename T>
Trainer<T>::Trainer(const TrainConfig& config)
    : config_(validated(config)),
      streams_(config.master_seed),
      nets_(models::init_networks<T>(config_.net, streams_.init)),
      opt_g_(nets_.generator.parameters()),
      opt_d_(nets_.discriminator.parameters()),
      opt_c_(nets_.classifier.parameters()) {}

template <typename T>
void Trainer<T>::check_finite(double loss, const char* what,
                              const MetricsRecord& record) const {
  if (!std::isfinite(loss)) {
    throw TrainingDiverged(
        fmt::format("iteration {}: {} is not finite", record.iteration, what), record);
  }
}

template <typename T>
double Trainer<T>::update_discriminator(const Tensor<T>& images,
                                        std::span<const int> labels, int target,
                                        std::vector<T>* confidences) {
  auto& d = nets_.discriminator;
  d.zero_grad();
  const Tensor<T> logits = d.forward_logits(images, labels, nn::Mode::kTrain);
  Tensor<T> grad(logits.shape());
  const double loss = objectives::bce_with_logits_mean(
      std::span<const T>(logits.values()), target, T{1}, std::span<T>(grad.values()));
  if (confidences != nullptr) *confidences = probabilities(logits);
  check_finite(loss, "discriminator loss", pending_);
  d.backward(grad, nn::Backprop{true, false});
  adam_step(d.parameters(), opt_d_, hyper(config_, config_.lr_d));
  return loss;
}

template <typename T>
Tensor<T> Trainer<T>::generate(const Tensor<T>& z, std::span<const int> labels) {
  return nets_.generator.forward(z, labels, nn::Mode::kTrain);
}

template <typename T>
double Trainer<T>::update_generator(const Tensor<T>& generated,
                                    std::span<const int> labels,
                                    std::vector<T>* confidences) {
  auto& g = nets_.generator;
  auto& d = nets_.discriminator;
  g.zero_grad();
  const Tensor<T> logits = d.forward_logits(generated, labels, nn::Mode::kTrain);
  Tensor<T> grad(logits.shape());
  const double loss = objectives::bce_with_logits_mean(
      std::span<const T>(logits.values()), 1, T{1}, std::span<T>(grad.values()));
  if (confidences != nullptr) *confidences = probabilities(logits);
  check_finite(loss, "generator loss", pending_);
  const Tensor<T> grad_images = d.backward(grad, nn::Backprop{false, true});
  g.backward(grad_images);
  adam_step(g.parameters(), opt_g_, hyper(config_, config_.lr_g));
  return loss;
}

template <typename T>
double Trainer<T>::update_classifier(const Tensor<T>& images,
                                     std::span<const int> labels, double weight) {
  auto& c = nets_.classifier;
  c.zero_grad();
  const Tensor<T> logits = c.forward(images, nn::Mode::kTrain);
  Tensor<T> grad;
  const double loss =
      objectives::ce_mean_with_grad(logits, labels, static_cast<T>(weight), &grad);
  check_finite(loss, "classifier loss", pending_);
  c.backward(grad, nn::Backprop{true, false});
  adam_step(c.parameters(), opt_c_, hyper(config_, config_.lr_c));
  return loss;
}

template <typename T>
MetricsRecord Trainer<T>::step_sec_cgan(const data::LabeledBatch<T>& real,
                                        const data::NoiseLabelBatch<T>& noise) {
  check_batch(real, "step_sec_cgan");
  check_noise(noise, config_.net, "step_sec_cgan");
  pending_ = MetricsRecord{};
  pending_.iteration = iteration_ + 1;

  std::vector<T> conf_real, conf_fake, conf_syn;
  const double loss_real = update_discriminator(real.images, real.labels, 1, &conf_real);
  Tensor<T> fake = generate(noise.z, noise.labels);
  const double loss_fake = update_discriminator(fake, noise.labels, 0, &conf_fake);
  pending_.loss_d = loss_real + loss_fake;
  pending_.gan_value = objectives::gan_value_diagnostic(
      std::span<const T>(conf_real), std::span<const T>(conf_fake));
  pending_.loss_g = update_generator(fake, noise.labels, &conf_syn);

  pending_.loss_c_real = update_classifier(real.images, real.labels, 1.0);

  std::vector<int> syn_labels = noise.labels;
  if (config_.regenerate_synthetic) {
    const auto fresh = data::sample_noise_labels<T>(
        config_.synthetic_batch_size, config_.net.num_classes, config_.net.z_dim,
        streams_.noise);
    fake = generate(fresh.z, fresh.labels);
    conf_syn = probabilities(
        nets_.discriminator.forward_logits(fake, fresh.labels, nn::Mode::kTrain));
    syn_labels = fresh.labels;
  }
  const auto keep = objectives::qualified_indices(std::span<const T>(conf_syn),
                                                  config_.beta);
  pending_.k_prime_fraction =
      static_cast<double>(keep.size()) / static_cast<double>(conf_syn.size());
  if (!keep.empty() && config_.lambda > 0.0) {
    std::vector<int> kept_labels;
    kept_labels.reserve(keep.size());
    for (std::size_t i : keep) kept_labels.push_back(syn_labels[i]);
    pending_.loss_c_syn =
        update_classifier(gather_rows(fake, keep), kept_labels, config_.lambda);
  }
  iteration_ = pending_.iteration;
  return pending_;
}

template <typename T>
MetricsRecord Trainer<T>::step_ec_gan(const data::LabeledBatch<T>& real,
                                      const data::NoiseLabelBatch<T>& noise) {
  check_batch(real, "step_ec_gan");
  check_noise(noise, config_.net, "step_ec_gan");
  pending_ = MetricsRecord{};
  pending_.iteration = iteration_ + 1;

  const std::vector<int> real_zero(real.labels.size(), 0);
  const std::vector<int> fake_zero(noise.labels.size(), 0);
  std::vector<T> conf_real, conf_fake;
  const double loss_real = update_discriminator(real.images, real_zero, 1, &conf_real);
  Tensor<T> fake = generate(noise.z, fake_zero);
  const double loss_fake = update_discriminator(fake, fake_zero, 0, &conf_fake);
  pending_.loss_d = loss_real + loss_fake;
  pending_.gan_value = objectives::gan_value_diagnostic(
      std::span<const T>(conf_real), std::span<const T>(conf_fake));
  pending_.loss_g = update_generator(fake, fake_zero, nullptr);

  pending_.loss_c_real = update_classifier(real.images, real.labels, 1.0);

  if (config_.regenerate_synthetic) {
    const auto fresh = data::sample_noise_labels<T>(
        config_.synthetic_batch_size, config_.net.num_classes, config_.net.z_dim,
        streams_.noise);
    fake = generate(fresh.z, std::vector<int>(fresh.labels.size(), 0));
  }
  const Tensor<T> probs =
      objectives::softmax(nets_.classifier.forward(fake, nn::Mode::kEval));
  std::vector<std::size_t> keep;
  std::vector<int> pseudo;
  for (std::size_t i = 0; i < probs.dim(0); ++i) {
    const auto row = probs.slice(i);
    const std::size_t best = nn::argmax(row);
    if (static_cast<double>(row[best]) >= config_.pseudo_label_threshold) {
      keep.push_back(i);
      pseudo.push_back(static_cast<int>(best));
    }
  }
  pending_.k_prime_fraction =
      static_cast<double>(keep.size()) / static_cast<double>(probs.dim(0));
  if (!keep.empty() && config_.lambda > 0.0) {
    pending_.loss_c_syn = update_classifier(gather_rows(fake, keep), pseudo, config_.lambda);
  }
  iteration_ = pending_.iteration;
  return pending_;
}

template <typename T>
MetricsRecord Trainer<T>::step_baseline(const data::LabeledBatch<T>& real) {
  check_batch(real, "step_baseline");
  pending_ = MetricsRecord{};
  pending_.iteration = iteration_ + 1;
  pending_.loss_c_real = update_classifier(real.images, real.labels, 1.0);
  iteration_ = pending_.iteration;
  return pending_;
}

template <typename T>
MetricsRecord Trainer<T>::step(const data::WeightedBatchSampler& sampler) {
  const auto real = sampler.sample<T>(config_.batch_size, streams_.real_sampling,
                                      streams_.augmentation);
  if (config_.method == Method::kBaseline) return step_baseline(real);
  const auto noise = data::sample_noise_labels<T>(
      config_.synthetic_batch_size, config_.net.num_classes, config_.net.z_dim,
      streams_.noise);
  if (config_.method == Method::kEcGan) return step_ec_gan(real, noise);
  return step_sec_cgan(real, noise);
}

double evaluate_with(
    const std::function<Tensor<float>(const Tensor<float>&)>& predict_logits,
    const data::Dataset& test, std::size_t chunk) {
  const std::size_t n = test.size();
  if (n == 0) throw ArgumentError("evaluate: empty test set");
  if (chunk == 0) throw ArgumentError("evaluate: chunk must be positive");
  const std::size_t per = test.channels() * test.height() * test.width();
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t count = std::min(chunk, n - start);
    Tensor<float> batch({count, test.channels(), test.height(), test.width()});
    const float* src = test.images.data() + start * per;
    for (std::size_t i = 0; i < count * per; ++i) batch[i] = data::normalize_pixel(src[i]);
    const Tensor<float> logits = predict_logits(batch);
    if (logits.rank() != 2 || logits.dim(0) != count) {
      throw ConsistencyError("evaluate: predictor returned a malformed batch");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto row = logits.slice(i);
      if (static_cast<int>(nn::argmax(row)) == test.labels[start + i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

template <typename T>
double evaluate(models::Classifier<T>& classifier, const data::Dataset& test,
                std::size_t chunk) {
  return evaluate_with(
      [&classifier](const Tensor<float>& batch) {
        const Tensor<T> logits =
            classifier.forward(batch.template cast<T>(), nn::Mode::kEval);
        return logits.template cast<float>();
      },
      test, chunk);
}

template <typename T>
void run_training(Trainer<T>& trainer, const data::Dataset& train_set,
                  const data::Dataset& test_set, std::vector<MetricsRecord>& history,
                  const TrainHooks<T>& hooks) {
  const TrainConfig& cfg = trainer.config();
  if (train_set.size() == 0) throw ArgumentError("run_training: empty training set");
  const data::WeightedBatchSampler sampler(
      train_set, data::compute_class_weights(train_set), cfg.augment);
  while (trainer.iteration() < cfg.iterations) {
    MetricsRecord record = trainer.step(sampler);
    const bool due = record.iteration == cfg.iterations ||
                     (cfg.eval_every > 0 && record.iteration % cfg.eval_every == 0);
    if (due && test_set.size() > 0) {
      record.test_accuracy = evaluate(trainer.networks().classifier, test_set);
    }
    history.push_back(record);
    if (hooks.on_record) hooks.on_record(record);
    if (hooks.on_step) hooks.on_step(trainer);
  }
}

template class Trainer<float>;
template class Trainer<double>;
template double evaluate(models::Classifier<float>&, const data::Dataset&, std::size_t);
template double evaluate(models::Classifier<double>&, const data::Dataset&, std::size_t);
template void run_training(Trainer<float>&, const data::Dataset&, const data::Dataset&,
                           std::vector<MetricsRecord>&, const TrainHooks<float>&);
template void run_training(Trainer<double>&, const data::Dataset&, const data::Dataset&,
                           std::vector<MetricsRecord>&, const TrainHooks<double>&);

}  // namespace cosup::trainer
