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

#include "cosup/trainer/checkpoint.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cosup/util/errors.hpp"

namespace cosup::trainer {

namespace {

constexpr char kMagic[8] = {'C', 'O', 'S', 'U', 'P', 'C', 'K', '\0'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

class Writer {
 public:
  template <typename U>
  void pod(U v) {
    char buf[sizeof(U)];
    std::memcpy(buf, &v, sizeof(U));
    out_.append(buf, sizeof(U));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_ += s;
  }
  void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename U>
  U pod() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, in_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > in_.size() - pos_) throw IntegrityError("checkpoint payload is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string encode_checkpoint(const CheckpointBundle& b) {
  Writer payload;
  payload.pod<std::int64_t>(b.iteration);
  payload.str(b.config_text);
  payload.pod<std::uint64_t>(b.rng_states.size());
  for (const auto& [name, state] : b.rng_states) {
    payload.str(name);
    payload.str(state);
  }
  payload.pod<std::uint64_t>(b.counters.size());
  for (const auto& [name, value] : b.counters) {
    payload.str(name);
    payload.pod<std::int64_t>(value);
  }
  payload.pod<std::uint64_t>(b.tensors.size());
  for (const auto& [name, t] : b.tensors) {
    payload.str(name);
    payload.pod<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) payload.pod<std::uint64_t>(d);
    payload.raw(t.data(), t.size() * sizeof(float));
  }

  Writer file;
  file.raw(kMagic, sizeof(kMagic));
  file.pod<std::uint32_t>(kCheckpointVersion);
  file.pod<std::uint64_t>(payload.bytes().size());
  file.bytes() += payload.bytes();
  file.pod<std::uint32_t>(crc_of(payload.bytes()));
  return std::move(file.bytes());
}

CheckpointBundle decode_checkpoint(const std::string& bytes) {
  Reader head(bytes);
  char magic[8];
  head.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IntegrityError("not a checkpoint (bad magic)");
  }
  const auto version = head.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw VersionError(fmt::format("checkpoint version {} is not supported (expected {})",
                                   version, kCheckpointVersion));
  }
  const auto length = head.pod<std::uint64_t>();
  constexpr std::size_t kHeader = sizeof(kMagic) + 4 + 8;
  if (bytes.size() < kHeader || length != bytes.size() - kHeader - 4) {
    throw IntegrityError("checkpoint length does not match its header");
  }
  const std::string_view payload(bytes.data() + kHeader, length);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + kHeader + length, 4);
  if (stored != crc_of(payload)) throw IntegrityError("checkpoint checksum mismatch");

  Reader in(payload);
  CheckpointBundle b;
  b.iteration = in.pod<std::int64_t>();
  b.config_text = in.str();
  for (auto n = in.pod<std::uint64_t>(); n > 0; --n) {
    std::string name = in.str();
    b.rng_states[name] = in.str();
  }
  for (auto n = in.pod<std::uint64_t>(); n > 0; --n) {
    std::string name = in.str();
    b.counters[name] = in.pod<std::int64_t>();
  }
  for (auto n = in.pod<std::uint64_t>(); n > 0; --n) {
    std::string name = in.str();
    const auto rank = in.pod<std::uint32_t>();
    if (rank > 8) throw IntegrityError("checkpoint tensor rank is implausible");
    Shape shape(rank);
    for (auto& d : shape) d = in.pod<std::uint64_t>();
    Tensor<float> t(shape);
    in.raw(t.data(), t.size() * sizeof(float));
    b.tensors.emplace(std::move(name), std::move(t));
  }
  if (!in.done()) throw IntegrityError("checkpoint payload has trailing bytes");
  return b;
}

void save_checkpoint(const std::filesystem::path& path, const CheckpointBundle& bundle) {
  const std::string bytes = encode_checkpoint(bundle);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

CheckpointBundle load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open checkpoint '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

namespace {

// Visits every persisted tensor of a trainer under its checkpoint name.
template <typename Fn>
void for_each_tensor(Trainer<float>& t, Fn&& fn) {
  auto& nets = t.networks();
  auto visit_net = [&](auto& net, AdamState<float>& opt, const char* tag) {
    auto params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      fn(params[i].name, params[i].param->value);
      fn(fmt::format("adam.{}.m.{}", tag, params[i].name), opt.first_moment[i]);
      fn(fmt::format("adam.{}.v.{}", tag, params[i].name), opt.second_moment[i]);
    }
    for (auto& buf : net.buffers()) fn(buf.name, *buf.tensor);
  };
  visit_net(nets.generator, t.optimizer_g(), "generator");
  visit_net(nets.discriminator, t.optimizer_d(), "discriminator");
  visit_net(nets.classifier, t.optimizer_c(), "classifier");
}

}  // namespace

CheckpointBundle make_bundle(Trainer<float>& trainer) {
  CheckpointBundle b;
  b.iteration = trainer.iteration();
  b.config_text = trainer.config().to_text();
  auto& s = trainer.streams();
  b.rng_states["init"] = s.init.serialize();
  b.rng_states["real-sampling"] = s.real_sampling.serialize();
  b.rng_states["noise"] = s.noise.serialize();
  b.rng_states["augmentation"] = s.augmentation.serialize();
  b.counters["adam.generator.step"] = trainer.optimizer_g().step;
  b.counters["adam.discriminator.step"] = trainer.optimizer_d().step;
  b.counters["adam.classifier.step"] = trainer.optimizer_c().step;
  for_each_tensor(trainer, [&b](const std::string& name, const Tensor<float>& t) {
    b.tensors.emplace(name, t);
  });
  return b;
}

Trainer<float> restore_trainer(const CheckpointBundle& b) {
  Trainer<float> trainer(TrainConfig::from_text(b.config_text));
  auto rng = [&b](const char* name) -> const std::string& {
    const auto it = b.rng_states.find(name);
    if (it == b.rng_states.end()) {
      throw IntegrityError(fmt::format("checkpoint lacks rng stream '{}'", name));
    }
    return it->second;
  };
  auto counter = [&b](const char* name) {
    const auto it = b.counters.find(name);
    if (it == b.counters.end()) {
      throw IntegrityError(fmt::format("checkpoint lacks counter '{}'", name));
    }
    return it->second;
  };
  auto& s = trainer.streams();
  s.init.deserialize(rng("init"));
  s.real_sampling.deserialize(rng("real-sampling"));
  s.noise.deserialize(rng("noise"));
  s.augmentation.deserialize(rng("augmentation"));
  trainer.optimizer_g().step = counter("adam.generator.step");
  trainer.optimizer_d().step = counter("adam.discriminator.step");
  trainer.optimizer_c().step = counter("adam.classifier.step");
  std::size_t used = 0;
  for_each_tensor(trainer, [&](const std::string& name, Tensor<float>& t) {
    const auto it = b.tensors.find(name);
    if (it == b.tensors.end()) {
      throw IntegrityError(fmt::format("checkpoint lacks tensor '{}'", name));
    }
    if (it->second.shape() != t.shape()) {
      throw IntegrityError(fmt::format("checkpoint tensor '{}' has shape {} (expected {})",
                                       name, shape_to_string(it->second.shape()),
                                       shape_to_string(t.shape())));
    }
    t = it->second;
    ++used;
  });
  if (used != b.tensors.size()) {
    throw IntegrityError("checkpoint holds tensors this configuration does not have");
  }
  trainer.set_iteration(b.iteration);
  return trainer;
}

}  // namespace cosup::trainer
