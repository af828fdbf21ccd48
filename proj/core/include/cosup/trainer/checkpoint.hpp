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
#include <map>
#include <string>

#include "cosup/tensor.hpp"
#include "cosup/trainer/trainer.hpp"

namespace cosup::trainer {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything needed to resume a run bit-for-bit.
struct CheckpointBundle {
  std::int64_t iteration = 0;
  std::string config_text;
  std::map<std::string, std::string> rng_states;
  std::map<std::string, std::int64_t> counters;
  std::map<std::string, Tensor<float>> tensors;

  friend bool operator==(const CheckpointBundle&, const CheckpointBundle&) = default;
};

// Layout: "COSUPCK\0", u32 version, u64 payload length, payload, u32 CRC-32
// of the payload. Integers are little-endian. Written to a temporary file
// and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const CheckpointBundle& bundle);
// Throws VersionError on a version mismatch and IntegrityError on a bad
// magic, truncation or checksum failure.
CheckpointBundle load_checkpoint(const std::filesystem::path& path);

std::string encode_checkpoint(const CheckpointBundle& bundle);
CheckpointBundle decode_checkpoint(const std::string& bytes);

CheckpointBundle make_bundle(Trainer<float>& trainer);
// Rebuilds a trainer; every tensor, counter and stream must be present
// with matching shapes, otherwise IntegrityError.
Trainer<float> restore_trainer(const CheckpointBundle& bundle);

}  // namespace cosup::trainer
