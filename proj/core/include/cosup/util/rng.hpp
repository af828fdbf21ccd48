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
#include <random>
#include <string>
#include <string_view>

namespace cosup {

// A named, independently seeded random stream.
//
// The engine is std::mt19937_64; the derived draws (uniform, normal, index)
// are computed here instead of through <random> distributions so that a
// stream's output depends only on the engine state, which is what
// checkpoints persist.
class RngStream {
 public:
  RngStream() : RngStream(0, "default") {}
  RngStream(std::uint64_t master_seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal via Box-Muller; no cached second variate.
  double normal();

  std::string serialize() const;
  void deserialize(const std::string& state);

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a; used to turn stream names into seed material.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace cosup
