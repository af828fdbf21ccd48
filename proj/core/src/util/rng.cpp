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

#include "cosup/util/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cosup/util/errors.hpp"

namespace cosup {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view name) {
  const std::uint64_t tag = fnv1a64(name);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(tag >> 32)};
  engine_.seed(seq);
}

__extension__ using Uint128 = unsigned __int128;

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_index: empty range");
  // Multiply-shift; bias is below 2^-64 * n.
  const Uint128 product = static_cast<Uint128>(engine_()) * n;
  return static_cast<std::uint64_t>(product >> 64);
}

double RngStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::string RngStream::serialize() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void RngStream::deserialize(const std::string& state) {
  std::istringstream in(state);
  std::mt19937_64 engine;
  in >> engine;
  if (in.fail()) throw FormatError("invalid random stream state");
  engine_ = engine;
}

}  // namespace cosup
