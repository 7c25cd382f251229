// Copyright 2026 The odtalloc Authors
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
#include <optional>

namespace odtalloc {

/// Counter-based SplitMix64 stream.
///
/// Draw k (k = 1, 2, ...) is mix64(seed + k * 0x9E3779B97F4A7C15), where mix64
/// is the SplitMix64 finalizer (xor-shift 30/27/31 with multipliers
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). This is the same sequence as the
/// reference SplitMix64 seeded with `seed`, so other implementations can
/// reproduce it exactly.
///
/// Doubles in [0, 1) take the top 53 bits: (x >> 11) * 2^-53.
/// Normals use Box-Muller on two consecutive uniforms u1, u2:
/// r = sqrt(-2 ln(1 - u1)), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2); z0 is
/// returned first and z1 is kept for the next call.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Independent child stream: seed' = mix64(seed ^ mix64(stream + golden)).
  Rng split(std::uint64_t stream) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  static std::uint64_t mix64(std::uint64_t z) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

}  // namespace odtalloc
