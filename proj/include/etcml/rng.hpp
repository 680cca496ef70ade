// Copyright 2026 The etcml Authors.
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

#ifndef ETCML_RNG_HPP
#define ETCML_RNG_HPP

#include <cstdint>
#include <vector>

namespace etcml {

// SplitMix64 output function. All randomness in the library flows through
// this mixer so that every artifact (keys, splits, reducers, synthetic
// data) is reproducible from explicit 64-bit seeds on any platform.
std::uint64_t mix64(std::uint64_t x);

// Deterministic 64-bit stream (SplitMix64).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Uniform draw in [0, bound) by rejection sampling; unbiased for any
  // bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit();

  // Standard normal via Box-Muller on fixed 53-bit uniforms. Draws are
  // consumed in pairs; the second value of a pair is cached.
  double next_gaussian();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// In-place Fisher-Yates shuffle, consuming one bounded draw per step from
// index n-1 down to 1.
template <typename T>
void fisher_yates(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Identity permutation 0..n-1 shuffled with the stream above.
std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng);

// Domain-separation tags. Streams for unrelated purposes are seeded with
// mix64(seed ^ tag) so that re-keying one stage never perturbs another.
namespace domain {
inline constexpr std::uint64_t kKeyK1 = 0x7e74634b315f5f31ULL;
inline constexpr std::uint64_t kKeyK2 = 0x7e74634b325f5f32ULL;
inline constexpr std::uint64_t kKeyK3 = 0x7e74634b335f5f33ULL;
inline constexpr std::uint64_t kClientKey = 0x636c69656e744b59ULL;
inline constexpr std::uint64_t kSynthTemplate = 0x73796e7468544d50ULL;
inline constexpr std::uint64_t kSynthNoise = 0x73796e74684e5a45ULL;
inline constexpr std::uint64_t kSplit = 0x73706c69745f5f31ULL;
inline constexpr std::uint64_t kReducer = 0x7265647563657231ULL;
}  // namespace domain

// Stream seeded for one purpose: mix64(seed ^ tag).
SplitMix64 seeded_stream(std::uint64_t seed, std::uint64_t tag);

}  // namespace etcml

#endif  // ETCML_RNG_HPP
