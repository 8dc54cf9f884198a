// Copyright 2026 The L2P Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random variate helpers shared by the samplers, the L2P coin flips and the
// adversaries. Everything here consumes a 64-bit generator directly instead of
// going through <random> distributions, whose outputs are implementation
// defined; transcripts are then reproducible across standard libraries.

#ifndef L2P_RANDOM_H_
#define L2P_RANDOM_H_

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace l2p {

using Rng = std::mt19937_64;

template <typename G>
concept BitGenerator64 =
    std::uniform_random_bit_generator<G> &&
    G::min() == 0 && G::max() == std::numeric_limits<uint64_t>::max();

// Uniform on [0, 1) with 53 bits of resolution.
template <BitGenerator64 G>
double UniformDouble(G& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Returns true with probability `prob`. A draw of exactly zero returns true
// for any positive `prob`.
template <BitGenerator64 G>
bool BernoulliCoin(G& gen, double prob) {
  return UniformDouble(gen) < prob;
}

// Box-Muller; one variate per call.
template <BitGenerator64 G>
double StandardNormal(G& gen) {
  const double u1 = 1.0 - UniformDouble(gen);  // (0, 1]
  const double u2 = UniformDouble(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

template <BitGenerator64 G>
double StandardExponential(G& gen) {
  return -std::log(1.0 - UniformDouble(gen));
}

// Uniform integer in [0, n). Uses Lemire's multiply-shift reduction; the
// bias is below 2^-64 * n and irrelevant at the sizes used here.
template <BitGenerator64 G>
int64_t UniformIndex(G& gen, int64_t n) {
  const unsigned __int128 product =
      static_cast<unsigned __int128>(gen()) * static_cast<uint64_t>(n);
  return static_cast<int64_t>(product >> 64);
}

// SplitMix64 finalizer applied to (base, index). Used to derive independent
// replicate seeds from one base seed.
inline uint64_t MixSeed(uint64_t base, uint64_t index) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace l2p

#endif  // L2P_RANDOM_H_
