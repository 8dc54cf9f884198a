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

#ifndef L2P_TRUNCATED_NORMAL_H_
#define L2P_TRUNCATED_NORMAL_H_

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "l2p/random.h"

namespace l2p {

inline constexpr int kTruncatedNormalMaxAttempts = 100000;

// Draws Z ~ N(0, 1) conditioned on a <= Z <= b.
//
// Picks one of three exact rejection schemes by interval shape:
//  * intervals straddling zero: plain normal proposals when wide, uniform
//    proposals when narrow;
//  * one-sided tail intervals: uniform proposals when the density varies
//    little over [a, b], otherwise Robert's translated-exponential proposal.
// Each scheme has acceptance rate bounded away from zero for every (a, b).
template <BitGenerator64 G>
absl::StatusOr<double> SampleTruncatedStandardNormal(double a, double b,
                                                     G& gen) {
  if (!(a <= b) || std::isnan(a) || std::isnan(b)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("empty truncation interval [%g, %g]", a, b));
  }
  if (a == b) return a;
  // Work in the right tail; flip back on return.
  bool flipped = false;
  if (b <= 0.0) {
    std::swap(a, b);
    a = -a;
    b = -b;
    flipped = true;
  }
  const auto finish = [flipped](double z) { return flipped ? -z : z; };

  for (int attempt = 0; attempt < kTruncatedNormalMaxAttempts; ++attempt) {
    if (a <= 0.0) {
      // Interval contains zero.
      if (b - a >= 2.5) {
        const double z = StandardNormal(gen);
        if (z >= a && z <= b) return finish(z);
      } else {
        const double z = a + (b - a) * UniformDouble(gen);
        if (UniformDouble(gen) <= std::exp(-0.5 * z * z)) return finish(z);
      }
    } else if ((b - a) * (b + a) <= 2.0) {
      const double z = a + (b - a) * UniformDouble(gen);
      if (UniformDouble(gen) <= std::exp(0.5 * (a * a - z * z))) {
        return finish(z);
      }
    } else {
      const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
      const double z = a + StandardExponential(gen) / alpha;
      if (z > b) continue;
      const double diff = z - alpha;
      if (UniformDouble(gen) <= std::exp(-0.5 * diff * diff)) {
        return finish(z);
      }
    }
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "truncated normal sampler exhausted on [%g, %g]", a, b));
}

template <BitGenerator64 G>
absl::StatusOr<double> SampleTruncatedNormal(double mean, double stddev,
                                             double lo, double hi, G& gen) {
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    return absl::InvalidArgumentError("stddev must be positive and finite");
  }
  absl::StatusOr<double> z = SampleTruncatedStandardNormal(
      (lo - mean) / stddev, (hi - mean) / stddev, gen);
  if (!z.ok()) return z.status();
  double x = mean + stddev * *z;
  // Guard against rounding just outside the interval.
  if (x < lo) x = lo;
  if (x > hi) x = hi;
  return x;
}

}  // namespace l2p

#endif  // L2P_TRUNCATED_NORMAL_H_
