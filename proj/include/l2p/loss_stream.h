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

// Oblivious adversaries. Every stream is materialized up front from
// (kind, parameters, seed) and never looks at the learner.

#ifndef L2P_LOSS_STREAM_H_
#define L2P_LOSS_STREAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace l2p {

enum class StreamKind : uint32_t {
  kCustomExperts = 0,
  kBernoulli = 1,
  kAlternating = 2,
  kEpochLowerBound = 3,
  kCustomLinear = 4,
  kIidSphere = 5,
  kDrift = 6,
};

std::string_view StreamKindName(StreamKind kind);
absl::StatusOr<StreamKind> ParseStreamKind(std::string_view name);
// True for kinds whose rows are gradients of linear losses.
bool IsLinearKind(StreamKind kind);

// T rows of d values, row-major. Rows are expert losses in [0, 1] or
// gradients with norm at most lipschitz(), depending on kind().
class LossStream {
 public:
  static absl::StatusOr<LossStream> FromExpertLosses(
      int dimension, int64_t horizon, std::vector<double> values,
      StreamKind kind = StreamKind::kCustomExperts, uint64_t seed = 0);
  static absl::StatusOr<LossStream> FromGradients(
      int dimension, int64_t horizon, double lipschitz,
      std::vector<double> values, StreamKind kind = StreamKind::kCustomLinear,
      uint64_t seed = 0);

  StreamKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  int64_t horizon() const { return horizon_; }
  uint64_t seed() const { return seed_; }
  bool is_linear() const { return IsLinearKind(kind_); }
  // Zero for expert streams.
  double lipschitz() const { return lipschitz_; }

  std::span<const double> Row(int64_t t) const {
    return std::span<const double>(values_).subspan(t * dimension_,
                                                    dimension_);
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const LossStream& other) const = default;

 private:
  LossStream() = default;

  StreamKind kind_ = StreamKind::kCustomExperts;
  int dimension_ = 0;
  int64_t horizon_ = 0;
  uint64_t seed_ = 0;
  double lipschitz_ = 0.0;
  std::vector<double> values_;
};

// loss_t[x] ~ Bernoulli(means[x]) independently.
absl::StatusOr<LossStream> BernoulliExperts(int dimension, int64_t horizon,
                                            std::span<const double> means,
                                            uint64_t seed);

// Round t charges 1 to expert t mod d and 0 to the rest.
absl::StatusOr<LossStream> AlternatingExperts(int dimension, int64_t horizon);

struct EpochLayout {
  int64_t requested_epochs = 0;  // round((T eps)^{4/3})
  int64_t epochs = 0;            // clamped to [1, T]
  int64_t epoch_length = 0;      // ceil(T / epochs); the last epoch may be short
  bool clamped = false;
};

// Requires T * eps >= 1.
absl::StatusOr<EpochLayout> ComputeEpochLayout(int64_t horizon,
                                               double epsilon);

// The lower-bound adversary: each epoch repeats one draw of Ber(1/2)^d.
absl::StatusOr<LossStream> EpochLowerBoundStream(int64_t horizon,
                                                 double epsilon, int dimension,
                                                 uint64_t seed);

enum class OcoShape { kIidSphere, kDrift };

// kIidSphere: g_t uniform on the radius-L sphere. kDrift: g_t = L * u_t with
// u_t rotating by pi over the horizon in the first coordinate plane; it does
// not consume the seed.
absl::StatusOr<LossStream> LinearOcoStream(int dimension, int64_t horizon,
                                           double lipschitz, uint64_t seed,
                                           OcoShape shape);

// A copy of `stream` with row `index` replaced.
absl::StatusOr<LossStream> NeighborOf(const LossStream& stream, int64_t index,
                                      std::span<const double> replacement);

// Binary layout, little endian:
//   char[4] "L2PS", u32 version (1), u32 kind, u32 d, u64 T, u64 seed,
//   f64 lipschitz, then T * d f32 values row-major.
absl::Status WriteStreamBinary(const LossStream& stream,
                               const std::string& path);
absl::StatusOr<LossStream> ReadStreamBinary(const std::string& path);

// Debug dump: header "t,v0,...,v{d-1}" then one row per round.
std::string StreamToCsv(const LossStream& stream);

// Everything needed to regenerate a stream.
struct AdversarySpec {
  StreamKind kind = StreamKind::kBernoulli;
  int dimension = 2;
  int64_t horizon = 1;
  uint64_t seed = 0;
  // kBernoulli; empty means evenly spaced in [0.25, 0.75].
  std::vector<double> means;
  // kEpochLowerBound.
  double epsilon = 1.0;
  // kIidSphere and kDrift.
  double lipschitz = 1.0;
};

absl::StatusOr<LossStream> GenerateStream(const AdversarySpec& spec);

}  // namespace l2p

#endif  // L2P_LOSS_STREAM_H_
