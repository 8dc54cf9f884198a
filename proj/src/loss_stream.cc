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

#include "l2p/loss_stream.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "l2p/measures.h"
#include "l2p/random.h"

namespace l2p {

namespace {

constexpr char kMagic[4] = {'L', '2', 'P', 'S'};
constexpr uint32_t kFormatVersion = 1;

absl::Status CheckShape(int dimension, int64_t horizon, size_t num_values) {
  if (dimension < 1) {
    return absl::InvalidArgumentError("dimension must be positive");
  }
  if (horizon < 1) {
    return absl::InvalidArgumentError("horizon must be positive");
  }
  if (num_values != static_cast<size_t>(dimension) * horizon) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected %d values, got %d", static_cast<size_t>(dimension) * horizon,
        num_values));
  }
  return absl::OkStatus();
}

template <typename T>
void PutLittleEndian(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  U bits = static_cast<U>(value);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLittleEndian(const std::string& in, size_t& offset) {
  using U = std::make_unsigned_t<T>;
  U bits = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(in[offset + i]))
            << (8 * i);
  }
  offset += sizeof(T);
  return static_cast<T>(bits);
}

}  // namespace

std::string_view StreamKindName(StreamKind kind) {
  switch (kind) {
    case StreamKind::kCustomExperts:
      return "custom-experts";
    case StreamKind::kBernoulli:
      return "bernoulli";
    case StreamKind::kAlternating:
      return "alternating";
    case StreamKind::kEpochLowerBound:
      return "epoch";
    case StreamKind::kCustomLinear:
      return "custom-linear";
    case StreamKind::kIidSphere:
      return "iid-sphere";
    case StreamKind::kDrift:
      return "drift";
  }
  return "unknown";
}

absl::StatusOr<StreamKind> ParseStreamKind(std::string_view name) {
  for (StreamKind kind :
       {StreamKind::kCustomExperts, StreamKind::kBernoulli,
        StreamKind::kAlternating, StreamKind::kEpochLowerBound,
        StreamKind::kCustomLinear, StreamKind::kIidSphere,
        StreamKind::kDrift}) {
    if (StreamKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown adversary kind '", std::string(name), "'"));
}

bool IsLinearKind(StreamKind kind) {
  return kind == StreamKind::kCustomLinear || kind == StreamKind::kIidSphere ||
         kind == StreamKind::kDrift;
}

absl::StatusOr<LossStream> LossStream::FromExpertLosses(
    int dimension, int64_t horizon, std::vector<double> values,
    StreamKind kind, uint64_t seed) {
  if (IsLinearKind(kind)) {
    return absl::InvalidArgumentError("kind is not an expert-loss kind");
  }
  absl::Status status = CheckShape(dimension, horizon, values.size());
  if (!status.ok()) return status;
  for (int64_t t = 0; t < horizon; ++t) {
    status = ValidateExpertLosses(
        std::span<const double>(values).subspan(t * dimension, dimension),
        dimension);
    if (!status.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("round ", t, ": ", status.message()));
    }
  }
  LossStream stream;
  stream.kind_ = kind;
  stream.dimension_ = dimension;
  stream.horizon_ = horizon;
  stream.seed_ = seed;
  stream.values_ = std::move(values);
  return stream;
}

absl::StatusOr<LossStream> LossStream::FromGradients(
    int dimension, int64_t horizon, double lipschitz,
    std::vector<double> values, StreamKind kind, uint64_t seed) {
  if (!IsLinearKind(kind)) {
    return absl::InvalidArgumentError("kind is not a linear-loss kind");
  }
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    return absl::InvalidArgumentError("Lipschitz bound must be positive");
  }
  absl::Status status = CheckShape(dimension, horizon, values.size());
  if (!status.ok()) return status;
  for (int64_t t = 0; t < horizon; ++t) {
    status = ValidateGradient(
        std::span<const double>(values).subspan(t * dimension, dimension),
        dimension, lipschitz);
    if (!status.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("round ", t, ": ", status.message()));
    }
  }
  LossStream stream;
  stream.kind_ = kind;
  stream.dimension_ = dimension;
  stream.horizon_ = horizon;
  stream.seed_ = seed;
  stream.lipschitz_ = lipschitz;
  stream.values_ = std::move(values);
  return stream;
}

absl::StatusOr<LossStream> BernoulliExperts(int dimension, int64_t horizon,
                                            std::span<const double> means,
                                            uint64_t seed) {
  if (static_cast<int>(means.size()) != dimension) {
    return absl::InvalidArgumentError("need one mean per expert");
  }
  for (double m : means) {
    if (!(m >= 0.0 && m <= 1.0)) {
      return absl::InvalidArgumentError("Bernoulli means must lie in [0, 1]");
    }
  }
  if (dimension < 1 || horizon < 1) {
    return absl::InvalidArgumentError("dimension and horizon must be positive");
  }
  Rng gen(seed);
  std::vector<double> values(static_cast<size_t>(dimension) * horizon);
  for (int64_t t = 0; t < horizon; ++t) {
    for (int x = 0; x < dimension; ++x) {
      values[t * dimension + x] = BernoulliCoin(gen, means[x]) ? 1.0 : 0.0;
    }
  }
  return LossStream::FromExpertLosses(dimension, horizon, std::move(values),
                                      StreamKind::kBernoulli, seed);
}

absl::StatusOr<LossStream> AlternatingExperts(int dimension, int64_t horizon) {
  if (dimension < 1 || horizon < 1) {
    return absl::InvalidArgumentError("dimension and horizon must be positive");
  }
  std::vector<double> values(static_cast<size_t>(dimension) * horizon, 0.0);
  for (int64_t t = 0; t < horizon; ++t) {
    values[t * dimension + t % dimension] = 1.0;
  }
  return LossStream::FromExpertLosses(dimension, horizon, std::move(values),
                                      StreamKind::kAlternating, 0);
}

absl::StatusOr<EpochLayout> ComputeEpochLayout(int64_t horizon,
                                               double epsilon) {
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  const double t_eps = static_cast<double>(horizon) * epsilon;
  if (t_eps < 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "(T eps)^{2/3} = %g < 1: the epoch construction is degenerate",
        std::cbrt(t_eps * t_eps)));
  }
  EpochLayout layout;
  const double requested = std::round(std::pow(t_eps, 4.0 / 3.0));
  layout.requested_epochs =
      requested > 9e18 ? INT64_MAX : static_cast<int64_t>(requested);
  layout.epochs = std::clamp<int64_t>(layout.requested_epochs, 1, horizon);
  layout.clamped = layout.epochs != layout.requested_epochs;
  layout.epoch_length = (horizon + layout.epochs - 1) / layout.epochs;
  return layout;
}

absl::StatusOr<LossStream> EpochLowerBoundStream(int64_t horizon,
                                                 double epsilon, int dimension,
                                                 uint64_t seed) {
  if (dimension < 1) {
    return absl::InvalidArgumentError("dimension must be positive");
  }
  absl::StatusOr<EpochLayout> layout = ComputeEpochLayout(horizon, epsilon);
  if (!layout.ok()) return layout.status();
  Rng gen(seed);
  std::vector<double> values(static_cast<size_t>(dimension) * horizon);
  std::vector<double> current(dimension);
  for (int64_t t = 0; t < horizon; ++t) {
    if (t % layout->epoch_length == 0) {
      for (double& v : current) v = BernoulliCoin(gen, 0.5) ? 1.0 : 0.0;
    }
    std::copy(current.begin(), current.end(),
              values.begin() + t * dimension);
  }
  return LossStream::FromExpertLosses(dimension, horizon, std::move(values),
                                      StreamKind::kEpochLowerBound, seed);
}

absl::StatusOr<LossStream> LinearOcoStream(int dimension, int64_t horizon,
                                           double lipschitz, uint64_t seed,
                                           OcoShape shape) {
  if (dimension < 1 || horizon < 1) {
    return absl::InvalidArgumentError("dimension and horizon must be positive");
  }
  if (!(lipschitz > 0.0)) {
    return absl::InvalidArgumentError("Lipschitz bound must be positive");
  }
  std::vector<double> values(static_cast<size_t>(dimension) * horizon, 0.0);
  if (shape == OcoShape::kIidSphere) {
    Rng gen(seed);
    std::vector<double> z(dimension);
    for (int64_t t = 0; t < horizon; ++t) {
      double norm = 0.0;
      do {
        for (double& v : z) v = StandardNormal(gen);
        norm = Norm(z);
      } while (norm == 0.0);
      for (int i = 0; i < dimension; ++i) {
        values[t * dimension + i] = lipschitz * z[i] / norm;
      }
    }
    return LossStream::FromGradients(dimension, horizon, lipschitz,
                                     std::move(values), StreamKind::kIidSphere,
                                     seed);
  }
  for (int64_t t = 0; t < horizon; ++t) {
    const double angle = std::numbers::pi * static_cast<double>(t) /
                         static_cast<double>(horizon);
    values[t * dimension] = lipschitz * std::cos(angle);
    if (dimension > 1) values[t * dimension + 1] = lipschitz * std::sin(angle);
  }
  return LossStream::FromGradients(dimension, horizon, lipschitz,
                                   std::move(values), StreamKind::kDrift, 0);
}

absl::StatusOr<LossStream> NeighborOf(const LossStream& stream, int64_t index,
                                      std::span<const double> replacement) {
  if (index < 0 || index >= stream.horizon()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "index %d outside [0, %d)", index, stream.horizon()));
  }
  const int d = stream.dimension();
  if (static_cast<int>(replacement.size()) != d) {
    return absl::InvalidArgumentError("replacement has the wrong dimension");
  }
  std::vector<double> values(stream.values().begin(), stream.values().end());
  std::copy(replacement.begin(), replacement.end(),
            values.begin() + index * d);
  if (stream.is_linear()) {
    return LossStream::FromGradients(d, stream.horizon(), stream.lipschitz(),
                                     std::move(values), stream.kind(),
                                     stream.seed());
  }
  return LossStream::FromExpertLosses(d, stream.horizon(), std::move(values),
                                      stream.kind(), stream.seed());
}

absl::Status WriteStreamBinary(const LossStream& stream,
                               const std::string& path) {
  std::string bytes(kMagic, kMagic + 4);
  PutLittleEndian<uint32_t>(bytes, kFormatVersion);
  PutLittleEndian<uint32_t>(bytes, static_cast<uint32_t>(stream.kind()));
  PutLittleEndian<uint32_t>(bytes, static_cast<uint32_t>(stream.dimension()));
  PutLittleEndian<uint64_t>(bytes, static_cast<uint64_t>(stream.horizon()));
  PutLittleEndian<uint64_t>(bytes, stream.seed());
  PutLittleEndian<uint64_t>(bytes, std::bit_cast<uint64_t>(stream.lipschitz()));
  bytes.reserve(bytes.size() + 4 * stream.values().size());
  for (double v : stream.values()) {
    PutLittleEndian<uint32_t>(bytes,
                              std::bit_cast<uint32_t>(static_cast<float>(v)));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot open ", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<LossStream> ReadStreamBinary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  constexpr size_t kHeaderSize = 4 + 4 + 4 + 4 + 8 + 8 + 8;
  if (bytes.size() < kHeaderSize || bytes.compare(0, 4, kMagic, 4) != 0) {
    return absl::DataLossError(absl::StrCat(path, " is not a loss stream"));
  }
  size_t offset = 4;
  const uint32_t version = GetLittleEndian<uint32_t>(bytes, offset);
  if (version != kFormatVersion) {
    return absl::DataLossError(
        absl::StrFormat("unsupported stream version %d", version));
  }
  const uint32_t kind_raw = GetLittleEndian<uint32_t>(bytes, offset);
  if (kind_raw > static_cast<uint32_t>(StreamKind::kDrift)) {
    return absl::DataLossError("unknown stream kind");
  }
  const auto kind = static_cast<StreamKind>(kind_raw);
  const auto dimension = static_cast<int>(GetLittleEndian<uint32_t>(bytes, offset));
  const auto horizon = static_cast<int64_t>(GetLittleEndian<uint64_t>(bytes, offset));
  const uint64_t seed = GetLittleEndian<uint64_t>(bytes, offset);
  const double lipschitz =
      std::bit_cast<double>(GetLittleEndian<uint64_t>(bytes, offset));
  if (dimension < 1 || horizon < 1 ||
      bytes.size() - kHeaderSize !=
          4 * static_cast<size_t>(dimension) * static_cast<size_t>(horizon)) {
    return absl::DataLossError("stream payload size does not match header");
  }
  std::vector<double> values(static_cast<size_t>(dimension) * horizon);
  for (double& v : values) {
    v = std::bit_cast<float>(GetLittleEndian<uint32_t>(bytes, offset));
  }
  if (IsLinearKind(kind)) {
    return LossStream::FromGradients(dimension, horizon, lipschitz,
                                     std::move(values), kind, seed);
  }
  return LossStream::FromExpertLosses(dimension, horizon, std::move(values),
                                      kind, seed);
}

std::string StreamToCsv(const LossStream& stream) {
  std::string out = "t";
  for (int i = 0; i < stream.dimension(); ++i) absl::StrAppend(&out, ",v", i);
  out += "\n";
  for (int64_t t = 0; t < stream.horizon(); ++t) {
    absl::StrAppend(&out, t);
    for (double v : stream.Row(t)) absl::StrAppendFormat(&out, ",%.9g", v);
    out += "\n";
  }
  return out;
}

absl::StatusOr<LossStream> GenerateStream(const AdversarySpec& spec) {
  switch (spec.kind) {
    case StreamKind::kBernoulli: {
      std::vector<double> means = spec.means;
      if (means.empty()) {
        means.resize(spec.dimension);
        for (int x = 0; x < spec.dimension; ++x) {
          means[x] = spec.dimension == 1
                         ? 0.5
                         : 0.25 + 0.5 * x / (spec.dimension - 1);
        }
      }
      return BernoulliExperts(spec.dimension, spec.horizon, means, spec.seed);
    }
    case StreamKind::kAlternating:
      return AlternatingExperts(spec.dimension, spec.horizon);
    case StreamKind::kEpochLowerBound:
      return EpochLowerBoundStream(spec.horizon, spec.epsilon, spec.dimension,
                                   spec.seed);
    case StreamKind::kIidSphere:
      return LinearOcoStream(spec.dimension, spec.horizon, spec.lipschitz,
                             spec.seed, OcoShape::kIidSphere);
    case StreamKind::kDrift:
      return LinearOcoStream(spec.dimension, spec.horizon, spec.lipschitz,
                             spec.seed, OcoShape::kDrift);
    case StreamKind::kCustomExperts:
    case StreamKind::kCustomLinear:
      break;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "adversary kind '", std::string(StreamKindName(spec.kind)), "' cannot be generated"));
}

}  // namespace l2p
