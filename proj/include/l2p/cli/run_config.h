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

#ifndef L2P_CLI_RUN_CONFIG_H_
#define L2P_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "l2p/loss_stream.h"

namespace l2p::cli {

inline constexpr int kRunConfigSchema = 1;

enum class Problem { kOpe, kOco };

// Manual parameters that bypass the tuner. Experts problem only.
struct Overrides {
  int64_t batch_size = 1;
  double eta = 0.01;
  double p = 0.5;
};

struct OcoGeometry {
  double lipschitz = 1.0;  // L
  double diameter = 1.0;   // D
};

struct RunConfig {
  Problem problem = Problem::kOpe;
  int64_t horizon = 1000;
  int dimension = 2;
  double epsilon = 1.0;
  double delta = 1e-6;
  int64_t reps = 10;
  uint64_t base_seed = 0;
  // Dimension and horizon are taken from the fields above; for OCO the
  // Lipschitz bound comes from `oco`.
  AdversarySpec adversary;
  // Regenerate the stream per replicate with seed MixSeed(adversary.seed, rep).
  bool fresh_stream_per_rep = false;
  std::optional<Overrides> overrides;
  OcoGeometry oco;
  std::string output_dir = ".";
  // 0 means the default worker count.
  int threads = 0;
};

// Strict: unknown keys, a wrong schema number, or an incomplete overrides
// block are InvalidArgument errors.
absl::StatusOr<RunConfig> ParseRunConfig(const std::string& json_text);
absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

// Emits every field, so parsing the output reproduces the config.
std::string RunConfigToJson(const RunConfig& config);

// The adversary spec with dimension, horizon and Lipschitz bound filled in.
AdversarySpec ResolvedAdversary(const RunConfig& config);

}  // namespace l2p::cli

#endif  // L2P_CLI_RUN_CONFIG_H_
