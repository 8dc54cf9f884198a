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

#ifndef L2P_L2P_CONFIG_H_
#define L2P_L2P_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace l2p {

struct L2PConfig {
  int64_t horizon = 1;     // T
  int64_t batch_size = 1;  // B
  // Divergence parameter of the wrapped measure; also sets the e^{2 B eta}
  // deflation of the switching ratio.
  double eta = 0.01;
  // Fake-switch probability. 1 resamples every batch (non-private play).
  double p = 0.5;
  double delta0 = 0.0;
  double delta1 = 1e-6;

  // ceil(T / B); the last batch may be short.
  int64_t NumBatches() const {
    return (horizon + batch_size - 1) / batch_size;
  }
};

// Rejects configurations the algorithm cannot run: T or B < 1, eta outside
// (0, 1/10], p outside [0, 1], delta0 outside [0, 1], delta1 outside (0, 1).
absl::Status ValidateConfig(const L2PConfig& config);

// Soft conditions under which the privacy accounting holds. Runs proceed
// when these fail; budgets are then flagged.
struct PreconditionReport {
  bool p_in_open_unit_interval = true;  // p in (0, 1)
  bool enough_fake_switches = true;     // T p / B >= 1
  bool ratio_concentrates = true;       // eta B log(1/delta1) / p <= 1
  std::vector<std::string> warnings;

  bool ok() const {
    return p_in_open_unit_interval && enough_fake_switches &&
           ratio_concentrates;
  }
};

PreconditionReport CheckPreconditions(const L2PConfig& config);

}  // namespace l2p

#endif  // L2P_L2P_CONFIG_H_
