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

// Monte Carlo checks of distributional and privacy properties at tiny scale.
// Each report keeps the theoretical bound and the sampling slack apart;
// the pass threshold is their sum.

#ifndef L2P_AUDIT_H_
#define L2P_AUDIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "l2p/harness.h"
#include "l2p/l2p_config.h"
#include "l2p/loss_stream.h"

namespace l2p {

struct AuditReport {
  std::string name;
  int64_t samples = 0;
  double statistic = 0.0;
  double bound = 0.0;  // the claimed theoretical value
  double slack = 0.0;  // Monte Carlo allowance
  double threshold = 0.0;  // bound + slack
  bool pass = false;       // statistic <= threshold
  bool inconclusive = false;
  std::vector<std::string> notes;
};

// Single-line JSON with keys name, samples, statistic, bound, slack,
// threshold, pass, inconclusive, notes.
std::string AuditReportToJson(const AuditReport& report);

struct AuditOptions {
  int64_t runs = 10000;
  uint64_t base_seed = 0;
  int threads = 1;
};

// Total variation between the empirical law of x_s over independent runs and
// the multiplicative-weights distribution after the first (s - 1) B losses.
// Requires delta0 = 0, d <= 8, 1 <= s <= min(10, number of batches) and at
// least 10^4 runs. Slack is 3 sqrt(d / runs).
absl::StatusOr<AuditReport> MarginalTvTest(const L2PConfig& config,
                                           const LossStream& stream,
                                           int64_t batch_index,
                                           const AuditOptions& options);

// The same test for every batch, from one set of runs. Requires at most 10
// batches.
absl::StatusOr<std::vector<AuditReport>> MarginalTvByBatch(
    const L2PConfig& config, const LossStream& stream,
    const AuditOptions& options);

// Fraction of (run, batch) pairs, s >= 2, whose correlated-sampling ratio
// lies outside [e^{-2 B eta}, e^{2 B eta}]. Bound delta1, slack
// 3 sqrt(B / (runs T)).
absl::StatusOr<AuditReport> RatioRangeCheck(const L2PConfig& config,
                                            const LossStream& stream,
                                            const AuditOptions& options);

struct EpsilonAuditOptions {
  AuditOptions run;
  int64_t min_bucket_count = 100;
  double wilson_z = 1.96;
};

// Lower estimate of epsilon from transcripts on two neighboring streams,
// bucketed by (x switch pattern, final expert). For each bucket reached at
// least min_bucket_count times under both streams, the Wilson centers give
// |log(p / p')|; the estimate is the maximum. The pass threshold is
// accountant_epsilon plus 3 standard errors of the maximizing bucket. With
// no qualifying bucket the report is inconclusive and passes.
// Requires d = 2, T <= 20 and B <= 2.
absl::StatusOr<AuditReport> EmpiricalEpsilon(const L2PConfig& config,
                                             const LossStream& stream,
                                             const LossStream& neighbor,
                                             double accountant_epsilon,
                                             const EpsilonAuditOptions& options);

// Fraction of runs whose fake-switch count (batches with A = 0 or S' = 0)
// exceeds 2 T p log(1/delta1) / B. Bound delta1; slack defaults to
// 3 sqrt(delta1 (1 - delta1) / n). Requires at least 100 results.
absl::StatusOr<AuditReport> SwitchStatistics(
    std::span<const GameResult> results, const L2PConfig& config,
    std::optional<double> slack = std::nullopt);

}  // namespace l2p

#endif  // L2P_AUDIT_H_
