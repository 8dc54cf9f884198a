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

// Subcommand bodies. Each returns a process exit code:
//   0 success, 1 I/O failure or failed audit, 2 bad configuration,
//   3 infeasible tuning, 4 sampler failure.

#ifndef L2P_CLI_COMMANDS_H_
#define L2P_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "l2p/accountant.h"
#include "l2p/cli/run_config.h"
#include "l2p/harness.h"

namespace l2p::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSampler = 4;

int ExitCodeFor(const absl::Status& status);

// `requested` from --threads (0 if absent). L2P_THREADS, when set to a
// positive integer, wins; otherwise 0 selects DefaultThreads().
int ResolveThreads(int requested);

// Resolved parameters for one experiment: tuned unless overridden.
struct RunPlan {
  GameSpec spec;
  PrivacyBudget budget;
  double nominal_eta = 0.0;  // differs from spec.config.eta for OCO only
  int shrinks = 0;
};

absl::StatusOr<RunPlan> PlanRun(const RunConfig& config);

// Writes reps.csv, summary.json and provenance.json into config.output_dir.
int CmdRun(const RunConfig& config, std::ostream& out, std::ostream& err);

// One row per epsilon of the grid, written to <output_dir>/sweep.csv and
// echoed to `out`.
int CmdSweep(const RunConfig& config, const std::vector<double>& grid,
             std::ostream& out, std::ostream& err);

struct LowerBoundArgs {
  int64_t horizon = 10000;
  double epsilon = 0.01;
  int dimension = 4;
  int64_t reps = 100;
  uint64_t base_seed = 0;
  // 0 selects the number of epochs.
  int64_t switch_budget = 0;
  // Target delta for the tuned L2P comparison column.
  double delta = 1e-6;
  int threads = 1;
};

struct LowerBoundRow {
  int64_t rep = 0;
  uint64_t seed = 0;
  double strawman_regret = 0.0;
  std::optional<double> l2p_regret;
};

struct LowerBoundReport {
  EpochLayout layout;
  int64_t switch_budget = 0;
  // sqrt(E) * epoch length.
  double comparator_quantity = 0.0;
  std::optional<TunedConfig> tuned;
  std::vector<LowerBoundRow> rows;
  Moments strawman_regret;
  Moments l2p_regret;
  std::vector<std::string> warnings;
};

// Replicate r draws its epoch stream, strawman and L2P generators from
// MixSeed(MixSeed(base_seed, r), 0 / 1 / 2).
absl::StatusOr<LowerBoundReport> RunLowerBoundDemo(const LowerBoundArgs& args);

// CSV with columns rep,seed,T,epsilon,d,epochs,epoch_length,clamped,
// switch_budget,strawman_regret,l2p_regret,comparator_quantity.
int CmdLowerBound(const LowerBoundArgs& args, std::ostream& out,
                  std::ostream& err);

struct AccountArgs {
  double eta = 0.01;
  double p = 0.1;
  int64_t horizon = 1000;
  int64_t batch_size = 1;
  double delta0 = 0.0;
  double delta1 = 1e-6;
  bool json = false;
};

// key=value lines (epsilon, delta, preconditions_met, note) or one JSON
// object.
int CmdAccount(const AccountArgs& args, std::ostream& out, std::ostream& err);

struct AuditArgs {
  // marginal, ratio, epsilon or switches.
  std::string test;
  int dimension = 3;
  int64_t horizon = 5;
  int64_t batch_size = 1;
  // Absent: 0.1 for marginal/ratio/switches; tuned for epsilon.
  std::optional<double> eta;
  double p = 0.5;
  double delta1 = 1e-6;
  // Tuning target for the epsilon test.
  double epsilon = 0.6;
  double delta = 1e-3;
  int64_t runs = 100000;
  uint64_t seed = 0;
  // Marginal test: batch to check; 0 checks every batch.
  int64_t batch_index = 0;
  // Epsilon test: the round whose losses the neighbor complements.
  int64_t neighbor_index = 0;
  int threads = 1;
};

// One JSON line per report. Exit 1 if any report fails.
int CmdAudit(const AuditArgs& args, std::ostream& out, std::ostream& err);

struct TuneArgs {
  std::string problem = "ope";
  int64_t horizon = 1000;
  int dimension = 2;
  double epsilon = 1.0;
  double delta = 1e-6;
  double lipschitz = 1.0;
  double diameter = 1.0;
  bool json = false;
};

int CmdTune(const TuneArgs& args, std::ostream& out, std::ostream& err);

}  // namespace l2p::cli

#endif  // L2P_CLI_COMMANDS_H_
