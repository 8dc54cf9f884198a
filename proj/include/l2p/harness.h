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

// Games between the transformation and an oblivious adversary, comparators,
// Monte Carlo replication and baselines.

#ifndef L2P_HARNESS_H_
#define L2P_HARNESS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "l2p/l2p.h"
#include "l2p/l2p_config.h"
#include "l2p/loss_stream.h"
#include "l2p/measures.h"

namespace l2p {

enum class MeasureKind { kMw, kRmw };

// Wrapped-measure parameters beyond the L2P config. MW takes its eta from the
// config; RMW reads the fields below.
struct MeasureParams {
  double beta = 0.0;
  double lambda = 0.0;
  double radius = 0.0;
  double lipschitz = 0.0;
  RmwSamplerOptions sampler;
};

struct GameSpec {
  L2PConfig config;
  MeasureKind kind = MeasureKind::kMw;
  MeasureParams measure;
};

struct GameResult {
  Transcript transcript;
  double total_loss = 0.0;
  double comparator_loss = 0.0;
  double regret = 0.0;  // total_loss - comparator_loss
  int64_t switch_count_x = 0;
  int64_t switch_count_y = 0;
  uint64_t seed = 0;
  double wallclock_seconds = 0.0;
};

struct ExpertComparator {
  int index = 0;
  double loss = 0.0;
};

// Lowest cumulative loss; ties go to the lowest index.
absl::StatusOr<ExpertComparator> BestInHindsightOpe(const LossStream& stream);

struct BallComparator {
  std::vector<double> point;
  double loss = 0.0;
};

// For G = sum of gradients: x* = -R G / |G| with loss -R |G|, or the origin
// when G = 0.
absl::StatusOr<BallComparator> BestInHindsightOcoBall(const LossStream& stream,
                                                      double radius);

// One seeded run of the transformation over `stream`.
absl::StatusOr<GameResult> PlayGame(const GameSpec& spec,
                                    const LossStream& stream, uint64_t seed);

// Plays a uniformly random expert, redrawn at rounds floor(k T / S) for
// k = 0, ..., S - 1. Each redraw after the first counts as a switch.
absl::StatusOr<GameResult> StrawmanFixedSwitch(const LossStream& stream,
                                               int64_t switch_budget,
                                               uint64_t seed);

// p = 1, B = 1, delta0 = 0 and eta = min(0.1, sqrt(log(d) / T)).
L2PConfig NonPrivateMwConfig(int64_t horizon, int dimension);

// Reference regret curve for the private experts problem,
//   sqrt(T log d) + T^{1/3} log(d) log(T / delta) / eps^{2/3}.
double DpOpeRegretBound(int64_t horizon, int dimension, double epsilon,
                        double delta);

// Runs fn(0), ..., fn(n - 1) on up to `threads` workers and returns the
// error of the lowest failing index, if any.
absl::Status ParallelFor(int64_t n, int threads,
                         const std::function<absl::Status(int64_t)>& fn);

// Worker count when the caller does not choose: hardware concurrency, at
// least 1.
int DefaultThreads();

struct MonteCarloOptions {
  int64_t reps = 1;
  uint64_t base_seed = 0;
  int threads = 1;
  // Keep every GameResult (with transcript) in the summary.
  bool keep_results = false;
};

struct RepRow {
  int64_t rep = 0;
  uint64_t seed = 0;
  int64_t horizon = 0;
  int64_t batch_size = 0;
  double eta = 0.0;
  double p = 0.0;
  double regret = 0.0;
  int64_t switches_x = 0;
  int64_t switches_y = 0;
  double total_loss = 0.0;
  double comparator_loss = 0.0;
};

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one value
};

// Order-independent: values are sorted before summation.
Moments ComputeMoments(std::vector<double> values);

struct MonteCarloSummary {
  int64_t reps = 0;
  Moments regret;
  Moments switches_x;
  Moments switches_y;
  Moments total_loss;
  std::vector<RepRow> rows;        // in rep order
  std::vector<GameResult> results;  // only with keep_results
};

// A game for replicate `rep` played with generator seed `seed`.
using GameFn =
    std::function<absl::StatusOr<GameResult>(int64_t rep, uint64_t seed)>;

// Replicate `rep` receives seed MixSeed(base_seed, rep).
absl::StatusOr<MonteCarloSummary> MonteCarlo(const MonteCarloOptions& options,
                                             const GameFn& game);

// The transformation against one fixed stream.
absl::StatusOr<MonteCarloSummary> MonteCarlo(const GameSpec& spec,
                                             const LossStream& stream,
                                             const MonteCarloOptions& options);

// The transformation against a fresh stream per replicate, generated from
// `adversary` with its seed replaced by MixSeed(adversary.seed, rep).
absl::StatusOr<MonteCarloSummary> MonteCarlo(const GameSpec& spec,
                                             const AdversarySpec& adversary,
                                             const MonteCarloOptions& options);

// Header rep,seed,T,B,eta,p,regret,switches_x,switches_y,total_loss,
// comparator_loss and one line per row.
std::string RepRowsToCsv(const std::vector<RepRow>& rows);

}  // namespace l2p

#endif  // L2P_HARNESS_H_
