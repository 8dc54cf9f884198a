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

#include "l2p/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "l2p/random.h"
#include "l2p/status_macros.h"

namespace l2p {
namespace {

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void FillFromTranscript(GameResult& result, double comparator_loss) {
  result.total_loss = result.transcript.TotalLoss();
  result.comparator_loss = comparator_loss;
  result.regret = result.total_loss - result.comparator_loss;
  result.switch_count_x = result.transcript.SwitchCountX();
  result.switch_count_y = result.transcript.SwitchCountY();
}

}  // namespace

absl::StatusOr<ExpertComparator> BestInHindsightOpe(const LossStream& stream) {
  if (stream.is_linear()) {
    return absl::InvalidArgumentError("expected an expert loss stream");
  }
  const int d = stream.dimension();
  std::vector<double> totals(d, 0.0);
  for (int64_t t = 0; t < stream.horizon(); ++t) {
    const std::span<const double> row = stream.Row(t);
    for (int x = 0; x < d; ++x) totals[x] += row[x];
  }
  ExpertComparator best{0, totals[0]};
  for (int x = 1; x < d; ++x) {
    if (totals[x] < best.loss) best = {x, totals[x]};
  }
  return best;
}

absl::StatusOr<BallComparator> BestInHindsightOcoBall(const LossStream& stream,
                                                      double radius) {
  if (!stream.is_linear()) {
    return absl::InvalidArgumentError("expected a gradient stream");
  }
  if (!(radius > 0.0)) {
    return absl::InvalidArgumentError("radius must be positive");
  }
  const int d = stream.dimension();
  std::vector<double> g(d, 0.0);
  for (int64_t t = 0; t < stream.horizon(); ++t) {
    const std::span<const double> row = stream.Row(t);
    for (int i = 0; i < d; ++i) g[i] += row[i];
  }
  BallComparator out;
  out.point.assign(d, 0.0);
  const double norm = Norm(g);
  if (norm == 0.0) return out;
  for (int i = 0; i < d; ++i) out.point[i] = -radius * g[i] / norm;
  out.loss = -radius * norm;
  return out;
}

absl::StatusOr<GameResult> PlayGame(const GameSpec& spec,
                                    const LossStream& stream, uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  GameResult result;
  result.seed = seed;
  Rng gen(seed);
  double comparator = 0.0;
  if (spec.kind == MeasureKind::kMw) {
    L2P_ASSIGN_OR_RETURN(MwMeasure measure,
                         MwMeasure::Create(stream.dimension(), spec.config.eta));
    L2P_ASSIGN_OR_RETURN(result.transcript,
                         RunL2P(spec.config, std::move(measure), stream, gen));
    L2P_ASSIGN_OR_RETURN(ExpertComparator best, BestInHindsightOpe(stream));
    comparator = best.loss;
  } else {
    const MeasureParams& m = spec.measure;
    const double lipschitz = m.lipschitz > 0.0 ? m.lipschitz : stream.lipschitz();
    L2P_ASSIGN_OR_RETURN(RmwMeasure measure,
                         RmwMeasure::Create(stream.dimension(), m.beta,
                                            m.lambda, m.radius, lipschitz));
    measure.set_sampler_options(m.sampler);
    L2P_ASSIGN_OR_RETURN(result.transcript,
                         RunL2P(spec.config, std::move(measure), stream, gen));
    L2P_ASSIGN_OR_RETURN(BallComparator best,
                         BestInHindsightOcoBall(stream, m.radius));
    comparator = best.loss;
  }
  FillFromTranscript(result, comparator);
  result.wallclock_seconds = SecondsSince(start);
  return result;
}

absl::StatusOr<GameResult> StrawmanFixedSwitch(const LossStream& stream,
                                               int64_t switch_budget,
                                               uint64_t seed) {
  if (stream.is_linear()) {
    return absl::InvalidArgumentError("the strawman plays experts only");
  }
  const int64_t horizon = stream.horizon();
  if (switch_budget < 1 || switch_budget > horizon) {
    return absl::InvalidArgumentError(absl::StrCat(
        "switch budget must lie in [1, ", horizon, "], got ", switch_budget));
  }
  const auto start = std::chrono::steady_clock::now();
  GameResult result;
  result.seed = seed;
  result.transcript.horizon = horizon;
  result.transcript.batch_size = 0;  // segments have varying lengths
  result.transcript.round_losses.reserve(horizon);
  Rng gen(seed);
  for (int64_t k = 0; k < switch_budget; ++k) {
    // floor(k T / S) without 64-bit overflow for desk-scale T.
    const int64_t begin = static_cast<int64_t>(
        (static_cast<__int128>(k) * horizon) / switch_budget);
    const int64_t end = static_cast<int64_t>(
        (static_cast<__int128>(k + 1) * horizon) / switch_budget);
    const int x = static_cast<int>(UniformIndex(gen, stream.dimension()));
    BatchRecord record;
    record.s = k + 1;
    record.x = x;
    record.y = x;
    record.switched_x = k > 0;
    for (int64_t t = begin; t < end; ++t) {
      const double loss = stream.Row(t)[x];
      result.transcript.round_losses.push_back(loss);
      record.batch_loss += loss;
    }
    result.transcript.batches.push_back(std::move(record));
  }
  L2P_ASSIGN_OR_RETURN(ExpertComparator best, BestInHindsightOpe(stream));
  FillFromTranscript(result, best.loss);
  result.wallclock_seconds = SecondsSince(start);
  return result;
}

L2PConfig NonPrivateMwConfig(int64_t horizon, int dimension) {
  L2PConfig config;
  config.horizon = horizon;
  config.batch_size = 1;
  config.p = 1.0;
  config.delta0 = 0.0;
  config.eta = std::min(
      kMaxEta, std::sqrt(std::log(static_cast<double>(dimension)) /
                         static_cast<double>(horizon)));
  return config;
}

double DpOpeRegretBound(int64_t horizon, int dimension, double epsilon,
                        double delta) {
  const double t = static_cast<double>(horizon);
  const double log_d = std::log(static_cast<double>(dimension));
  return std::sqrt(t * log_d) +
         std::cbrt(t) * log_d * std::log(t / delta) /
             std::pow(epsilon, 2.0 / 3.0);
}

int DefaultThreads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

absl::Status ParallelFor(int64_t n, int threads,
                         const std::function<absl::Status(int64_t)>& fn) {
  if (n <= 0) return absl::OkStatus();
  const int workers =
      static_cast<int>(std::min<int64_t>(std::max(1, threads), n));
  std::vector<absl::Status> statuses(n);
  if (workers == 1) {
    for (int64_t i = 0; i < n; ++i) {
      statuses[i] = fn(i);
      if (!statuses[i].ok()) return statuses[i];
    }
    return absl::OkStatus();
  }
  std::atomic<int64_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int64_t i = next++; i < n && !failed; i = next++) {
        statuses[i] = fn(i);
        if (!statuses[i].ok()) failed = true;
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const absl::Status& s : statuses) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

Moments ComputeMoments(std::vector<double> values) {
  Moments m;
  if (values.empty()) return m;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

absl::StatusOr<MonteCarloSummary> MonteCarlo(const MonteCarloOptions& options,
                                             const GameFn& game) {
  if (options.reps < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("reps must be at least 1, got ", options.reps));
  }
  MonteCarloSummary summary;
  summary.reps = options.reps;
  summary.rows.resize(options.reps);
  if (options.keep_results) summary.results.resize(options.reps);

  L2P_RETURN_IF_ERROR(ParallelFor(
      options.reps, options.threads, [&](int64_t rep) -> absl::Status {
        const uint64_t seed =
            MixSeed(options.base_seed, static_cast<uint64_t>(rep));
        L2P_ASSIGN_OR_RETURN(GameResult result, game(rep, seed));
        RepRow& row = summary.rows[rep];
        row.rep = rep;
        row.seed = seed;
        row.horizon = result.transcript.horizon;
        row.batch_size = result.transcript.batch_size;
        row.regret = result.regret;
        row.switches_x = result.switch_count_x;
        row.switches_y = result.switch_count_y;
        row.total_loss = result.total_loss;
        row.comparator_loss = result.comparator_loss;
        if (options.keep_results) summary.results[rep] = std::move(result);
        return absl::OkStatus();
      }));

  std::vector<double> regret, sx, sy, total;
  for (const RepRow& row : summary.rows) {
    regret.push_back(row.regret);
    sx.push_back(static_cast<double>(row.switches_x));
    sy.push_back(static_cast<double>(row.switches_y));
    total.push_back(row.total_loss);
  }
  summary.regret = ComputeMoments(std::move(regret));
  summary.switches_x = ComputeMoments(std::move(sx));
  summary.switches_y = ComputeMoments(std::move(sy));
  summary.total_loss = ComputeMoments(std::move(total));
  return summary;
}

namespace {

void StampConfig(MonteCarloSummary& summary, const L2PConfig& config) {
  for (RepRow& row : summary.rows) {
    row.eta = config.eta;
    row.p = config.p;
  }
}

}  // namespace

absl::StatusOr<MonteCarloSummary> MonteCarlo(const GameSpec& spec,
                                             const LossStream& stream,
                                             const MonteCarloOptions& options) {
  L2P_ASSIGN_OR_RETURN(
      MonteCarloSummary summary,
      MonteCarlo(options, [&](int64_t, uint64_t seed) {
        return PlayGame(spec, stream, seed);
      }));
  StampConfig(summary, spec.config);
  return summary;
}

absl::StatusOr<MonteCarloSummary> MonteCarlo(const GameSpec& spec,
                                             const AdversarySpec& adversary,
                                             const MonteCarloOptions& options) {
  L2P_ASSIGN_OR_RETURN(
      MonteCarloSummary summary,
      MonteCarlo(options,
                 [&](int64_t rep, uint64_t seed) -> absl::StatusOr<GameResult> {
                   AdversarySpec mine = adversary;
                   mine.seed =
                       MixSeed(adversary.seed, static_cast<uint64_t>(rep));
                   L2P_ASSIGN_OR_RETURN(LossStream stream,
                                        GenerateStream(mine));
                   return PlayGame(spec, stream, seed);
                 }));
  StampConfig(summary, spec.config);
  return summary;
}

std::string RepRowsToCsv(const std::vector<RepRow>& rows) {
  std::string out =
      "rep,seed,T,B,eta,p,regret,switches_x,switches_y,total_loss,"
      "comparator_loss\n";
  for (const RepRow& r : rows) {
    absl::StrAppend(&out,
                    absl::StrFormat("%d,%d,%d,%d,%.17g,%.17g,%.17g,%d,%d,"
                                    "%.17g,%.17g\n",
                                    r.rep, r.seed, r.horizon, r.batch_size,
                                    r.eta, r.p, r.regret, r.switches_x,
                                    r.switches_y, r.total_loss,
                                    r.comparator_loss));
  }
  return out;
}

}  // namespace l2p
