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

#include "l2p/audit.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <variant>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "l2p/l2p.h"
#include "l2p/measures.h"
#include "l2p/random.h"
#include "l2p/status_macros.h"

namespace l2p {
namespace {

constexpr int kMaxAuditDimension = 8;
constexpr int64_t kMaxAuditBatches = 10;
constexpr int64_t kMinMarginalRuns = 10000;
constexpr int64_t kMinSwitchResults = 100;

void Finish(AuditReport& report) {
  report.threshold = report.bound + report.slack;
  report.pass = report.statistic <= report.threshold;
}

// Splits `runs` into contiguous chunks, one accumulator per chunk, and merges
// them in chunk order. Replicate seeds depend only on the run index, so the
// result does not depend on the thread count.
template <typename Acc, typename RunFn, typename MergeFn>
absl::StatusOr<Acc> RunChunked(int64_t runs, int threads, const Acc& init,
                               const RunFn& run, const MergeFn& merge) {
  const int64_t chunks =
      std::min<int64_t>(runs, static_cast<int64_t>(std::max(1, threads)) * 4);
  std::vector<Acc> partial(chunks, init);
  L2P_RETURN_IF_ERROR(
      ParallelFor(chunks, threads, [&](int64_t c) -> absl::Status {
        const int64_t lo = runs * c / chunks;
        const int64_t hi = runs * (c + 1) / chunks;
        for (int64_t rep = lo; rep < hi; ++rep) {
          L2P_RETURN_IF_ERROR(run(partial[c], rep));
        }
        return absl::OkStatus();
      }));
  Acc total = init;
  for (const Acc& a : partial) merge(total, a);
  return total;
}

absl::StatusOr<Transcript> RunMw(const L2PConfig& config,
                                 const LossStream& stream, uint64_t seed) {
  L2P_ASSIGN_OR_RETURN(MwMeasure measure,
                       MwMeasure::Create(stream.dimension(), config.eta));
  Rng gen(seed);
  return RunL2P(config, std::move(measure), stream, gen);
}

absl::Status RequireExperts(const LossStream& stream) {
  if (stream.is_linear()) {
    return absl::InvalidArgumentError(
        "this audit needs the multiplicative-weights instantiation");
  }
  return absl::OkStatus();
}

// Multiplicative-weights distribution at the start of batch s.
absl::StatusOr<std::vector<double>> ExactMarginal(const L2PConfig& config,
                                                  const LossStream& stream,
                                                  int64_t s) {
  std::vector<double> cumulative(stream.dimension(), 0.0);
  const int64_t rounds = std::min(stream.horizon(), (s - 1) * config.batch_size);
  for (int64_t t = 0; t < rounds; ++t) {
    const std::span<const double> row = stream.Row(t);
    for (int x = 0; x < stream.dimension(); ++x) cumulative[x] += row[x];
  }
  L2P_ASSIGN_OR_RETURN(MwMeasure measure,
                       MwMeasure::FromCumulativeLoss(config.eta, cumulative));
  return measure.Probabilities();
}

absl::Status CheckMarginalInputs(const L2PConfig& config,
                                 const LossStream& stream,
                                 const AuditOptions& options) {
  L2P_RETURN_IF_ERROR(ValidateConfig(config));
  L2P_RETURN_IF_ERROR(RequireExperts(stream));
  if (config.delta0 != 0.0) {
    return absl::InvalidArgumentError("marginal audit needs delta0 = 0");
  }
  if (stream.dimension() > kMaxAuditDimension) {
    return absl::InvalidArgumentError(absl::StrCat(
        "marginal audit supports d <= ", kMaxAuditDimension, ", got ",
        stream.dimension()));
  }
  if (options.runs < kMinMarginalRuns) {
    return absl::InvalidArgumentError(absl::StrCat(
        "marginal audit needs at least ", kMinMarginalRuns, " runs, got ",
        options.runs));
  }
  return absl::OkStatus();
}

}  // namespace

std::string AuditReportToJson(const AuditReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["samples"] = report.samples;
  j["statistic"] = report.statistic;
  j["bound"] = report.bound;
  j["slack"] = report.slack;
  j["threshold"] = report.threshold;
  j["pass"] = report.pass;
  j["inconclusive"] = report.inconclusive;
  j["notes"] = report.notes;
  return j.dump();
}

absl::StatusOr<std::vector<AuditReport>> MarginalTvByBatch(
    const L2PConfig& config, const LossStream& stream,
    const AuditOptions& options) {
  L2P_RETURN_IF_ERROR(CheckMarginalInputs(config, stream, options));
  const int64_t batches = config.NumBatches();
  if (batches > kMaxAuditBatches) {
    return absl::InvalidArgumentError(absl::StrCat(
        "marginal audit supports at most ", kMaxAuditBatches,
        " batches, got ", batches));
  }
  const int d = stream.dimension();
  using Counts = std::vector<int64_t>;  // batch-major, batches x d
  L2P_ASSIGN_OR_RETURN(
      Counts counts,
      RunChunked(
          options.runs, options.threads, Counts(batches * d, 0),
          [&](Counts& acc, int64_t rep) -> absl::Status {
            L2P_ASSIGN_OR_RETURN(
                Transcript tr,
                RunMw(config, stream,
                      MixSeed(options.base_seed, static_cast<uint64_t>(rep))));
            for (int64_t s = 0; s < batches; ++s) {
              ++acc[s * d + std::get<int>(tr.batches[s].x)];
            }
            return absl::OkStatus();
          },
          [](Counts& total, const Counts& part) {
            for (size_t i = 0; i < total.size(); ++i) total[i] += part[i];
          }));

  std::vector<AuditReport> reports;
  const double n = static_cast<double>(options.runs);
  for (int64_t s = 1; s <= batches; ++s) {
    L2P_ASSIGN_OR_RETURN(std::vector<double> exact,
                         ExactMarginal(config, stream, s));
    double tv = 0.0;
    for (int x = 0; x < d; ++x) {
      tv += std::abs(static_cast<double>(counts[(s - 1) * d + x]) / n -
                     exact[x]);
    }
    AuditReport report;
    report.name = absl::StrCat("marginal_tv_s", s);
    report.samples = options.runs;
    report.statistic = 0.5 * tv;
    report.bound = 0.0;
    report.slack = 3.0 * std::sqrt(static_cast<double>(d) / n);
    Finish(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

absl::StatusOr<AuditReport> MarginalTvTest(const L2PConfig& config,
                                           const LossStream& stream,
                                           int64_t batch_index,
                                           const AuditOptions& options) {
  L2P_RETURN_IF_ERROR(CheckMarginalInputs(config, stream, options));
  if (batch_index < 1 || batch_index > kMaxAuditBatches ||
      batch_index > config.NumBatches()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch index must lie in [1, min(10, ", config.NumBatches(),
        ")], got ", batch_index));
  }
  // Only the first batch_index batches influence x_s.
  L2PConfig truncated = config;
  truncated.horizon = std::min(config.horizon, batch_index * config.batch_size);
  std::vector<double> prefix(
      stream.values().begin(),
      stream.values().begin() + truncated.horizon * stream.dimension());
  L2P_ASSIGN_OR_RETURN(LossStream head,
                       LossStream::FromExpertLosses(stream.dimension(),
                                                    truncated.horizon,
                                                    std::move(prefix)));
  L2P_ASSIGN_OR_RETURN(std::vector<AuditReport> all,
                       MarginalTvByBatch(truncated, head, options));
  AuditReport report = std::move(all[batch_index - 1]);
  report.name = "marginal_tv";
  report.notes.push_back(absl::StrCat("s = ", batch_index));
  return report;
}

absl::StatusOr<AuditReport> RatioRangeCheck(const L2PConfig& config,
                                            const LossStream& stream,
                                            const AuditOptions& options) {
  L2P_RETURN_IF_ERROR(ValidateConfig(config));
  L2P_RETURN_IF_ERROR(RequireExperts(stream));
  if (options.runs < 1) {
    return absl::InvalidArgumentError("runs must be positive");
  }
  const double cap = 2.0 * static_cast<double>(config.batch_size) * config.eta;
  struct Tally {
    int64_t pairs = 0;
    int64_t outside = 0;
  };
  L2P_ASSIGN_OR_RETURN(
      Tally tally,
      RunChunked(
          options.runs, options.threads, Tally{},
          [&](Tally& acc, int64_t rep) -> absl::Status {
            L2P_ASSIGN_OR_RETURN(
                Transcript tr,
                RunMw(config, stream,
                      MixSeed(options.base_seed, static_cast<uint64_t>(rep))));
            for (size_t s = 1; s < tr.batches.size(); ++s) {
              ++acc.pairs;
              if (std::abs(tr.batches[s].log_ratio) > cap) ++acc.outside;
            }
            return absl::OkStatus();
          },
          [](Tally& total, const Tally& part) {
            total.pairs += part.pairs;
            total.outside += part.outside;
          }));

  AuditReport report;
  report.name = "ratio_range";
  report.samples = tally.pairs;
  report.statistic =
      tally.pairs == 0 ? 0.0
                       : static_cast<double>(tally.outside) /
                             static_cast<double>(tally.pairs);
  report.bound = config.delta1;
  report.slack =
      3.0 * std::sqrt(static_cast<double>(config.batch_size) /
                      (static_cast<double>(options.runs) *
                       static_cast<double>(config.horizon)));
  const PreconditionReport pre = CheckPreconditions(config);
  if (!pre.ratio_concentrates) {
    report.notes.push_back(
        "eta B log(1/delta1) / p > 1; the range bound is not claimed here");
  }
  if (tally.pairs == 0) {
    report.inconclusive = true;
    report.notes.push_back("single batch; no ratios to check");
  }
  Finish(report);
  return report;
}

absl::StatusOr<AuditReport> EmpiricalEpsilon(
    const L2PConfig& config, const LossStream& stream,
    const LossStream& neighbor, double accountant_epsilon,
    const EpsilonAuditOptions& options) {
  L2P_RETURN_IF_ERROR(ValidateConfig(config));
  L2P_RETURN_IF_ERROR(RequireExperts(stream));
  L2P_RETURN_IF_ERROR(RequireExperts(neighbor));
  if (stream.dimension() != 2 || neighbor.dimension() != 2) {
    return absl::InvalidArgumentError("empirical epsilon needs d = 2");
  }
  if (config.horizon > 20 || config.batch_size > 2) {
    return absl::InvalidArgumentError(
        "empirical epsilon needs T <= 20 and B <= 2");
  }
  if (neighbor.horizon() != stream.horizon()) {
    return absl::InvalidArgumentError("streams differ in length");
  }
  const int64_t runs = options.run.runs;
  if (runs < 1 || options.min_bucket_count < 1) {
    return absl::InvalidArgumentError("runs and min_bucket_count must be >= 1");
  }

  // Key: x switch bits of batches 2..S, then the final expert in bit 0.
  using Buckets = std::map<uint64_t, int64_t>;
  const auto bucket_of = [](const Transcript& tr) {
    uint64_t key = 0;
    for (size_t s = 1; s < tr.batches.size(); ++s) {
      key = (key << 1) | (tr.batches[s].switched_x ? 1u : 0u);
    }
    return (key << 1) |
           static_cast<uint64_t>(std::get<int>(tr.batches.back().x));
  };
  const auto tally = [&](const LossStream& s,
                         uint64_t offset) -> absl::StatusOr<Buckets> {
    return RunChunked(
        runs, options.run.threads, Buckets{},
        [&](Buckets& acc, int64_t rep) -> absl::Status {
          L2P_ASSIGN_OR_RETURN(
              Transcript tr,
              RunMw(config, s,
                    MixSeed(options.run.base_seed,
                            offset + static_cast<uint64_t>(rep))));
          ++acc[bucket_of(tr)];
          return absl::OkStatus();
        },
        [](Buckets& total, const Buckets& part) {
          for (const auto& [k, v] : part) total[k] += v;
        });
  };
  L2P_ASSIGN_OR_RETURN(Buckets a, tally(stream, 0));
  L2P_ASSIGN_OR_RETURN(Buckets b, tally(neighbor, static_cast<uint64_t>(runs)));

  const double n = static_cast<double>(runs);
  const double z2 = options.wilson_z * options.wilson_z;
  const auto wilson = [&](int64_t c) {
    return (static_cast<double>(c) + z2 / 2.0) / (n + z2);
  };
  AuditReport report;
  report.name = "empirical_epsilon";
  report.samples = 2 * runs;
  report.bound = accountant_epsilon;
  int qualifying = 0;
  double best = -1.0;
  double best_se = 0.0;
  uint64_t best_key = 0;
  for (const auto& [key, ca] : a) {
    const auto it = b.find(key);
    if (it == b.end()) continue;
    const int64_t cb = it->second;
    if (ca < options.min_bucket_count || cb < options.min_bucket_count) {
      continue;
    }
    ++qualifying;
    const double pa = wilson(ca);
    const double pb = wilson(cb);
    const double eps = std::abs(std::log(pa / pb));
    if (eps > best) {
      best = eps;
      best_key = key;
      best_se = std::sqrt((1.0 - pa) / (n * pa) + (1.0 - pb) / (n * pb));
    }
  }
  if (qualifying == 0) {
    report.inconclusive = true;
    report.statistic = 0.0;
    report.notes.push_back(absl::StrCat("no bucket reached ",
                                        options.min_bucket_count,
                                        " hits under both streams"));
  } else {
    report.statistic = best;
    report.slack = 3.0 * best_se;
    report.notes.push_back(absl::StrCat(qualifying, " qualifying buckets"));
    report.notes.push_back(absl::StrFormat("maximizing bucket key %d", best_key));
  }
  Finish(report);
  return report;
}

absl::StatusOr<AuditReport> SwitchStatistics(
    std::span<const GameResult> results, const L2PConfig& config,
    std::optional<double> slack) {
  if (static_cast<int64_t>(results.size()) < kMinSwitchResults) {
    return absl::InvalidArgumentError(absl::StrCat(
        "switch statistics need at least ", kMinSwitchResults,
        " results, got ", results.size()));
  }
  L2P_RETURN_IF_ERROR(ValidateConfig(config));
  const double limit = 2.0 * static_cast<double>(config.horizon) * config.p *
                       std::log(1.0 / config.delta1) /
                       static_cast<double>(config.batch_size);
  int64_t over = 0;
  for (const GameResult& r : results) {
    if (static_cast<double>(r.transcript.FakeSwitchCount()) > limit) ++over;
  }
  const double n = static_cast<double>(results.size());
  AuditReport report;
  report.name = "switch_statistics";
  report.samples = static_cast<int64_t>(results.size());
  report.statistic = static_cast<double>(over) / n;
  report.bound = config.delta1;
  report.slack = slack.value_or(
      3.0 * std::sqrt(config.delta1 * (1.0 - config.delta1) / n));
  report.notes.push_back(
      absl::StrFormat("fake-switch limit 2 T p log(1/delta1) / B = %.6g", limit));
  Finish(report);
  return report;
}

}  // namespace l2p
