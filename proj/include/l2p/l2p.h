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

// The lazy-to-private transformation.
//
// Rounds are grouped into batches of B. Let nu_s be the wrapped measure at the
// start of batch s. Batch 1 plays x_1 ~ nu_1 and draws an independent
// reference point y_1 ~ nu_1. For s >= 2:
//
//   S_s  ~ Ber(min(1, r_s e^{-2 B eta})), where
//          r_s = nu_s(x_{s-1}) / nu_{s-1}(x_{s-1}) * nu_{s-1}(y_{s-1}) / nu_s(y_{s-1})
//   S'_s ~ Ber(1 - p)
//   x_s  ~ nu_s if S_s = 0 or S'_s = 0, else x_s = x_{s-1}
//   A_s  ~ Ber(1 - p)
//   y_s  ~ nu_s if A_s = 0, else y_s = y_{s-1}
//
// r_s only involves unnormalized ratios, so it depends on the losses of batch
// s - 1 alone. Each batch consumes the generator in the order S_s, S'_s,
// A_s, then the x_s draw (if any), then the y_s draw (if any).

#ifndef L2P_L2P_H_
#define L2P_L2P_H_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "l2p/l2p_config.h"
#include "l2p/loss_stream.h"
#include "l2p/measures.h"
#include "l2p/random.h"

namespace l2p {

template <typename M>
concept LazyMeasure =
    std::copyable<M> &&
    requires(M m, const M& cm, std::span<const double> row,
             const typename M::Point& x, Rng& gen) {
      { m.Update(row) } -> std::same_as<absl::Status>;
      { LogBatchRatio(cm, cm, x) } -> std::same_as<absl::StatusOr<double>>;
      { cm.Sample(gen) } -> std::same_as<absl::StatusOr<typename M::Point>>;
      { M::IncurredLoss(row, x) } -> std::convertible_to<double>;
      { M::kLinearLosses } -> std::convertible_to<bool>;
    };

struct Coins {
  bool s = true;
  bool s_prime = true;
  bool a = true;
};

struct BatchRecord {
  int64_t s = 1;  // 1-based batch index
  DomainPoint x;
  DomainPoint y;
  std::optional<Coins> coins;  // absent for s = 1
  bool switched_x = false;     // S_s = 0 or S'_s = 0
  bool switched_y = false;     // A_s = 0
  double acceptance = 1.0;     // P(S_s = 1)
  double log_ratio = 0.0;      // log r_s, before deflation and clipping
  double batch_loss = 0.0;
};

struct Transcript {
  int64_t horizon = 0;
  int64_t batch_size = 0;
  std::vector<BatchRecord> batches;
  std::vector<double> round_losses;

  double TotalLoss() const;
  int64_t SwitchCountX() const;
  int64_t SwitchCountY() const;
  // Batches with A_s = 0 or S'_s = 0.
  int64_t FakeSwitchCount() const;
};

// Columns s,x,S,Sprime,A,switched_x,switched_y,batch_loss. Coins are empty
// for s = 1; OCO points are comma-joined inside quotes.
std::string TranscriptToCsv(const Transcript& transcript);

template <LazyMeasure M>
DomainPoint ToDomainPoint(const typename M::Point& point) {
  return DomainPoint(point);
}

// log r_s for the pair (x_prev, y_prev).
template <LazyMeasure M>
absl::StatusOr<double> LogCorrelatedRatio(const M& prev, const M& cur,
                                          const typename M::Point& x_prev,
                                          const typename M::Point& y_prev) {
  absl::StatusOr<double> lx = LogBatchRatio(prev, cur, x_prev);
  if (!lx.ok()) return lx.status();
  absl::StatusOr<double> ly = LogBatchRatio(prev, cur, y_prev);
  if (!ly.ok()) return ly.status();
  return *lx - *ly;
}

// min(1, r_s e^{-2 B eta}), exponentiated once from log space.
template <LazyMeasure M>
absl::StatusOr<double> AcceptanceProbability(const M& prev, const M& cur,
                                             const typename M::Point& x_prev,
                                             const typename M::Point& y_prev,
                                             int64_t batch_size, double eta) {
  absl::StatusOr<double> log_ratio =
      LogCorrelatedRatio(prev, cur, x_prev, y_prev);
  if (!log_ratio.ok()) return log_ratio.status();
  const double log_acceptance =
      *log_ratio - 2.0 * static_cast<double>(batch_size) * eta;
  return std::exp(std::min(0.0, log_acceptance));
}

template <LazyMeasure M>
struct ChainState {
  typename M::Point x;
  typename M::Point y;
  M prev;  // nu_{s-1}
};

// Advances the chain from batch s - 1 to batch s, where `cur` is nu_s.
// On return chain.prev == cur. The record has no batch loss yet.
template <LazyMeasure M, BitGenerator64 G>
absl::StatusOr<BatchRecord> L2PStep(ChainState<M>& chain, const M& cur,
                                    const L2PConfig& config, int64_t s,
                                    G& gen) {
  absl::StatusOr<double> log_ratio =
      LogCorrelatedRatio(chain.prev, cur, chain.x, chain.y);
  if (!log_ratio.ok()) return log_ratio.status();

  BatchRecord record;
  record.s = s;
  record.log_ratio = *log_ratio;
  record.acceptance = std::exp(std::min(
      0.0, *log_ratio - 2.0 * static_cast<double>(config.batch_size) *
                            config.eta));

  Coins coins;
  coins.s = BernoulliCoin(gen, record.acceptance);
  coins.s_prime = BernoulliCoin(gen, 1.0 - config.p);
  coins.a = BernoulliCoin(gen, 1.0 - config.p);
  if (!coins.s || !coins.s_prime) {
    absl::StatusOr<typename M::Point> x = cur.Sample(gen);
    if (!x.ok()) return x.status();
    chain.x = *std::move(x);
    record.switched_x = true;
  }
  if (!coins.a) {
    absl::StatusOr<typename M::Point> y = cur.Sample(gen);
    if (!y.ok()) return y.status();
    chain.y = *std::move(y);
    record.switched_y = true;
  }
  record.coins = coins;
  record.x = ToDomainPoint<M>(chain.x);
  record.y = ToDomainPoint<M>(chain.y);
  chain.prev = cur;
  return record;
}

// Runs the transformation over `stream` starting from `initial` (nu_1).
template <LazyMeasure M, BitGenerator64 G>
absl::StatusOr<Transcript> RunL2P(const L2PConfig& config, M initial,
                                  const LossStream& stream, G& gen) {
  absl::Status status = ValidateConfig(config);
  if (!status.ok()) return status;
  if (stream.horizon() != config.horizon) {
    return absl::InvalidArgumentError(
        absl::StrCat("stream has ", stream.horizon(), " rounds, config has ",
                     config.horizon));
  }
  if (stream.is_linear() != M::kLinearLosses) {
    return absl::InvalidArgumentError(
        "stream loss type does not match the measure");
  }

  const auto with_batch = [](const absl::Status& s, int64_t batch) {
    return absl::Status(s.code(),
                        absl::StrCat("batch ", batch, ": ", s.message()));
  };

  Transcript transcript;
  transcript.horizon = config.horizon;
  transcript.batch_size = config.batch_size;
  transcript.batches.reserve(config.NumBatches());
  transcript.round_losses.reserve(config.horizon);

  M cur = std::move(initial);
  absl::StatusOr<typename M::Point> x1 = cur.Sample(gen);
  if (!x1.ok()) return with_batch(x1.status(), 1);
  absl::StatusOr<typename M::Point> y1 = cur.Sample(gen);
  if (!y1.ok()) return with_batch(y1.status(), 1);
  ChainState<M> chain{*std::move(x1), *std::move(y1), cur};

  for (int64_t s = 1; s <= config.NumBatches(); ++s) {
    BatchRecord record;
    if (s == 1) {
      record.x = ToDomainPoint<M>(chain.x);
      record.y = ToDomainPoint<M>(chain.y);
    } else {
      absl::StatusOr<BatchRecord> stepped = L2PStep(chain, cur, config, s, gen);
      if (!stepped.ok()) return with_batch(stepped.status(), s);
      record = *std::move(stepped);
    }
    const int64_t begin = (s - 1) * config.batch_size;
    const int64_t end = std::min(config.horizon, s * config.batch_size);
    for (int64_t t = begin; t < end; ++t) {
      const std::span<const double> row = stream.Row(t);
      const double loss = M::IncurredLoss(row, chain.x);
      transcript.round_losses.push_back(loss);
      record.batch_loss += loss;
      status = cur.Update(row);
      if (!status.ok()) return with_batch(status, s);
    }
    transcript.batches.push_back(std::move(record));
  }
  return transcript;
}

}  // namespace l2p

#endif  // L2P_L2P_H_
