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

// Privacy arithmetic. Every function here is pure.

#ifndef L2P_ACCOUNTANT_H_
#define L2P_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "l2p/l2p_config.h"

namespace l2p {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  bool preconditions_met = true;
  std::vector<std::string> notes;
};

// The (epsilon, delta) guarantee of the transformation:
//   eps   = 2 eta / p + eta + 3 T eta^2 p log(1/d1) / (2B)
//           + sqrt(6 T eta^2 p log^2(1/d1) / B)
//   delta = 2 T (2 / eta + log(1/d1) / p) e B d0 + 2 T d1
// Never fails. Out-of-range inputs, and configurations outside the regime
// where the bound is proven, clear preconditions_met and add notes.
PrivacyBudget L2PPrivacy(double eta, double p, int64_t horizon,
                         int64_t batch_size, double delta0, double delta1);
PrivacyBudget L2PPrivacy(const L2PConfig& config);

struct CompositionBudget {
  PrivacyBudget budget;
  // min(budget.epsilon, sum of epsilons); basic composition is also valid.
  double epsilon_floor = 0.0;
};

// eps~ = sum eps_t + min(sqrt(2 sum eps_t^2 log(e + sqrt(sum eps_t^2) / d~)),
//                        sqrt(2 sum eps_t^2 log(1 / d~)))
// delta = 1 - (1 - d~) prod (1 - delta_t).
absl::StatusOr<CompositionBudget> AdvancedComposition(
    std::span<const double> epsilons, std::span<const double> deltas,
    double tilde_delta);

// AdvancedComposition with 2 * sum(lambdas) added to delta.
absl::StatusOr<CompositionBudget> ModifiedAdvancedComposition(
    std::span<const double> epsilons, std::span<const double> deltas,
    double tilde_delta, std::span<const double> lambdas);

// (k eps, k e^{(k-1) eps} delta) for groups of k records.
absl::StatusOr<PrivacyBudget> GroupPrivacy(double epsilon, double delta,
                                           int64_t k);

// rho-zCDP implies (3 sqrt(rho log(1/delta)), delta)-DP. rho in (0, 1] and
// delta in (0, 1/4).
absl::StatusOr<PrivacyBudget> CdpToApprox(double rho, double delta);

// Upper bound on the number of eta halvings the tuners attempt.
inline constexpr int kMaxTunerShrinks = 10;

struct TunedConfig {
  L2PConfig config;
  PrivacyBudget budget;
  int shrinks = 0;
};

// Experts tuning: B = max(1, round(1/eps)), p = 10 eta / eps,
// eta = min(eps0, eps)^{2/3} / (T^{1/3} log(T/delta)) with
// eps0 = T^{-1/4} log(d)^{3/4}, delta0 = 0 and delta1 = delta / (2T).
// eta is halved until T p / B >= 1 and the budget fits the target; the
// returned budget may still carry soft precondition notes.
// FailedPrecondition if no attempt fits.
absl::StatusOr<TunedConfig> TuneOpe(int64_t horizon, int dimension,
                                    double epsilon, double delta);

struct OcoTuning {
  // config.eta is the accounted divergence eta' of the RMW measure.
  L2PConfig config;
  double nominal_eta = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double radius = 0.0;
  double lipschitz = 0.0;
  PrivacyBudget budget;
  int shrinks = 0;
};

// Linear-loss OCO tuning on the ball of diameter D. See README for the
// parameter choices.
absl::StatusOr<OcoTuning> TuneOco(int64_t horizon, int dimension,
                                  double epsilon, double delta,
                                  double lipschitz, double diameter);

}  // namespace l2p

#endif  // L2P_ACCOUNTANT_H_
