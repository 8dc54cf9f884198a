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

#include "l2p/accountant.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "l2p/measures.h"

namespace l2p {
namespace {

constexpr double kMaxTunedP = 1.0 - 1e-9;

// Largest delta1 <= delta / slots with slots * delta1 <= delta in floating
// point.
double SplitDelta(double delta, double slots) {
  double d1 = delta / slots;
  while (d1 > 0.0 && slots * d1 > delta) d1 = std::nextafter(d1, 0.0);
  return d1;
}

absl::Status CheckCompositionInputs(std::span<const double> epsilons,
                                    std::span<const double> deltas,
                                    double tilde_delta) {
  if (epsilons.size() != deltas.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", epsilons.size(), " epsilons and ", deltas.size(),
                     " deltas"));
  }
  if (!(tilde_delta > 0.0 && tilde_delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("tilde_delta must lie in (0, 1), got ", tilde_delta));
  }
  for (size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] >= 0.0) || !std::isfinite(epsilons[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon[", i, "] = ", epsilons[i], " is invalid"));
    }
    if (!(deltas[i] >= 0.0 && deltas[i] < 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("delta[", i, "] = ", deltas[i], " is outside [0, 1)"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

PrivacyBudget L2PPrivacy(double eta, double p, int64_t horizon,
                         int64_t batch_size, double delta0, double delta1) {
  L2PConfig config;
  config.horizon = horizon;
  config.batch_size = batch_size;
  config.eta = eta;
  config.p = p;
  config.delta0 = delta0;
  config.delta1 = delta1;
  return L2PPrivacy(config);
}

PrivacyBudget L2PPrivacy(const L2PConfig& config) {
  PrivacyBudget budget;
  const absl::Status valid = ValidateConfig(config);
  if (!valid.ok()) {
    budget.preconditions_met = false;
    budget.notes.push_back(std::string(valid.message()));
  }
  PreconditionReport report = CheckPreconditions(config);
  if (!report.ok()) budget.preconditions_met = false;
  for (std::string& w : report.warnings) budget.notes.push_back(std::move(w));

  const double eta = config.eta;
  const double p = config.p;
  const double t = static_cast<double>(config.horizon);
  const double b = static_cast<double>(config.batch_size);
  const double log_inv_d1 = std::log(1.0 / config.delta1);

  budget.epsilon = 2.0 * eta / p + eta +
                   3.0 * t * eta * eta * p * log_inv_d1 / (2.0 * b) +
                   std::sqrt(6.0 * t * eta * eta * p * log_inv_d1 *
                             log_inv_d1 / b);

  double delta = 2.0 * t * config.delta1;
  if (config.delta0 > 0.0) {
    delta += 2.0 * t * (2.0 / eta + log_inv_d1 / p) * std::numbers::e * b *
             config.delta0;
  }
  if (delta > 1.0) {
    budget.notes.push_back(
        absl::StrFormat("delta bound %.6g exceeds 1; reported as 1", delta));
    delta = 1.0;
  }
  budget.delta = delta;
  return budget;
}

absl::StatusOr<CompositionBudget> AdvancedComposition(
    std::span<const double> epsilons, std::span<const double> deltas,
    double tilde_delta) {
  const absl::Status status =
      CheckCompositionInputs(epsilons, deltas, tilde_delta);
  if (!status.ok()) return status;

  CompositionBudget out;
  if (epsilons.empty()) {
    out.budget.delta = tilde_delta;
    return out;
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  double keep = 1.0 - tilde_delta;
  for (size_t i = 0; i < epsilons.size(); ++i) {
    sum += epsilons[i];
    sum_sq += epsilons[i] * epsilons[i];
    keep *= 1.0 - deltas[i];
  }
  const double first = std::sqrt(
      2.0 * sum_sq * std::log(std::numbers::e + std::sqrt(sum_sq) / tilde_delta));
  const double second = std::sqrt(2.0 * sum_sq * std::log(1.0 / tilde_delta));
  out.budget.epsilon = sum + std::min(first, second);
  out.budget.delta = 1.0 - keep;
  out.epsilon_floor = std::min(out.budget.epsilon, sum);
  return out;
}

absl::StatusOr<CompositionBudget> ModifiedAdvancedComposition(
    std::span<const double> epsilons, std::span<const double> deltas,
    double tilde_delta, std::span<const double> lambdas) {
  double slack = 0.0;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0 && lambdas[i] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("lambda[", i, "] = ", lambdas[i], " is outside [0, 1]"));
    }
    slack += lambdas[i];
  }
  absl::StatusOr<CompositionBudget> out =
      AdvancedComposition(epsilons, deltas, tilde_delta);
  if (!out.ok()) return out.status();
  out->budget.delta += 2.0 * slack;
  return out;
}

absl::StatusOr<PrivacyBudget> GroupPrivacy(double epsilon, double delta,
                                           int64_t k) {
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("group size must be at least 1, got ", k));
  }
  if (!(epsilon >= 0.0) || !(delta >= 0.0 && delta <= 1.0)) {
    return absl::InvalidArgumentError("epsilon must be >= 0, delta in [0, 1]");
  }
  PrivacyBudget out;
  const double kd = static_cast<double>(k);
  out.epsilon = kd * epsilon;
  out.delta = kd * std::exp((kd - 1.0) * epsilon) * delta;
  return out;
}

absl::StatusOr<PrivacyBudget> CdpToApprox(double rho, double delta) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must lie in (0, 1], got ", rho));
  }
  if (!(delta > 0.0 && delta < 0.25)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1/4), got ", delta));
  }
  PrivacyBudget out;
  out.epsilon = 3.0 * std::sqrt(rho * std::log(1.0 / delta));
  out.delta = delta;
  return out;
}

absl::StatusOr<TunedConfig> TuneOpe(int64_t horizon, int dimension,
                                    double epsilon, double delta) {
  if (horizon < 1 || dimension < 2) {
    return absl::InvalidArgumentError("tuning needs T >= 1 and d >= 2");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  const double t = static_cast<double>(horizon);
  const double eps0 =
      std::pow(t, -0.25) * std::pow(std::log(static_cast<double>(dimension)),
                                    0.75);
  double eta = std::pow(std::min(eps0, epsilon), 2.0 / 3.0) /
               (std::cbrt(t) * std::log(t / delta));
  eta = std::min(eta, kMaxEta);

  L2PConfig config;
  config.horizon = horizon;
  config.batch_size =
      std::max<int64_t>(1, static_cast<int64_t>(std::llround(1.0 / epsilon)));
  config.delta0 = 0.0;
  config.delta1 = SplitDelta(delta, 2.0 * t);

  std::string last_failure;
  for (int shrinks = 0; shrinks <= kMaxTunerShrinks; ++shrinks) {
    config.eta = eta;
    config.p = std::min(10.0 * eta / epsilon, kMaxTunedP);
    PrivacyBudget budget = L2PPrivacy(config);
    const double fake = t * config.p / static_cast<double>(config.batch_size);
    if (fake >= 1.0 && budget.epsilon <= epsilon && budget.delta <= delta) {
      return TunedConfig{config, std::move(budget), shrinks};
    }
    last_failure = absl::StrFormat(
        "eta=%.6g p=%.6g B=%d: T p / B = %.6g, eps = %.6g, delta = %.6g", eta,
        config.p, config.batch_size, fake, budget.epsilon, budget.delta);
    eta /= 2.0;
  }
  return absl::FailedPreconditionError(absl::StrCat(
      "no feasible experts configuration after ", kMaxTunerShrinks,
      " shrinks; last attempt ", last_failure));
}

absl::StatusOr<OcoTuning> TuneOco(int64_t horizon, int dimension,
                                  double epsilon, double delta,
                                  double lipschitz, double diameter) {
  if (horizon < 1 || dimension < 1) {
    return absl::InvalidArgumentError("tuning needs T >= 1 and d >= 1");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (!(lipschitz > 0.0) || !(diameter > 0.0)) {
    return absl::InvalidArgumentError("L and D must be positive");
  }
  const double t = static_cast<double>(horizon);
  const double d = static_cast<double>(dimension);
  const double l2 = lipschitz * lipschitz;

  double eta = std::min(kMaxEta, std::pow(epsilon, 2.0 / 3.0) /
                                     (std::cbrt(t) * std::log(t / delta)));

  L2PConfig config;
  config.horizon = horizon;
  config.batch_size = std::max<int64_t>(
      1, static_cast<int64_t>(
             std::llround(1.0 / (2.0 * epsilon * std::log(1.0 / delta)))));
  config.delta1 = SplitDelta(delta, 4.0 * t);
  const double b = static_cast<double>(config.batch_size);
  const double log_inv_d1 = std::log(1.0 / config.delta1);
  const auto delta0_for = [&](double accounted_eta, double p) {
    return delta / (8.0 * t * (2.0 / accounted_eta + log_inv_d1 / p) *
                    std::numbers::e * b);
  };

  std::string last_failure;
  for (int shrinks = 0; shrinks <= kMaxTunerShrinks; ++shrinks) {
    OcoTuning out;
    out.nominal_eta = eta;
    out.lipschitz = lipschitz;
    out.radius = diameter / 2.0;
    out.lambda = (lipschitz / diameter) *
                 std::max(std::sqrt(t), std::sqrt(d * std::log(t)) / eta);
    const double p = std::min(4.0 * eta / epsilon, kMaxTunedP);

    // beta_cap is the beta at which the divergence bound equals eta: with
    // u = sqrt(beta L^2 / lambda), 2u^2 + c u = eta, c = sqrt(8 log(2/d0)).
    double delta0 = delta0_for(eta, p);
    const double c = std::sqrt(8.0 * std::log(2.0 / delta0));
    const double u = (-c + std::sqrt(c * c + 8.0 * eta)) / 4.0;
    const double beta_cap = u * u * out.lambda / l2;
    out.beta = std::min(eta * eta * out.lambda / (20.0 * l2), beta_cap);

    absl::StatusOr<double> accounted =
        EffectiveEtaRmw(out.beta, out.lambda, lipschitz, delta0);
    if (!accounted.ok()) return accounted.status();
    // Re-target delta0 at the accounted eta; this only shrinks delta0.
    delta0 = std::min(delta0, delta0_for(*accounted, p));
    accounted = EffectiveEtaRmw(out.beta, out.lambda, lipschitz, delta0);
    if (!accounted.ok()) return accounted.status();

    config.eta = *accounted;
    config.p = p;
    config.delta0 = delta0;
    out.config = config;
    out.budget = L2PPrivacy(config);
    out.shrinks = shrinks;
    const double fake = t * p / b;
    if (config.eta <= kMaxEta && fake >= 1.0 &&
        out.budget.epsilon <= epsilon && out.budget.delta <= delta) {
      return out;
    }
    last_failure = absl::StrFormat(
        "eta=%.6g eta'=%.6g p=%.6g B=%d: T p / B = %.6g, eps = %.6g, "
        "delta = %.6g",
        eta, config.eta, p, config.batch_size, fake, out.budget.epsilon,
        out.budget.delta);
    eta /= 2.0;
  }
  return absl::FailedPreconditionError(absl::StrCat(
      "no feasible OCO configuration after ", kMaxTunerShrinks,
      " shrinks; last attempt ", last_failure));
}

}  // namespace l2p
