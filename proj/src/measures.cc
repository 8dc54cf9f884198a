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

#include "l2p/measures.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace l2p {

absl::Status ValidateExpertLosses(std::span<const double> loss,
                                  int dimension) {
  if (static_cast<int>(loss.size()) != dimension) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "loss has dimension %d, expected %d", loss.size(), dimension));
  }
  for (size_t i = 0; i < loss.size(); ++i) {
    if (!(loss[i] >= 0.0 && loss[i] <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "loss[%d] = %g is outside [0, 1]", i, loss[i]));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateGradient(std::span<const double> gradient, int dimension,
                              double lipschitz) {
  if (static_cast<int>(gradient.size()) != dimension) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "gradient has dimension %d, expected %d", gradient.size(), dimension));
  }
  for (double g : gradient) {
    if (!std::isfinite(g)) {
      return absl::InvalidArgumentError("gradient has a non-finite entry");
    }
  }
  const double norm = Norm(gradient);
  if (norm > lipschitz * (1.0 + kLipschitzSlack)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "gradient norm %g exceeds Lipschitz bound %g", norm, lipschitz));
  }
  return absl::OkStatus();
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

std::string FormatDomainPoint(const DomainPoint& point) {
  if (const int* expert = std::get_if<int>(&point)) {
    return absl::StrCat(*expert);
  }
  const auto& coords = std::get<std::vector<double>>(point);
  return absl::StrJoin(coords, ",", [](std::string* out, double v) {
    absl::StrAppendFormat(out, "%.17g", v);
  });
}

absl::StatusOr<LossVector> LossVector::Create(std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("loss vector must be non-empty");
  }
  absl::Status status =
      ValidateExpertLosses(values, static_cast<int>(values.size()));
  if (!status.ok()) return status;
  return LossVector(std::move(values));
}

absl::StatusOr<LinearLoss> LinearLoss::Create(std::vector<double> gradient,
                                              double lipschitz) {
  if (gradient.empty()) {
    return absl::InvalidArgumentError("gradient must be non-empty");
  }
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    return absl::InvalidArgumentError("Lipschitz bound must be positive");
  }
  absl::Status status = ValidateGradient(
      gradient, static_cast<int>(gradient.size()), lipschitz);
  if (!status.ok()) return status;
  return LinearLoss(std::move(gradient), lipschitz);
}

// ---------------------------------------------------------------------------
// MwMeasure

namespace {

absl::Status ValidateEta(double eta) {
  if (!(eta > 0.0 && eta <= kMaxEta)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eta = %g is outside (0, %g]", eta, kMaxEta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<MwMeasure> MwMeasure::Create(int dimension, double eta) {
  if (dimension < 1) {
    return absl::InvalidArgumentError("need at least one expert");
  }
  absl::Status status = ValidateEta(eta);
  if (!status.ok()) return status;
  return MwMeasure(eta, std::vector<double>(dimension, 0.0));
}

absl::StatusOr<MwMeasure> MwMeasure::FromCumulativeLoss(
    double eta, std::vector<double> cumulative_loss) {
  if (cumulative_loss.empty()) {
    return absl::InvalidArgumentError("need at least one expert");
  }
  absl::Status status = ValidateEta(eta);
  if (!status.ok()) return status;
  for (double c : cumulative_loss) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      return absl::InvalidArgumentError(
          "cumulative losses must be finite and non-negative");
    }
  }
  return MwMeasure(eta, std::move(cumulative_loss));
}

absl::Status MwMeasure::Update(std::span<const double> loss) {
  absl::Status status = ValidateExpertLosses(loss, dimension());
  if (!status.ok()) return status;
  for (size_t i = 0; i < loss.size(); ++i) cumulative_loss_[i] += loss[i];
  ++num_updates_;
  return absl::OkStatus();
}

std::vector<double> MwMeasure::LogWeights() const {
  std::vector<double> out(cumulative_loss_.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = LogMass(static_cast<int>(i));
  return out;
}

std::vector<double> MwMeasure::Probabilities() const {
  std::vector<double> out = LogWeights();
  const double max_log = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - max_log);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

absl::Status MwMeasure::ValidatePoint(int x) const {
  if (x < 0 || x >= dimension()) {
    return absl::OutOfRangeError(
        absl::StrFormat("expert %d outside [0, %d)", x, dimension()));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> LogBatchRatio(const MwMeasure& prev,
                                     const MwMeasure& cur, int x) {
  if (prev.dimension() != cur.dimension()) {
    return absl::InvalidArgumentError("measures differ in dimension");
  }
  if (prev.eta() != cur.eta()) {
    return absl::InvalidArgumentError("measures differ in eta");
  }
  if (cur.num_updates() < prev.num_updates()) {
    return absl::InvalidArgumentError("current measure precedes previous");
  }
  absl::Status status = cur.ValidatePoint(x);
  if (!status.ok()) return status;
  return -cur.eta() * (cur.cumulative_loss()[x] - prev.cumulative_loss()[x]);
}

// ---------------------------------------------------------------------------
// RmwMeasure

absl::StatusOr<RmwMeasure> RmwMeasure::Create(int dimension, double beta,
                                              double lambda, double radius,
                                              double lipschitz) {
  if (dimension < 1) {
    return absl::InvalidArgumentError("dimension must be positive");
  }
  for (double v : {beta, lambda, radius, lipschitz}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError(
          "beta, lambda, radius and Lipschitz bound must be positive");
    }
  }
  return RmwMeasure(beta, lambda, radius, lipschitz, dimension);
}

absl::Status RmwMeasure::Update(std::span<const double> gradient) {
  absl::Status status = ValidateGradient(gradient, dimension(), lipschitz_);
  if (!status.ok()) return status;
  for (size_t i = 0; i < gradient.size(); ++i) gradient_sum_[i] += gradient[i];
  ++num_updates_;
  return absl::OkStatus();
}

absl::Status RmwMeasure::Update(const LinearLoss& loss) {
  return Update(loss.gradient());
}

double RmwMeasure::LogMass(std::span<const double> x) const {
  return -beta_ * (Dot(gradient_sum_, x) + lambda_ * Dot(x, x));
}

std::vector<double> RmwMeasure::GaussianMean() const {
  std::vector<double> mean(gradient_sum_.size());
  for (size_t i = 0; i < mean.size(); ++i) {
    mean[i] = -gradient_sum_[i] / (2.0 * lambda_);
  }
  return mean;
}

double RmwMeasure::GaussianStddev() const {
  return 1.0 / std::sqrt(2.0 * beta_ * lambda_);
}

absl::Status RmwMeasure::ValidatePoint(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension()) {
    return absl::InvalidArgumentError("point has the wrong dimension");
  }
  if (Norm(x) > radius_ * (1.0 + 1e-12)) {
    return absl::OutOfRangeError("point lies outside the ball");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> LogBatchRatio(const RmwMeasure& prev,
                                     const RmwMeasure& cur,
                                     const std::vector<double>& x) {
  if (prev.dimension() != cur.dimension()) {
    return absl::InvalidArgumentError("measures differ in dimension");
  }
  if (prev.beta() != cur.beta() || prev.lambda() != cur.lambda()) {
    return absl::InvalidArgumentError("measures differ in beta or lambda");
  }
  if (cur.num_updates() < prev.num_updates()) {
    return absl::InvalidArgumentError("current measure precedes previous");
  }
  if (static_cast<int>(x.size()) != cur.dimension()) {
    return absl::InvalidArgumentError("point has the wrong dimension");
  }
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    s += (cur.gradient_sum()[i] - prev.gradient_sum()[i]) * x[i];
  }
  return -cur.beta() * s;
}

absl::StatusOr<double> EffectiveEtaRmw(double beta, double lambda,
                                       double lipschitz, double delta0) {
  if (!(beta > 0.0) || !(lambda > 0.0) || !(lipschitz > 0.0)) {
    return absl::InvalidArgumentError(
        "beta, lambda and Lipschitz bound must be positive");
  }
  if (!(delta0 > 0.0 && delta0 < 1.0)) {
    return absl::InvalidArgumentError("delta0 must lie in (0, 1)");
  }
  const double l2 = lipschitz * lipschitz;
  return 2.0 * beta * l2 / lambda +
         std::sqrt(8.0 * beta * l2 * std::log(2.0 / delta0) / lambda);
}

}  // namespace l2p
