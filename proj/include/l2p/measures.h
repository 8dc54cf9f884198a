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

// Lazy measures consumed by the L2P transformation.
//
// A lazy measure is an unnormalized density mu_t over the decision set whose
// one-step ratio mu_{t+1}(x) / mu_t(x) depends only on the newest loss. Two
// instantiations are provided:
//
//  * MwMeasure: multiplicative weights over d experts,
//      mu_t(x) = exp(-eta * sum_{i<t} loss_i(x)).
//  * RmwMeasure: regularized multiplicative weights over the Euclidean ball
//    of radius R, restricted to linear losses loss_i(x) = <g_i, x>,
//      mu_t(x) = exp(-beta * (<G_t, x> + lambda * |x|^2)),  G_t = sum g_i,
//    i.e. an isotropic Gaussian with mean -G_t / (2 lambda) and variance
//    1 / (2 beta lambda) truncated to the ball.
//
// Both keep their state in log space. Measures are plain values: copy one to
// snapshot it, then Update() the copy.

#ifndef L2P_MEASURES_H_
#define L2P_MEASURES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "l2p/random.h"
#include "l2p/truncated_normal.h"

namespace l2p {

// Largest divergence parameter admitted by the lazy-measure assumption.
inline constexpr double kMaxEta = 0.1;

// Relative slack allowed on gradient norms, so that gradients normalized to
// exactly L survive a float32 round trip through a stream file.
inline constexpr double kLipschitzSlack = 1e-6;

// One round of expert losses, each in [0, 1].
class LossVector {
 public:
  static absl::StatusOr<LossVector> Create(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  int dimension() const { return static_cast<int>(values_.size()); }

 private:
  explicit LossVector(std::vector<double> values)
      : values_(std::move(values)) {}
  std::vector<double> values_;
};

// A linear loss x -> <gradient, x> with |gradient| <= lipschitz.
class LinearLoss {
 public:
  static absl::StatusOr<LinearLoss> Create(std::vector<double> gradient,
                                           double lipschitz);

  std::span<const double> gradient() const { return gradient_; }
  double lipschitz() const { return lipschitz_; }
  int dimension() const { return static_cast<int>(gradient_.size()); }

 private:
  LinearLoss(std::vector<double> gradient, double lipschitz)
      : gradient_(std::move(gradient)), lipschitz_(lipschitz) {}
  std::vector<double> gradient_;
  double lipschitz_;
};

// An expert index for OPE or a point of the ball for OCO.
using DomainPoint = std::variant<int, std::vector<double>>;

// "3" for an expert, "0.1,-0.25" for a point (not quoted).
std::string FormatDomainPoint(const DomainPoint& point);

absl::Status ValidateExpertLosses(std::span<const double> loss, int dimension);
absl::Status ValidateGradient(std::span<const double> gradient, int dimension,
                              double lipschitz);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm(std::span<const double> a);

class MwMeasure {
 public:
  using Point = int;
  static constexpr bool kLinearLosses = false;

  // Uniform measure over `dimension` experts.
  static absl::StatusOr<MwMeasure> Create(int dimension, double eta);
  // Measure after losses summing to `cumulative_loss` per expert.
  static absl::StatusOr<MwMeasure> FromCumulativeLoss(
      double eta, std::vector<double> cumulative_loss);

  int dimension() const { return static_cast<int>(cumulative_loss_.size()); }
  double eta() const { return eta_; }
  int64_t num_updates() const { return num_updates_; }
  std::span<const double> cumulative_loss() const { return cumulative_loss_; }

  absl::Status Update(std::span<const double> loss);
  absl::Status Update(const LossVector& loss) { return Update(loss.values()); }

  // log mu(x) = -eta * (cumulative loss of x).
  double LogMass(int x) const { return -eta_ * cumulative_loss_[x]; }
  std::vector<double> LogWeights() const;
  // The normalized density, via log-sum-exp.
  std::vector<double> Probabilities() const;

  absl::Status ValidatePoint(int x) const;

  template <BitGenerator64 G>
  absl::StatusOr<int> Sample(G& gen) const;

  static double IncurredLoss(std::span<const double> loss, int x) {
    return loss[x];
  }

 private:
  MwMeasure(double eta, std::vector<double> cumulative_loss)
      : eta_(eta), cumulative_loss_(std::move(cumulative_loss)) {}

  double eta_;
  // Stored unscaled so that log weights stay exact for integer loss sums.
  std::vector<double> cumulative_loss_;
  int64_t num_updates_ = 0;
};

// log nu_cur(x) - log nu_prev(x) on the unnormalized measures.
absl::StatusOr<double> LogBatchRatio(const MwMeasure& prev,
                                     const MwMeasure& cur, int x);

struct RmwSamplerOptions {
  // Untruncated Gaussian proposals tried before falling back.
  int max_rejections = 10000;
  // Hit-and-run steps per dimension in the fallback.
  int mixing_steps_per_dim = 200;
};

class RmwMeasure {
 public:
  using Point = std::vector<double>;
  static constexpr bool kLinearLosses = true;

  static absl::StatusOr<RmwMeasure> Create(int dimension, double beta,
                                           double lambda, double radius,
                                           double lipschitz);

  int dimension() const { return static_cast<int>(gradient_sum_.size()); }
  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  double radius() const { return radius_; }
  double lipschitz() const { return lipschitz_; }
  int64_t num_updates() const { return num_updates_; }
  std::span<const double> gradient_sum() const { return gradient_sum_; }

  const RmwSamplerOptions& sampler_options() const { return sampler_; }
  void set_sampler_options(const RmwSamplerOptions& options) {
    sampler_ = options;
  }

  absl::Status Update(std::span<const double> gradient);
  absl::Status Update(const LinearLoss& loss);

  // -beta * (<G, x> + lambda * |x|^2).
  double LogMass(std::span<const double> x) const;

  std::vector<double> GaussianMean() const;
  double GaussianStddev() const;

  absl::Status ValidatePoint(std::span<const double> x) const;

  // Rejection from the untruncated Gaussian, then hit-and-run over the ball
  // started at the projected mean if every proposal landed outside.
  template <BitGenerator64 G>
  absl::StatusOr<Point> Sample(G& gen) const;

  static double IncurredLoss(std::span<const double> gradient,
                             const Point& x) {
    return Dot(gradient, x);
  }

 private:
  RmwMeasure(double beta, double lambda, double radius, double lipschitz,
             int dimension)
      : beta_(beta),
        lambda_(lambda),
        radius_(radius),
        lipschitz_(lipschitz),
        gradient_sum_(dimension, 0.0) {}

  template <BitGenerator64 G>
  absl::StatusOr<Point> HitAndRun(G& gen) const;

  double beta_;
  double lambda_;
  double radius_;
  double lipschitz_;
  std::vector<double> gradient_sum_;
  int64_t num_updates_ = 0;
  RmwSamplerOptions sampler_;
};

// -beta * <G_cur - G_prev, x>.
absl::StatusOr<double> LogBatchRatio(const RmwMeasure& prev,
                                     const RmwMeasure& cur,
                                     const std::vector<double>& x);

// The per-step divergence bound of the RMW measure,
//   2 beta L^2 / lambda + sqrt(8 beta L^2 log(2 / delta0) / lambda).
absl::StatusOr<double> EffectiveEtaRmw(double beta, double lambda,
                                       double lipschitz, double delta0);

// ---------------------------------------------------------------------------
// Template implementations.

template <BitGenerator64 G>
absl::StatusOr<int> MwMeasure::Sample(G& gen) const {
  const int d = dimension();
  double max_log = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < d; ++x) max_log = std::max(max_log, LogMass(x));
  double total = 0.0;
  for (int x = 0; x < d; ++x) total += std::exp(LogMass(x) - max_log);
  double target = UniformDouble(gen) * total;
  for (int x = 0; x < d; ++x) {
    const double w = std::exp(LogMass(x) - max_log);
    if (target < w) return x;
    target -= w;
  }
  // Rounding left a sliver past the last bucket.
  for (int x = d - 1; x >= 0; --x) {
    if (std::exp(LogMass(x) - max_log) > 0.0) return x;
  }
  return absl::InternalError("multiplicative weights have no mass");
}

template <BitGenerator64 G>
absl::StatusOr<RmwMeasure::Point> RmwMeasure::Sample(G& gen) const {
  const int d = dimension();
  const std::vector<double> mean = GaussianMean();
  const double sigma = GaussianStddev();
  const double r2 = radius_ * radius_;
  Point z(d);
  for (int attempt = 0; attempt < sampler_.max_rejections; ++attempt) {
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      z[i] = mean[i] + sigma * StandardNormal(gen);
      norm2 += z[i] * z[i];
    }
    if (norm2 <= r2) return z;
  }
  return HitAndRun(gen);
}

template <BitGenerator64 G>
absl::StatusOr<RmwMeasure::Point> RmwMeasure::HitAndRun(G& gen) const {
  const int d = dimension();
  const std::vector<double> mean = GaussianMean();
  const double sigma = GaussianStddev();
  const double r2 = radius_ * radius_;

  Point x = mean;
  const double mean_norm = Norm(mean);
  if (mean_norm > radius_) {
    for (double& v : x) v *= radius_ / mean_norm;
  }
  const int64_t steps =
      static_cast<int64_t>(sampler_.mixing_steps_per_dim) * d;
  std::vector<double> u(d);
  for (int64_t step = 0; step < steps; ++step) {
    double un = 0.0;
    do {
      un = 0.0;
      for (int i = 0; i < d; ++i) {
        u[i] = StandardNormal(gen);
        un += u[i] * u[i];
      }
    } while (un == 0.0);
    un = std::sqrt(un);
    for (double& v : u) v /= un;

    // Chord {x + t u : |x + t u| <= R}.
    const double xu = Dot(x, u);
    const double xx = Dot(x, x);
    const double disc = std::max(0.0, xu * xu - xx + r2);
    const double half = std::sqrt(disc);
    const double lo = -xu - half;
    const double hi = -xu + half;
    // Along the chord the density is N(<mean - x, u>, sigma^2) in t.
    double center = 0.0;
    for (int i = 0; i < d; ++i) center += (mean[i] - x[i]) * u[i];
    absl::StatusOr<double> t = SampleTruncatedNormal(center, sigma, lo, hi, gen);
    if (!t.ok()) return t.status();
    for (int i = 0; i < d; ++i) x[i] += *t * u[i];
    // Rounding can push a boundary point a hair outside.
    const double n = Norm(x);
    if (n > radius_) {
      for (double& v : x) v *= radius_ / n;
    }
  }
  return x;
}

}  // namespace l2p

#endif  // L2P_MEASURES_H_
