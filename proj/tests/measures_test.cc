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

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "boost/math/distributions/chi_squared.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "l2p/random.h"
#include "l2p/truncated_normal.h"

namespace l2p {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

// Upper 0.001 critical value of chi-square with `dof` degrees of freedom.
double ChiSquareCritical(int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, 0.001));
}

std::vector<double> Vec(std::span<const double> s) {
  return std::vector<double>(s.begin(), s.end());
}

TEST(LossVectorTest, RejectsOutOfRangeEntries) {
  EXPECT_TRUE(LossVector::Create({0.0, 1.0, 0.5}).ok());
  EXPECT_FALSE(LossVector::Create({}).ok());
  EXPECT_FALSE(LossVector::Create({1.5}).ok());
  EXPECT_FALSE(LossVector::Create({-0.1}).ok());
  EXPECT_FALSE(LossVector::Create({std::nan("")}).ok());
}

TEST(LinearLossTest, EnforcesLipschitzBound) {
  EXPECT_TRUE(LinearLoss::Create({0.6, 0.8}, 1.0).ok());
  absl::StatusOr<LinearLoss> big = LinearLoss::Create({2.0, 0.0}, 1.0);
  ASSERT_FALSE(big.ok());
  EXPECT_EQ(big.status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(FormatDomainPointTest, ExpertsAndVectors) {
  EXPECT_EQ(FormatDomainPoint(DomainPoint(3)), "3");
  EXPECT_EQ(FormatDomainPoint(DomainPoint(std::vector<double>{0.1, -0.25})),
            "0.10000000000000001,-0.25");
}

TEST(MwMeasureTest, InitIsUniform) {
  absl::StatusOr<MwMeasure> m = MwMeasure::Create(3, 0.1);
  ASSERT_TRUE(m.ok());
  EXPECT_THAT(m->LogWeights(), ElementsAre(0.0, 0.0, 0.0));
  absl::StatusOr<MwMeasure> one = MwMeasure::Create(1, 0.05);
  ASSERT_TRUE(one.ok());
  EXPECT_THAT(one->LogWeights(), ElementsAre(0.0));
}

TEST(MwMeasureTest, InitRejectsBadArguments) {
  EXPECT_FALSE(MwMeasure::Create(0, 0.1).ok());
  EXPECT_FALSE(MwMeasure::Create(2, 0.0).ok());
  EXPECT_FALSE(MwMeasure::Create(2, 0.11).ok());
  EXPECT_TRUE(MwMeasure::Create(2, 0.1).ok());
}

TEST(MwMeasureTest, UpdateSubtractsScaledLoss) {
  MwMeasure m = *MwMeasure::Create(3, 0.1);
  ASSERT_TRUE(m.Update(std::vector<double>{0, 0, 0}).ok());
  EXPECT_THAT(m.LogWeights(), ElementsAre(0.0, 0.0, 0.0));
  ASSERT_TRUE(m.Update(std::vector<double>{1, 0, 0.5}).ok());
  EXPECT_THAT(m.LogWeights(), ElementsAre(DoubleNear(-0.1, 1e-15),
                                          DoubleNear(0.0, 1e-15),
                                          DoubleNear(-0.05, 1e-15)));
  ASSERT_TRUE(m.Update(std::vector<double>{1, 1, 1}).ok());
  EXPECT_THAT(m.LogWeights(), ElementsAre(DoubleNear(-0.2, 1e-15),
                                          DoubleNear(-0.1, 1e-15),
                                          DoubleNear(-0.15, 1e-15)));
}

TEST(MwMeasureTest, UpdateRejectsDimensionMismatch) {
  MwMeasure m = *MwMeasure::Create(3, 0.1);
  absl::Status s = m.Update(std::vector<double>{0, 0});
  EXPECT_EQ(s.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(s.message(), HasSubstr("dimension"));
}

TEST(MwMeasureTest, RatioIdentityAfterOneUpdate) {
  Rng gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(UniformIndex(gen, 6));
    const double eta = 0.1 * (1.0 - UniformDouble(gen));
    MwMeasure prev = *MwMeasure::Create(d, eta);
    for (int warm = 0; warm < 5; ++warm) {
      std::vector<double> loss(d);
      for (double& v : loss) v = UniformDouble(gen);
      ASSERT_TRUE(prev.Update(loss).ok());
    }
    std::vector<double> loss(d);
    for (double& v : loss) v = UniformDouble(gen);
    MwMeasure cur = prev;
    ASSERT_TRUE(cur.Update(loss).ok());
    for (int x = 0; x < d; ++x) {
      const double ratio = std::exp(*LogBatchRatio(prev, cur, x));
      const double expected = std::exp(-eta * loss[x]);
      EXPECT_NEAR(ratio / expected, 1.0, 1e-12);
    }
  }
}

TEST(MwMeasureTest, NormalizedStepDivergenceAtMostEta) {
  Rng gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(UniformIndex(gen, 6));
    const double eta = 0.1 * (1.0 - UniformDouble(gen));
    MwMeasure prev = *MwMeasure::Create(d, eta);
    std::vector<double> loss(d);
    for (double& v : loss) v = UniformDouble(gen);
    ASSERT_TRUE(prev.Update(loss).ok());
    for (double& v : loss) v = UniformDouble(gen);
    MwMeasure cur = prev;
    ASSERT_TRUE(cur.Update(loss).ok());
    const std::vector<double> p0 = prev.Probabilities();
    const std::vector<double> p1 = cur.Probabilities();
    for (int x = 0; x < d; ++x) {
      EXPECT_LE(std::abs(std::log(p1[x]) - std::log(p0[x])), eta + 1e-12);
    }
  }
}

TEST(MwMeasureTest, LogSpaceStaysExactOverManyUpdates) {
  MwMeasure m = *MwMeasure::Create(3, 0.1);
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  for (int t = 0; t < 1000000; ++t) ASSERT_TRUE(m.Update(ones).ok());
  for (double w : m.LogWeights()) {
    EXPECT_DOUBLE_EQ(w, -1e5);
    EXPECT_TRUE(std::isfinite(w));
  }
  const std::vector<double> p = m.Probabilities();
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
  Rng gen(5);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 3000; ++i) ++counts[*m.Sample(gen)];
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(MwMeasureTest, SymmetricSampling) {
  MwMeasure m = *MwMeasure::Create(2, 0.1);
  Rng gen(1);
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += *m.Sample(gen) == 0 ? 1 : 0;
  const double sigma = std::sqrt(0.25 / n);
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 3 * sigma);
}

TEST(MwMeasureTest, HeavilySkewedSampling) {
  // Cumulative losses (0, 200) with eta = 0.1 give log weights (0, -20).
  MwMeasure m = *MwMeasure::FromCumulativeLoss(0.1, {0.0, 200.0});
  EXPECT_THAT(m.LogWeights(), ElementsAre(0.0, DoubleNear(-20.0, 1e-12)));
  EXPECT_GE(m.Probabilities()[0], 1.0 - 1e-8);
  Rng gen(2);
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += *m.Sample(gen) == 0 ? 1 : 0;
  EXPECT_GE(static_cast<double>(zeros) / n, 0.999);
}

TEST(MwMeasureTest, ChiSquareGoodnessOfFit) {
  for (int d = 2; d <= 5; ++d) {
    std::vector<double> cumulative(d);
    for (int x = 0; x < d; ++x) cumulative[x] = 3.0 * x;
    MwMeasure m = *MwMeasure::FromCumulativeLoss(0.1, cumulative);
    // exp(-0.3 x), normalized, computed without the implementation.
    std::vector<double> expected(d);
    double z = 0.0;
    for (int x = 0; x < d; ++x) z += std::exp(-0.3 * x);
    for (int x = 0; x < d; ++x) expected[x] = std::exp(-0.3 * x) / z;

    Rng gen(100 + d);
    const int n = 100000;
    std::vector<int> counts(d, 0);
    for (int i = 0; i < n; ++i) ++counts[*m.Sample(gen)];
    double chi2 = 0.0;
    for (int x = 0; x < d; ++x) {
      const double e = expected[x] * n;
      chi2 += (counts[x] - e) * (counts[x] - e) / e;
    }
    EXPECT_LT(chi2, ChiSquareCritical(d - 1)) << "d = " << d;
  }
}

TEST(LogBatchRatioTest, MwCases) {
  MwMeasure prev = *MwMeasure::Create(2, 0.1);
  EXPECT_EQ(*LogBatchRatio(prev, prev, 0), 0.0);
  MwMeasure cur = prev;
  ASSERT_TRUE(cur.Update(std::vector<double>{1.0, 0.0}).ok());
  EXPECT_NEAR(*LogBatchRatio(prev, cur, 0), -0.1, 1e-15);
  EXPECT_NEAR(*LogBatchRatio(prev, cur, 1), 0.0, 1e-15);
}

TEST(LogBatchRatioTest, MwRejectsMismatch) {
  MwMeasure a = *MwMeasure::Create(2, 0.1);
  MwMeasure b = *MwMeasure::Create(3, 0.1);
  MwMeasure c = *MwMeasure::Create(2, 0.05);
  EXPECT_FALSE(LogBatchRatio(a, b, 0).ok());
  EXPECT_FALSE(LogBatchRatio(a, c, 0).ok());
  EXPECT_FALSE(LogBatchRatio(a, a, 5).ok());
}

TEST(LogBatchRatioTest, MwInvariantUnderCommonShift) {
  // Adding the same loss to every expert scales both measures; ratios
  // between experts stay fixed.
  MwMeasure prev = *MwMeasure::Create(3, 0.1);
  MwMeasure cur = prev;
  ASSERT_TRUE(cur.Update(std::vector<double>{0.2, 0.7, 0.4}).ok());
  MwMeasure prev_shift = prev;
  ASSERT_TRUE(prev_shift.Update(std::vector<double>{1, 1, 1}).ok());
  MwMeasure cur_shift = prev_shift;
  ASSERT_TRUE(cur_shift.Update(std::vector<double>{0.2, 0.7, 0.4}).ok());
  for (int x = 0; x < 3; ++x) {
    EXPECT_NEAR(*LogBatchRatio(prev, cur, x),
                *LogBatchRatio(prev_shift, cur_shift, x), 1e-14);
  }
}

TEST(RmwMeasureTest, InitAndUpdate) {
  absl::StatusOr<RmwMeasure> m = RmwMeasure::Create(2, 0.1, 1.0, 1.0, 1.0);
  ASSERT_TRUE(m.ok());
  EXPECT_THAT(Vec(m->gradient_sum()), ElementsAre(0.0, 0.0));
  ASSERT_TRUE(m->Update(std::vector<double>{0.3, 0.4}).ok());
  EXPECT_THAT(Vec(m->gradient_sum()), ElementsAre(0.3, 0.4));
  EXPECT_FALSE(m->Update(std::vector<double>{2.0, 0.0}).ok());
}

TEST(RmwMeasureTest, CreateRejectsNonPositive) {
  EXPECT_FALSE(RmwMeasure::Create(2, 0.0, 1.0, 1.0, 1.0).ok());
  EXPECT_FALSE(RmwMeasure::Create(2, 0.1, 0.0, 1.0, 1.0).ok());
  EXPECT_FALSE(RmwMeasure::Create(2, 0.1, 1.0, 0.0, 1.0).ok());
  EXPECT_FALSE(RmwMeasure::Create(0, 0.1, 1.0, 1.0, 1.0).ok());
}

TEST(RmwMeasureTest, DensityIdentity) {
  RmwMeasure m = *RmwMeasure::Create(3, 0.7, 1.3, 2.0, 1.0);
  ASSERT_TRUE(m.Update(std::vector<double>{0.5, -0.5, 0.2}).ok());
  ASSERT_TRUE(m.Update(std::vector<double>{0.1, 0.3, -0.6}).ok());
  const std::vector<double> x = {0.4, -1.1, 0.25};
  const double g_dot_x = 0.6 * 0.4 + (-0.2) * (-1.1) + (-0.4) * 0.25;
  const double norm2 = 0.4 * 0.4 + 1.1 * 1.1 + 0.25 * 0.25;
  const double expected = -0.7 * (g_dot_x + 1.3 * norm2);
  EXPECT_NEAR(m.LogMass(x), expected, 1e-12);
}

TEST(RmwMeasureTest, LogBatchRatio) {
  RmwMeasure prev = *RmwMeasure::Create(2, 0.2, 1.0, 1.0, 1.0);
  RmwMeasure cur = prev;
  ASSERT_TRUE(cur.Update(std::vector<double>{1.0, 0.0}).ok());
  EXPECT_NEAR(*LogBatchRatio(prev, cur, {0.5, 0.0}), -0.1, 1e-15);
  EXPECT_EQ(*LogBatchRatio(prev, prev, {0.5, 0.0}), 0.0);
}

TEST(RmwMeasureTest, ZeroGradientSamplesCenterOnOrigin) {
  RmwMeasure m = *RmwMeasure::Create(2, 2.0, 1.0, 1.0, 1.0);
  Rng gen(3);
  const int n = 100000;
  std::vector<double> sum(2, 0.0), sum_sq(2, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> x = *m.Sample(gen);
    ASSERT_LE(Norm(x), 1.0);
    for (int j = 0; j < 2; ++j) {
      sum[j] += x[j];
      sum_sq[j] += x[j] * x[j];
    }
  }
  for (int j = 0; j < 2; ++j) {
    const double mean = sum[j] / n;
    const double var = sum_sq[j] / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(var / n));
  }
}

TEST(RmwMeasureTest, HitAndRunStaysInBallAndTracksMean) {
  // Mean far outside the ball: every rejection proposal misses, so the
  // fallback runs. The density on the ball then piles up near the boundary
  // point closest to the mean.
  RmwMeasure m = *RmwMeasure::Create(2, 50.0, 1.0, 1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    ASSERT_TRUE(m.Update(std::vector<double>{-1.0, 0.0}).ok());
  }
  RmwSamplerOptions options;
  options.max_rejections = 10;
  m.set_sampler_options(options);
  Rng gen(4);
  double mean_x = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> x = *m.Sample(gen);
    ASSERT_LE(Norm(x), 1.0 + 1e-12);
    mean_x += x[0];
  }
  EXPECT_GT(mean_x / n, 0.9);
}

TEST(EffectiveEtaRmwTest, WorkedValues) {
  const double d0 = 2.0 / std::numbers::e;
  EXPECT_NEAR(*EffectiveEtaRmw(0.01, 1.0, 1.0, d0), 0.02 + std::sqrt(0.08),
              1e-12);
  EXPECT_NEAR(*EffectiveEtaRmw(0.01, 1.0, 1.0, d0), 0.30284, 1e-5);
  EXPECT_NEAR(*EffectiveEtaRmw(0.01, 4.0, 1.0, d0), 0.005 + std::sqrt(0.02),
              1e-12);
  EXPECT_NEAR(*EffectiveEtaRmw(0.01, 4.0, 1.0, d0), 0.14642, 1e-5);
  EXPECT_LT(*EffectiveEtaRmw(1e-14, 1.0, 1.0, d0), 1e-6);
  EXPECT_FALSE(EffectiveEtaRmw(0.01, 1.0, 1.0, 0.0).ok());
  EXPECT_FALSE(EffectiveEtaRmw(-1.0, 1.0, 1.0, 0.5).ok());
}

TEST(TruncatedNormalTest, StaysInsideAndMatchesMoments) {
  Rng gen(9);
  struct Case {
    double a, b;
  };
  for (Case c : {Case{-1.0, 1.0}, Case{2.0, 2.5}, Case{-6.0, -5.0},
                 Case{0.5, 8.0}, Case{-0.1, 0.1}, Case{4.0, 30.0}}) {
    // Reference mean by numerical integration of the density.
    double num = 0.0, den = 0.0;
    const int steps = 200000;
    const double h = (c.b - c.a) / steps;
    for (int i = 0; i < steps; ++i) {
      const double z = c.a + (i + 0.5) * h;
      const double w = std::exp(-0.5 * z * z);
      num += z * w;
      den += w;
    }
    const double ref_mean = num / den;
    double sum = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const double z = *SampleTruncatedStandardNormal(c.a, c.b, gen);
      ASSERT_GE(z, c.a);
      ASSERT_LE(z, c.b);
      sum += z;
    }
    EXPECT_NEAR(sum / n, ref_mean, 4.0 * (c.b - c.a) / std::sqrt(12.0 * n))
        << "[" << c.a << ", " << c.b << "]";
  }
}

TEST(RandomTest, MixSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(MixSeed(1, 2), MixSeed(1, 2));
  EXPECT_NE(MixSeed(1, 2), MixSeed(1, 3));
  EXPECT_NE(MixSeed(1, 2), MixSeed(2, 2));
}

TEST(RandomTest, UniformIndexCoversRange) {
  Rng gen(8);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[UniformIndex(gen, 7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

}  // namespace
}  // namespace l2p
