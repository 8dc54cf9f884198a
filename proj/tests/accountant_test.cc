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

#include <cmath>
#include <numbers>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "l2p/measures.h"
#include "l2p/random.h"

namespace l2p {
namespace {

using ::testing::Contains;
using ::testing::HasSubstr;

TEST(L2PPrivacyTest, GoldenValue) {
  // Term by term for eta = 0.01, p = 0.1, T = 1000, B = 10, delta1 = 1e-6,
  // with L = log(1e6) = 13.815510557964274:
  //   2 eta / p                 = 0.2
  //   eta                       = 0.01
  //   3 T eta^2 p L / (2 B)     = 0.03 L / 20       = 0.020723265836946
  //   sqrt(6 T eta^2 p L^2 / B) = sqrt(0.006 L^2)   = 1.070142946270089
  const double log_inv = 13.815510557964274;
  const double expected =
      0.2 + 0.01 + 0.03 * log_inv / 20.0 + std::sqrt(0.006) * log_inv;
  PrivacyBudget b = L2PPrivacy(0.01, 0.1, 1000, 10, 0.0, 1e-6);
  EXPECT_NEAR(b.epsilon, expected, 1e-12);
  EXPECT_NEAR(b.epsilon, 1.3009, 1e-3);
  EXPECT_DOUBLE_EQ(b.delta, 0.002);
}

TEST(L2PPrivacyTest, Delta0TermUsesAllFactors) {
  // 2 T (2 / eta + L / p) e B d0 with T = 100, eta = 0.05, p = 0.5, B = 2,
  // d0 = 1e-9, plus 2 T d1.
  const double log_inv = std::log(1e6);
  const double expected = 2 * 100 * (40.0 + log_inv / 0.5) * std::numbers::e *
                              2 * 1e-9 +
                          2 * 100 * 1e-6;
  EXPECT_NEAR(L2PPrivacy(0.05, 0.5, 100, 2, 1e-9, 1e-6).delta, expected,
              1e-18);
}

TEST(L2PPrivacyTest, NotesOutOfRegimeInputs) {
  PrivacyBudget b = L2PPrivacy(0.01, 0.1, 1000, 10, 0.0, 1e-6);
  EXPECT_FALSE(b.preconditions_met);
  EXPECT_THAT(b.notes, Contains(HasSubstr("log(1/delta1)")));

  PrivacyBudget bad = L2PPrivacy(0.5, 0.1, 1000, 10, 0.0, 1e-6);
  EXPECT_FALSE(bad.preconditions_met);
  EXPECT_THAT(bad.notes, Contains(HasSubstr("eta must lie")));

  PrivacyBudget huge = L2PPrivacy(0.01, 0.1, 1000000, 1, 0.0, 0.1);
  EXPECT_EQ(huge.delta, 1.0);
  EXPECT_THAT(huge.notes, Contains(HasSubstr("exceeds 1")));
}

TEST(L2PPrivacyTest, MonotoneInEtaHorizonAndBatch) {
  Rng gen(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const double eta = 0.001 + 0.098 * UniformDouble(gen);
    const double p = 0.01 + 0.98 * UniformDouble(gen);
    const int64_t t = 1 + UniformIndex(gen, 100000);
    const int64_t b = 1 + UniformIndex(gen, 50);
    const double d1 = std::pow(10.0, -1.0 - 9.0 * UniformDouble(gen));
    const PrivacyBudget base = L2PPrivacy(eta, p, t, b, 0.0, d1);
    EXPECT_GE(L2PPrivacy(eta * 1.01, p, t, b, 0.0, d1).epsilon, base.epsilon);
    EXPECT_GE(L2PPrivacy(eta, p, t + 1, b, 0.0, d1).epsilon, base.epsilon);
    EXPECT_LE(L2PPrivacy(eta, p, t, b + 1, 0.0, d1).epsilon, base.epsilon);
    EXPECT_GE(L2PPrivacy(eta, p, t, b, 0.0, d1 / 2).epsilon, base.epsilon);
    EXPECT_GE(L2PPrivacy(eta, p, t, b, 1e-12, d1).delta, base.delta);
    EXPECT_GT(base.epsilon, 0.0);
  }
}

TEST(AdvancedCompositionTest, HundredCopies) {
  const std::vector<double> eps(100, 0.1);
  const std::vector<double> deltas(100, 0.0);
  absl::StatusOr<CompositionBudget> c =
      AdvancedComposition(eps, deltas, 1e-6);
  ASSERT_TRUE(c.ok()) << c.status();
  // sum eps = 10, sum eps^2 = 1; the second branch sqrt(2 log(1e6)) = 5.2565
  // is the smaller one.
  const double expected = 10.0 + std::sqrt(2.0 * std::log(1e6));
  EXPECT_NEAR(c->budget.epsilon, expected, 1e-9);
  EXPECT_NEAR(c->budget.epsilon, 15.257, 1e-3);
  EXPECT_NEAR(c->epsilon_floor, 10.0, 1e-12);
  EXPECT_NEAR(c->budget.delta, 1e-6, 1e-15);
}

TEST(AdvancedCompositionTest, FirstBranchWinsForSmallEpsilons) {
  const std::vector<double> eps(10, 0.001);
  const std::vector<double> deltas(10, 1e-9);
  CompositionBudget c = *AdvancedComposition(eps, deltas, 0.5);
  const double s2 = 10 * 1e-6;
  const double a = std::sqrt(2 * s2 * std::log(std::numbers::e +
                                               std::sqrt(s2) / 0.5));
  const double b = std::sqrt(2 * s2 * std::log(2.0));
  EXPECT_NEAR(c.budget.epsilon, 0.01 + std::min(a, b), 1e-15);
  EXPECT_NEAR(c.budget.delta, 1 - 0.5 * std::pow(1 - 1e-9, 10), 1e-15);
  EXPECT_NEAR(c.epsilon_floor, 0.01, 1e-15);
}

TEST(AdvancedCompositionTest, RejectsBadInputs) {
  const std::vector<double> eps = {0.1, 0.2};
  const std::vector<double> one = {0.0};
  const std::vector<double> two = {0.0, 0.0};
  EXPECT_FALSE(AdvancedComposition(eps, one, 1e-6).ok());
  EXPECT_FALSE(AdvancedComposition(eps, two, 0.0).ok());
  const std::vector<double> neg = {-0.1, 0.2};
  EXPECT_FALSE(AdvancedComposition(neg, two, 1e-6).ok());
}

TEST(ModifiedAdvancedCompositionTest, AddsTwiceLambdaSum) {
  const std::vector<double> eps(100, 0.1);
  const std::vector<double> deltas(100, 0.0);
  const std::vector<double> lambdas(100, 1e-8);
  CompositionBudget plain = *AdvancedComposition(eps, deltas, 1e-6);
  CompositionBudget mod =
      *ModifiedAdvancedComposition(eps, deltas, 1e-6, lambdas);
  EXPECT_DOUBLE_EQ(mod.budget.epsilon, plain.budget.epsilon);
  EXPECT_NEAR(mod.budget.delta, plain.budget.delta + 2e-6, 1e-15);
  const std::vector<double> bad(100, 2.0);
  EXPECT_FALSE(ModifiedAdvancedComposition(eps, deltas, 1e-6, bad).ok());
}

TEST(GroupPrivacyTest, Values) {
  PrivacyBudget g = *GroupPrivacy(0.1, 1e-6, 3);
  EXPECT_DOUBLE_EQ(g.epsilon, 0.30000000000000004);
  EXPECT_NEAR(g.delta, 3 * std::exp(0.2) * 1e-6, 1e-18);
  EXPECT_NEAR(g.delta, 3.6642e-6, 1e-10);
  PrivacyBudget single = *GroupPrivacy(0.7, 1e-5, 1);
  EXPECT_DOUBLE_EQ(single.epsilon, 0.7);
  EXPECT_DOUBLE_EQ(single.delta, 1e-5);
  EXPECT_FALSE(GroupPrivacy(0.1, 1e-6, 0).ok());
}

TEST(CdpToApproxTest, Values) {
  PrivacyBudget c = *CdpToApprox(0.01, 1e-6);
  EXPECT_NEAR(c.epsilon, 3 * std::sqrt(0.01 * std::log(1e6)), 1e-12);
  EXPECT_NEAR(c.epsilon, 1.1151, 1e-3);
  EXPECT_DOUBLE_EQ(c.delta, 1e-6);
  EXPECT_FALSE(CdpToApprox(0.0, 1e-6).ok());
  EXPECT_FALSE(CdpToApprox(1.5, 1e-6).ok());
  EXPECT_FALSE(CdpToApprox(0.01, 0.3).ok());
}

TEST(TuneOpeTest, SmallExample) {
  absl::StatusOr<TunedConfig> tuned = TuneOpe(10, 2, 0.6, 1e-3);
  ASSERT_TRUE(tuned.ok()) << tuned.status();
  EXPECT_EQ(tuned->config.batch_size, 2);
  EXPECT_EQ(tuned->shrinks, 1);
  EXPECT_LE(tuned->budget.epsilon, 0.6);
  EXPECT_LE(tuned->budget.delta, 1e-3);
  EXPECT_EQ(tuned->config.delta0, 0.0);
}

TEST(TuneOpeTest, InfeasibleTargetFails) {
  absl::StatusOr<TunedConfig> tuned = TuneOpe(10, 2, 1e-6, 1e-3);
  EXPECT_EQ(tuned.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(TuneOpeTest, RejectsBadInputs) {
  EXPECT_EQ(TuneOpe(10, 1, 0.5, 1e-3).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(TuneOpe(10, 2, 0.0, 1e-3).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(TuneOpe(10, 2, 0.5, 1.0).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(TuneOpeTest, SelfConsistentOnRandomInputs) {
  Rng gen(31);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int64_t t = static_cast<int64_t>(
        std::pow(10.0, 1.0 + 5.0 * UniformDouble(gen)));
    const int d = 2 + static_cast<int>(UniformIndex(gen, 50));
    const double eps = std::pow(10.0, -2.0 + 2.0 * UniformDouble(gen));
    const double delta = std::pow(10.0, -9.0 + 7.0 * UniformDouble(gen));
    absl::StatusOr<TunedConfig> tuned = TuneOpe(t, d, eps, delta);
    if (!tuned.ok()) {
      EXPECT_EQ(tuned.status().code(), absl::StatusCode::kFailedPrecondition);
      continue;
    }
    ++feasible;
    const L2PConfig& c = tuned->config;
    EXPECT_TRUE(ValidateConfig(c).ok());
    EXPECT_EQ(c.batch_size, std::max<int64_t>(1, std::llround(1.0 / eps)));
    EXPECT_NEAR(c.p, std::min(10.0 * c.eta / eps, 1.0 - 1e-9), 1e-15);
    EXPECT_LE(2.0 * static_cast<double>(t) * c.delta1, delta);
    EXPECT_GE(static_cast<double>(t) * c.p / c.batch_size, 1.0);
    const PrivacyBudget again = L2PPrivacy(c);
    EXPECT_EQ(again.epsilon, tuned->budget.epsilon);
    EXPECT_EQ(again.delta, tuned->budget.delta);
    EXPECT_LE(again.epsilon, eps);
    EXPECT_LE(again.delta, delta);
    EXPECT_LE(tuned->shrinks, kMaxTunerShrinks);
  }
  EXPECT_GT(feasible, 100);
}

TEST(TuneOcoTest, ReferenceCase) {
  absl::StatusOr<OcoTuning> tuned = TuneOco(10000, 3, 1.0, 1e-6, 1.0, 1.0);
  ASSERT_TRUE(tuned.ok()) << tuned.status();
  EXPECT_LE(tuned->budget.epsilon, 1.0);
  EXPECT_LE(tuned->budget.delta, 1e-6);
  EXPECT_DOUBLE_EQ(tuned->radius, 0.5);
  // The accounted eta is recomputed from the measure parameters.
  EXPECT_DOUBLE_EQ(*EffectiveEtaRmw(tuned->beta, tuned->lambda, 1.0,
                                    tuned->config.delta0),
                   tuned->config.eta);
}

TEST(TuneOcoTest, SelfConsistentOnRandomInputs) {
  Rng gen(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t t = static_cast<int64_t>(
        std::pow(10.0, 2.0 + 3.0 * UniformDouble(gen)));
    const int d = 1 + static_cast<int>(UniformIndex(gen, 10));
    const double eps = std::pow(10.0, -1.0 + 1.5 * UniformDouble(gen));
    const double lip = 0.5 + 2.0 * UniformDouble(gen);
    const double diam = 0.5 + 2.0 * UniformDouble(gen);
    absl::StatusOr<OcoTuning> tuned = TuneOco(t, d, eps, 1e-6, lip, diam);
    if (!tuned.ok()) {
      EXPECT_EQ(tuned.status().code(), absl::StatusCode::kFailedPrecondition);
      continue;
    }
    EXPECT_LE(tuned->budget.epsilon, eps);
    EXPECT_LE(tuned->budget.delta, 1e-6);
    EXPECT_DOUBLE_EQ(*EffectiveEtaRmw(tuned->beta, tuned->lambda, lip,
                                      tuned->config.delta0),
                     tuned->config.eta);
    const PrivacyBudget again = L2PPrivacy(tuned->config);
    EXPECT_EQ(again.epsilon, tuned->budget.epsilon);
  }
}

}  // namespace
}  // namespace l2p
