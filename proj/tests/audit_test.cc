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

#include <cmath>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "l2p/accountant.h"
#include "l2p/harness.h"
#include "l2p/loss_stream.h"

namespace l2p {
namespace {

using ::testing::HasSubstr;
using ::testing::SizeIs;

L2PConfig SmallConfig(int64_t horizon, int64_t batch_size) {
  L2PConfig config;
  config.horizon = horizon;
  config.batch_size = batch_size;
  config.eta = 0.1;
  config.p = 0.5;
  return config;
}

LossStream HandStream() {
  return *LossStream::FromExpertLosses(3, 5,
                                       {1, 0, 0.5,  //
                                        0, 1, 1,    //
                                        1, 1, 0,    //
                                        0, 0.5, 1,  //
                                        1, 0, 0});
}

TEST(MarginalTvByBatchTest, PassesOnCorrectChain) {
  AuditOptions options;
  options.runs = 20000;
  options.base_seed = 4;
  std::vector<AuditReport> reports =
      *MarginalTvByBatch(SmallConfig(5, 1), HandStream(), options);
  ASSERT_THAT(reports, SizeIs(5));
  for (size_t i = 0; i < reports.size(); ++i) {
    const AuditReport& r = reports[i];
    EXPECT_EQ(r.name, "marginal_tv_s" + std::to_string(i + 1));
    EXPECT_EQ(r.bound, 0.0);
    EXPECT_DOUBLE_EQ(r.slack, 3.0 * std::sqrt(3.0 / 20000.0));
    EXPECT_DOUBLE_EQ(r.threshold, r.bound + r.slack);
    EXPECT_TRUE(r.pass) << r.name << " TV " << r.statistic;
  }
}

TEST(MarginalTvTestTest, SingleBatch) {
  AuditOptions options;
  options.runs = 10000;
  AuditReport r = *MarginalTvTest(SmallConfig(5, 1), HandStream(), 3, options);
  EXPECT_EQ(r.name, "marginal_tv");
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(MarginalTvTest(SmallConfig(5, 1), HandStream(), 6, options).ok());
  EXPECT_FALSE(MarginalTvTest(SmallConfig(5, 1), HandStream(), 0, options).ok());
}

TEST(MarginalTvTestTest, RejectsUnsupportedInputs) {
  AuditOptions options;
  options.runs = 100;
  EXPECT_THAT(std::string(MarginalTvByBatch(SmallConfig(5, 1), HandStream(),
                                            options)
                              .status()
                              .message()),
              HasSubstr("runs"));
  options.runs = 10000;
  L2PConfig slack = SmallConfig(5, 1);
  slack.delta0 = 1e-3;
  EXPECT_FALSE(MarginalTvByBatch(slack, HandStream(), options).ok());
  LossStream wide = *AlternatingExperts(9, 5);
  EXPECT_FALSE(MarginalTvByBatch(SmallConfig(5, 1), wide, options).ok());
  LossStream long_stream = *AlternatingExperts(2, 11);
  EXPECT_FALSE(
      MarginalTvByBatch(SmallConfig(11, 1), long_stream, options).ok());
}

TEST(RatioRangeCheckTest, MwRatiosNeverLeaveTheBand) {
  // Each unnormalized ratio lies in [e^{-B eta}, 1], so the correlated ratio
  // is inside e^{+-B eta} and never outside e^{+-2 B eta}.
  LossStream stream = *BernoulliExperts(
      3, 40, std::vector<double>{0.2, 0.5, 0.8}, 1);
  AuditOptions options;
  options.runs = 500;
  AuditReport r = *RatioRangeCheck(SmallConfig(40, 2), stream, options);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.samples, 500 * 19);
  EXPECT_DOUBLE_EQ(r.bound, 1e-6);
}

TEST(EmpiricalEpsilonTest, WithinAccountantCeiling) {
  absl::StatusOr<TunedConfig> tuned = TuneOpe(10, 2, 0.6, 1e-3);
  ASSERT_TRUE(tuned.ok());
  LossStream stream = *BernoulliExperts(
      2, 10, std::vector<double>{0.3, 0.7}, 5);
  std::vector<double> flipped(stream.Row(0).begin(), stream.Row(0).end());
  for (double& v : flipped) v = 1.0 - v;
  LossStream neighbor = *NeighborOf(stream, 0, flipped);
  EpsilonAuditOptions options;
  options.run.runs = 20000;
  AuditReport r = *EmpiricalEpsilon(tuned->config, stream, neighbor,
                                    tuned->budget.epsilon, options);
  EXPECT_EQ(r.name, "empirical_epsilon");
  EXPECT_TRUE(r.pass) << r.statistic << " vs " << r.threshold;
  EXPECT_GE(r.statistic, 0.0);
  EXPECT_EQ(r.bound, tuned->budget.epsilon);
}

TEST(EmpiricalEpsilonTest, IdenticalStreamsGiveSmallEstimate) {
  L2PConfig config = SmallConfig(6, 1);
  LossStream stream = *AlternatingExperts(2, 6);
  EpsilonAuditOptions options;
  options.run.runs = 20000;
  AuditReport r = *EmpiricalEpsilon(config, stream, stream, 1.0, options);
  EXPECT_FALSE(r.inconclusive);
  EXPECT_LT(r.statistic, 0.5);
}

TEST(EmpiricalEpsilonTest, InconclusiveWithoutBuckets) {
  L2PConfig config = SmallConfig(6, 1);
  LossStream stream = *AlternatingExperts(2, 6);
  EpsilonAuditOptions options;
  options.run.runs = 50;
  options.min_bucket_count = 1000;
  AuditReport r = *EmpiricalEpsilon(config, stream, stream, 1.0, options);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_TRUE(r.pass);
}

TEST(EmpiricalEpsilonTest, RejectsUnsupportedShapes) {
  EpsilonAuditOptions options;
  LossStream three = *AlternatingExperts(3, 6);
  EXPECT_FALSE(
      EmpiricalEpsilon(SmallConfig(6, 1), three, three, 1.0, options).ok());
  LossStream long_stream = *AlternatingExperts(2, 21);
  EXPECT_FALSE(EmpiricalEpsilon(SmallConfig(21, 1), long_stream, long_stream,
                                1.0, options)
                   .ok());
  LossStream two = *AlternatingExperts(2, 6);
  EXPECT_FALSE(
      EmpiricalEpsilon(SmallConfig(6, 3), two, two, 1.0, options).ok());
}

TEST(SwitchStatisticsTest, CountsRunsOverTheLimit) {
  L2PConfig config = SmallConfig(100, 1);
  config.p = 0.01;
  config.delta1 = 0.1;
  // Limit 2 * 100 * 0.01 * log(10) = 4.6; make 30 of 200 runs exceed it.
  std::vector<GameResult> results(200);
  for (size_t i = 0; i < results.size(); ++i) {
    const int fakes = i < 30 ? 5 : 4;
    results[i].transcript.batches.resize(1 + fakes);
    for (int k = 1; k <= fakes; ++k) {
      results[i].transcript.batches[k].coins = Coins{true, true, false};
    }
  }
  AuditReport r = *SwitchStatistics(results, config, 0.01);
  EXPECT_DOUBLE_EQ(r.statistic, 0.15);
  EXPECT_DOUBLE_EQ(r.threshold, 0.11);
  EXPECT_FALSE(r.pass);
  AuditReport default_slack = *SwitchStatistics(results, config);
  EXPECT_DOUBLE_EQ(default_slack.slack, 3.0 * std::sqrt(0.1 * 0.9 / 200));
  EXPECT_FALSE(SwitchStatistics(std::span<const GameResult>(results.data(), 50),
                                config)
                   .ok());
}

TEST(AuditReportToJsonTest, OneLineWithAllKeys) {
  AuditReport r;
  r.name = "x";
  r.samples = 3;
  r.statistic = 0.1;
  r.bound = 0.2;
  r.slack = 0.05;
  r.threshold = 0.25;
  r.pass = true;
  r.notes = {"a"};
  const std::string line = AuditReportToJson(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(line);
  for (const char* key : {"name", "samples", "statistic", "bound", "slack",
                          "threshold", "pass", "inconclusive", "notes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["notes"][0], "a");
}

}  // namespace
}  // namespace l2p
