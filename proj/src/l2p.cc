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

#include "l2p/l2p.h"

#include <cmath>
#include <string>
#include <variant>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "l2p/l2p_config.h"
#include "l2p/measures.h"

namespace l2p {

absl::Status ValidateConfig(const L2PConfig& config) {
  if (config.horizon < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("T must be at least 1, got ", config.horizon));
  }
  if (config.batch_size < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("B must be at least 1, got ", config.batch_size));
  }
  if (!(config.eta > 0.0 && config.eta <= kMaxEta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must lie in (0, 0.1], got ", config.eta));
  }
  if (!(config.p >= 0.0 && config.p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in [0, 1], got ", config.p));
  }
  if (!(config.delta0 >= 0.0 && config.delta0 <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta0 must lie in [0, 1], got ", config.delta0));
  }
  if (!(config.delta1 > 0.0 && config.delta1 < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta1 must lie in (0, 1), got ", config.delta1));
  }
  return absl::OkStatus();
}

PreconditionReport CheckPreconditions(const L2PConfig& config) {
  PreconditionReport report;
  const double t = static_cast<double>(config.horizon);
  const double b = static_cast<double>(config.batch_size);

  if (!(config.p > 0.0 && config.p < 1.0)) {
    report.p_in_open_unit_interval = false;
    report.warnings.push_back(
        absl::StrCat("p = ", config.p, " is outside (0, 1)"));
  }
  const double fake = t * config.p / b;
  if (!(fake >= 1.0)) {
    report.enough_fake_switches = false;
    report.warnings.push_back(absl::StrFormat("T p / B = %.6g < 1", fake));
  }
  const double concentration =
      config.eta * b * std::log(1.0 / config.delta1) / config.p;
  if (!(concentration <= 1.0)) {
    report.ratio_concentrates = false;
    report.warnings.push_back(absl::StrFormat(
        "eta B log(1/delta1) / p = %.6g > 1", concentration));
  }
  return report;
}

double Transcript::TotalLoss() const {
  double total = 0.0;
  for (double loss : round_losses) total += loss;
  return total;
}

int64_t Transcript::SwitchCountX() const {
  int64_t n = 0;
  for (const BatchRecord& r : batches) n += r.switched_x ? 1 : 0;
  return n;
}

int64_t Transcript::SwitchCountY() const {
  int64_t n = 0;
  for (const BatchRecord& r : batches) n += r.switched_y ? 1 : 0;
  return n;
}

int64_t Transcript::FakeSwitchCount() const {
  int64_t n = 0;
  for (const BatchRecord& r : batches) {
    if (r.coins.has_value() && (!r.coins->a || !r.coins->s_prime)) ++n;
  }
  return n;
}

namespace {

std::string CsvPoint(const DomainPoint& point) {
  if (std::holds_alternative<int>(point)) return FormatDomainPoint(point);
  return absl::StrCat("\"", FormatDomainPoint(point), "\"");
}

}  // namespace

std::string TranscriptToCsv(const Transcript& transcript) {
  std::string out = "s,x,S,Sprime,A,switched_x,switched_y,batch_loss\n";
  for (const BatchRecord& r : transcript.batches) {
    absl::StrAppend(&out, r.s, ",", CsvPoint(r.x), ",");
    if (r.coins.has_value()) {
      absl::StrAppend(&out, r.coins->s ? 1 : 0, ",", r.coins->s_prime ? 1 : 0,
                      ",", r.coins->a ? 1 : 0, ",");
    } else {
      absl::StrAppend(&out, ",,,");
    }
    absl::StrAppend(&out, r.switched_x ? 1 : 0, ",", r.switched_y ? 1 : 0, ",",
                    absl::StrFormat("%.17g", r.batch_loss), "\n");
  }
  return out;
}

}  // namespace l2p
