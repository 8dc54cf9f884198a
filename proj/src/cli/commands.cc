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

#include "l2p/cli/commands.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "l2p/audit.h"
#include "l2p/loss_stream.h"
#include "l2p/random.h"
#include "l2p/status_macros.h"

namespace l2p::cli {
namespace {

using Json = nlohmann::ordered_json;

int Report(const absl::Status& status, std::ostream& err) {
  err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(
        absl::StrCat("cannot open ", path.string(), " for writing"));
  }
  out << contents;
  out.close();
  if (!out) {
    return absl::UnavailableError(absl::StrCat("write to ", path.string(),
                                               " failed"));
  }
  return absl::OkStatus();
}

Json MomentsJson(const Moments& m) {
  return Json{{"mean", m.mean}, {"stddev", m.stddev}};
}

Json BudgetJson(const PrivacyBudget& b) {
  return Json{{"epsilon", b.epsilon},
              {"delta", b.delta},
              {"preconditions_met", b.preconditions_met},
              {"notes", b.notes}};
}

std::string Num(double v) { return absl::StrFormat("%.12g", v); }

absl::StatusOr<MonteCarloSummary> RunReplicates(const RunConfig& config,
                                                const RunPlan& plan,
                                                int threads) {
  MonteCarloOptions options;
  options.reps = config.reps;
  options.base_seed = config.base_seed;
  options.threads = threads;
  const AdversarySpec adversary = ResolvedAdversary(config);
  if (config.fresh_stream_per_rep) {
    return MonteCarlo(plan.spec, adversary, options);
  }
  L2P_ASSIGN_OR_RETURN(LossStream stream, GenerateStream(adversary));
  return MonteCarlo(plan.spec, stream, options);
}

// Bernoulli experts with evenly spaced means, the audit testbed.
absl::StatusOr<LossStream> AuditStream(int dimension, int64_t horizon,
                                       uint64_t seed) {
  AdversarySpec spec;
  spec.kind = StreamKind::kBernoulli;
  spec.dimension = dimension;
  spec.horizon = horizon;
  spec.seed = seed;
  return GenerateStream(spec);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return kExitConfig;
    case absl::StatusCode::kFailedPrecondition:
      return kExitInfeasible;
    case absl::StatusCode::kResourceExhausted:
      return kExitSampler;
    default:
      return kExitFailure;
  }
}

int ResolveThreads(int requested) {
  if (const char* env = std::getenv("L2P_THREADS"); env != nullptr) {
    int value = 0;
    if (absl::SimpleAtoi(env, &value) && value > 0) return value;
  }
  return requested > 0 ? requested : DefaultThreads();
}

absl::StatusOr<RunPlan> PlanRun(const RunConfig& config) {
  RunPlan plan;
  const bool linear = IsLinearKind(config.adversary.kind);
  if (config.problem == Problem::kOpe) {
    if (linear) {
      return absl::InvalidArgumentError(absl::StrCat(
          "adversary '", std::string(StreamKindName(config.adversary.kind)),
          "' produces gradients, not expert losses"));
    }
    plan.spec.kind = MeasureKind::kMw;
    if (config.overrides.has_value()) {
      L2PConfig c;
      c.horizon = config.horizon;
      c.batch_size = config.overrides->batch_size;
      c.eta = config.overrides->eta;
      c.p = config.overrides->p;
      c.delta0 = 0.0;
      c.delta1 = config.delta / (2.0 * static_cast<double>(config.horizon));
      L2P_RETURN_IF_ERROR(ValidateConfig(c));
      plan.spec.config = c;
      plan.budget = L2PPrivacy(c);
    } else {
      L2P_ASSIGN_OR_RETURN(TunedConfig tuned,
                           TuneOpe(config.horizon, config.dimension,
                                   config.epsilon, config.delta));
      plan.spec.config = tuned.config;
      plan.budget = tuned.budget;
      plan.shrinks = tuned.shrinks;
    }
    plan.nominal_eta = plan.spec.config.eta;
    return plan;
  }

  if (!linear) {
    return absl::InvalidArgumentError(absl::StrCat(
        "adversary '", std::string(StreamKindName(config.adversary.kind)),
        "' produces expert losses, not gradients"));
  }
  if (config.overrides.has_value()) {
    return absl::InvalidArgumentError(
        "overrides apply to the experts problem only");
  }
  L2P_ASSIGN_OR_RETURN(
      OcoTuning tuned,
      TuneOco(config.horizon, config.dimension, config.epsilon, config.delta,
              config.oco.lipschitz, config.oco.diameter));
  plan.spec.kind = MeasureKind::kRmw;
  plan.spec.config = tuned.config;
  plan.spec.measure.beta = tuned.beta;
  plan.spec.measure.lambda = tuned.lambda;
  plan.spec.measure.radius = tuned.radius;
  plan.spec.measure.lipschitz = tuned.lipschitz;
  plan.budget = tuned.budget;
  plan.nominal_eta = tuned.nominal_eta;
  plan.shrinks = tuned.shrinks;
  return plan;
}

int CmdRun(const RunConfig& config, std::ostream& out, std::ostream& err) {
  absl::StatusOr<RunPlan> plan = PlanRun(config);
  if (!plan.ok()) return Report(plan.status(), err);
  for (const std::string& note : plan->budget.notes) {
    err << "warning: " << note << "\n";
  }
  absl::StatusOr<MonteCarloSummary> summary =
      RunReplicates(config, *plan, ResolveThreads(config.threads));
  if (!summary.ok()) return Report(summary.status(), err);

  const L2PConfig& c = plan->spec.config;
  Json s;
  s["schema"] = kRunConfigSchema;
  s["problem"] = config.problem == Problem::kOpe ? "ope" : "oco";
  s["T"] = c.horizon;
  s["d"] = config.dimension;
  s["reps"] = config.reps;
  s["B"] = c.batch_size;
  s["eta"] = c.eta;
  s["nominal_eta"] = plan->nominal_eta;
  s["p"] = c.p;
  s["delta0"] = c.delta0;
  s["delta1"] = c.delta1;
  s["shrinks"] = plan->shrinks;
  if (config.problem == Problem::kOco) {
    s["beta"] = plan->spec.measure.beta;
    s["lambda"] = plan->spec.measure.lambda;
    s["radius"] = plan->spec.measure.radius;
  }
  s["budget"] = BudgetJson(plan->budget);
  s["regret"] = MomentsJson(summary->regret);
  s["switches_x"] = MomentsJson(summary->switches_x);
  s["switches_y"] = MomentsJson(summary->switches_y);
  s["total_loss"] = MomentsJson(summary->total_loss);

  Json prov;
  prov["library_version"] = L2P_VERSION;
  prov["config"] = Json::parse(RunConfigToJson(config));
  prov["base_seed"] = config.base_seed;
  Json seeds = Json::array();
  for (const RepRow& row : summary->rows) seeds.push_back(row.seed);
  prov["rep_seeds"] = seeds;
  if (config.fresh_stream_per_rep) {
    Json stream_seeds = Json::array();
    for (int64_t r = 0; r < config.reps; ++r) {
      stream_seeds.push_back(
          MixSeed(config.adversary.seed, static_cast<uint64_t>(r)));
    }
    prov["stream_seeds"] = stream_seeds;
  } else {
    prov["stream_seed"] = config.adversary.seed;
  }

  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create " << dir.string() << ": " << ec.message()
        << "\n";
    return kExitFailure;
  }
  for (const auto& [name, contents] :
       {std::pair<std::string, std::string>{"reps.csv",
                                            RepRowsToCsv(summary->rows)},
        {"summary.json", s.dump(2) + "\n"},
        {"provenance.json", prov.dump(2) + "\n"}}) {
    const absl::Status written = WriteFile(dir / name, contents);
    if (!written.ok()) return Report(written, err);
  }
  out << "mean_regret=" << Num(summary->regret.mean) << "\n"
      << "stddev_regret=" << Num(summary->regret.stddev) << "\n"
      << "epsilon=" << Num(plan->budget.epsilon) << "\n"
      << "delta=" << Num(plan->budget.delta) << "\n"
      << "output_dir=" << dir.string() << "\n";
  return kExitOk;
}

int CmdSweep(const RunConfig& config, const std::vector<double>& grid,
             std::ostream& out, std::ostream& err) {
  if (grid.empty()) {
    return Report(absl::InvalidArgumentError("epsilon grid is empty"), err);
  }
  if (config.overrides.has_value()) {
    return Report(absl::InvalidArgumentError(
                      "a sweep tunes per epsilon; remove the overrides block"),
                  err);
  }
  if (grid.size() < 2) {
    err << "warning: a single-point grid shows no trend\n";
  }
  const int threads = ResolveThreads(config.threads);
  std::string csv =
      "epsilon,B,eta,p,reps,mean_regret,stddev_regret,mean_switches_x,"
      "budget_epsilon,budget_delta,theory\n";
  for (double eps : grid) {
    RunConfig point = config;
    point.epsilon = eps;
    absl::StatusOr<RunPlan> plan = PlanRun(point);
    if (!plan.ok()) return Report(plan.status(), err);
    absl::StatusOr<MonteCarloSummary> summary =
        RunReplicates(point, *plan, threads);
    if (!summary.ok()) return Report(summary.status(), err);
    const L2PConfig& c = plan->spec.config;
    const std::string theory =
        config.problem == Problem::kOpe
            ? absl::StrFormat("%.17g",
                              DpOpeRegretBound(config.horizon,
                                               config.dimension, eps,
                                               config.delta))
            : std::string();
    absl::StrAppend(
        &csv,
        absl::StrFormat("%.17g,%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,"
                        "%.17g,%s\n",
                        eps, c.batch_size, c.eta, c.p, config.reps,
                        summary->regret.mean, summary->regret.stddev,
                        summary->switches_x.mean, plan->budget.epsilon,
                        plan->budget.delta, theory));
  }
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create " << dir.string() << ": " << ec.message()
        << "\n";
    return kExitFailure;
  }
  const absl::Status written = WriteFile(dir / "sweep.csv", csv);
  if (!written.ok()) return Report(written, err);
  out << csv;
  return kExitOk;
}

absl::StatusOr<LowerBoundReport> RunLowerBoundDemo(const LowerBoundArgs& args) {
  if (args.dimension < 1 || args.reps < 1) {
    return absl::InvalidArgumentError("d and reps must be positive");
  }
  LowerBoundReport report;
  L2P_ASSIGN_OR_RETURN(report.layout,
                       ComputeEpochLayout(args.horizon, args.epsilon));
  if (report.layout.clamped) {
    report.warnings.push_back(absl::StrCat(
        "requested ", report.layout.requested_epochs,
        " epochs exceeds T; clamped to ", report.layout.epochs));
  }
  if (args.dimension == 1) {
    report.warnings.push_back("d = 1 is degenerate: every regret is 0");
  }
  report.switch_budget =
      args.switch_budget > 0 ? args.switch_budget : report.layout.epochs;
  report.comparator_quantity =
      std::sqrt(static_cast<double>(report.layout.epochs)) *
      static_cast<double>(report.layout.epoch_length);
  if (args.dimension >= 2) {
    absl::StatusOr<TunedConfig> tuned =
        TuneOpe(args.horizon, args.dimension, args.epsilon, args.delta);
    if (tuned.ok()) {
      report.tuned = *tuned;
    } else {
      report.warnings.push_back(absl::StrCat("no tuned L2P column: ",
                                             tuned.status().message()));
    }
  }

  report.rows.resize(args.reps);
  L2P_RETURN_IF_ERROR(ParallelFor(
      args.reps, args.threads, [&](int64_t r) -> absl::Status {
        const uint64_t seed = MixSeed(args.base_seed, static_cast<uint64_t>(r));
        L2P_ASSIGN_OR_RETURN(
            LossStream stream,
            EpochLowerBoundStream(args.horizon, args.epsilon, args.dimension,
                                  MixSeed(seed, 0)));
        L2P_ASSIGN_OR_RETURN(
            GameResult straw,
            StrawmanFixedSwitch(stream, report.switch_budget,
                                MixSeed(seed, 1)));
        LowerBoundRow& row = report.rows[r];
        row.rep = r;
        row.seed = seed;
        row.strawman_regret = straw.regret;
        if (report.tuned.has_value()) {
          GameSpec spec;
          spec.config = report.tuned->config;
          L2P_ASSIGN_OR_RETURN(GameResult l2p,
                               PlayGame(spec, stream, MixSeed(seed, 2)));
          row.l2p_regret = l2p.regret;
        }
        return absl::OkStatus();
      }));

  std::vector<double> straw, l2p;
  for (const LowerBoundRow& row : report.rows) {
    straw.push_back(row.strawman_regret);
    if (row.l2p_regret.has_value()) l2p.push_back(*row.l2p_regret);
  }
  report.strawman_regret = ComputeMoments(std::move(straw));
  report.l2p_regret = ComputeMoments(std::move(l2p));
  return report;
}

int CmdLowerBound(const LowerBoundArgs& args, std::ostream& out,
                  std::ostream& err) {
  absl::StatusOr<LowerBoundReport> report = RunLowerBoundDemo(args);
  if (!report.ok()) return Report(report.status(), err);
  for (const std::string& w : report->warnings) err << "warning: " << w << "\n";
  out << "rep,seed,T,epsilon,d,epochs,epoch_length,clamped,switch_budget,"
         "strawman_regret,l2p_regret,comparator_quantity\n";
  for (const LowerBoundRow& row : report->rows) {
    out << absl::StrFormat(
        "%d,%d,%d,%.17g,%d,%d,%d,%d,%d,%.17g,%s,%.17g\n", row.rep, row.seed,
        args.horizon, args.epsilon, args.dimension, report->layout.epochs,
        report->layout.epoch_length, report->layout.clamped ? 1 : 0,
        report->switch_budget, row.strawman_regret,
        row.l2p_regret.has_value() ? absl::StrFormat("%.17g", *row.l2p_regret)
                                   : std::string(),
        report->comparator_quantity);
  }
  return kExitOk;
}

int CmdAccount(const AccountArgs& args, std::ostream& out, std::ostream& err) {
  if (args.horizon < 1 || args.batch_size < 1) {
    return Report(absl::InvalidArgumentError("T and B must be positive"), err);
  }
  const PrivacyBudget b =
      L2PPrivacy(args.eta, args.p, args.horizon, args.batch_size, args.delta0,
                 args.delta1);
  if (args.json) {
    out << BudgetJson(b).dump() << "\n";
    return kExitOk;
  }
  out << "epsilon=" << Num(b.epsilon) << "\n"
      << "delta=" << Num(b.delta) << "\n"
      << "preconditions_met=" << (b.preconditions_met ? "true" : "false")
      << "\n";
  for (const std::string& note : b.notes) out << "note=" << note << "\n";
  return kExitOk;
}

int CmdAudit(const AuditArgs& args, std::ostream& out, std::ostream& err) {
  const bool epsilon_test = args.test == "epsilon";
  if (!epsilon_test && args.test != "marginal" && args.test != "ratio" &&
      args.test != "switches") {
    return Report(absl::InvalidArgumentError(absl::StrCat(
                      "unknown audit '", args.test,
                      "'; expected marginal, ratio, epsilon or switches")),
                  err);
  }
  L2PConfig config;
  config.horizon = args.horizon;
  config.batch_size = args.batch_size;
  config.eta = args.eta.value_or(0.1);
  config.p = args.p;
  config.delta0 = 0.0;
  config.delta1 = args.delta1;
  if (epsilon_test && !args.eta.has_value()) {
    absl::StatusOr<TunedConfig> tuned = TuneOpe(
        args.horizon, args.dimension, args.epsilon, args.delta);
    if (!tuned.ok()) return Report(tuned.status(), err);
    config = tuned->config;
  }
  if (absl::Status s = ValidateConfig(config); !s.ok()) return Report(s, err);

  absl::StatusOr<LossStream> stream =
      AuditStream(args.dimension, args.horizon, args.seed);
  if (!stream.ok()) return Report(stream.status(), err);
  AuditOptions options;
  options.runs = args.runs;
  options.base_seed = args.seed;
  options.threads = args.threads;

  std::vector<AuditReport> reports;
  if (args.test == "marginal") {
    if (args.batch_index == 0) {
      absl::StatusOr<std::vector<AuditReport>> all =
          MarginalTvByBatch(config, *stream, options);
      if (!all.ok()) return Report(all.status(), err);
      reports = *std::move(all);
    } else {
      absl::StatusOr<AuditReport> one =
          MarginalTvTest(config, *stream, args.batch_index, options);
      if (!one.ok()) return Report(one.status(), err);
      reports.push_back(*std::move(one));
    }
  } else if (args.test == "ratio") {
    absl::StatusOr<AuditReport> r = RatioRangeCheck(config, *stream, options);
    if (!r.ok()) return Report(r.status(), err);
    reports.push_back(*std::move(r));
  } else if (epsilon_test) {
    if (args.neighbor_index < 0 || args.neighbor_index >= args.horizon) {
      return Report(absl::InvalidArgumentError("neighbor index out of range"),
                    err);
    }
    std::vector<double> flipped;
    for (double v : stream->Row(args.neighbor_index)) flipped.push_back(1.0 - v);
    absl::StatusOr<LossStream> neighbor =
        NeighborOf(*stream, args.neighbor_index, flipped);
    if (!neighbor.ok()) return Report(neighbor.status(), err);
    EpsilonAuditOptions eo;
    eo.run = options;
    absl::StatusOr<AuditReport> r = EmpiricalEpsilon(
        config, *stream, *neighbor, L2PPrivacy(config).epsilon, eo);
    if (!r.ok()) return Report(r.status(), err);
    reports.push_back(*std::move(r));
  } else {
    GameSpec spec;
    spec.config = config;
    MonteCarloOptions mc;
    mc.reps = args.runs;
    mc.base_seed = args.seed;
    mc.threads = args.threads;
    mc.keep_results = true;
    absl::StatusOr<MonteCarloSummary> summary = MonteCarlo(spec, *stream, mc);
    if (!summary.ok()) return Report(summary.status(), err);
    absl::StatusOr<AuditReport> r = SwitchStatistics(summary->results, config);
    if (!r.ok()) return Report(r.status(), err);
    reports.push_back(*std::move(r));
  }

  bool all_pass = true;
  for (const AuditReport& r : reports) {
    out << AuditReportToJson(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitFailure;
}

int CmdTune(const TuneArgs& args, std::ostream& out, std::ostream& err) {
  Json j;
  if (args.problem == "ope") {
    absl::StatusOr<TunedConfig> t =
        TuneOpe(args.horizon, args.dimension, args.epsilon, args.delta);
    if (!t.ok()) return Report(t.status(), err);
    j["problem"] = "ope";
    j["T"] = t->config.horizon;
    j["B"] = t->config.batch_size;
    j["eta"] = t->config.eta;
    j["p"] = t->config.p;
    j["delta0"] = t->config.delta0;
    j["delta1"] = t->config.delta1;
    j["shrinks"] = t->shrinks;
    j["budget"] = BudgetJson(t->budget);
  } else if (args.problem == "oco") {
    absl::StatusOr<OcoTuning> t =
        TuneOco(args.horizon, args.dimension, args.epsilon, args.delta,
                args.lipschitz, args.diameter);
    if (!t.ok()) return Report(t.status(), err);
    j["problem"] = "oco";
    j["T"] = t->config.horizon;
    j["B"] = t->config.batch_size;
    j["eta"] = t->config.eta;
    j["nominal_eta"] = t->nominal_eta;
    j["p"] = t->config.p;
    j["delta0"] = t->config.delta0;
    j["delta1"] = t->config.delta1;
    j["beta"] = t->beta;
    j["lambda"] = t->lambda;
    j["radius"] = t->radius;
    j["shrinks"] = t->shrinks;
    j["budget"] = BudgetJson(t->budget);
  } else {
    return Report(absl::InvalidArgumentError(absl::StrCat(
                      "problem must be ope or oco, got '", args.problem, "'")),
                  err);
  }
  if (args.json) {
    out << j.dump() << "\n";
    return kExitOk;
  }
  for (const auto& item : j.items()) {
    if (item.key() == "budget") {
      const Json& b = item.value();
      out << "epsilon=" << Num(b["epsilon"].get<double>()) << "\n"
          << "delta=" << Num(b["delta"].get<double>()) << "\n"
          << "preconditions_met="
          << (b["preconditions_met"].get<bool>() ? "true" : "false") << "\n";
      for (const auto& note : b["notes"]) {
        out << "note=" << note.get<std::string>() << "\n";
      }
    } else if (item.value().is_number_float()) {
      out << item.key() << "=" << Num(item.value().get<double>()) << "\n";
    } else if (item.value().is_string()) {
      out << item.key() << "=" << item.value().get<std::string>() << "\n";
    } else {
      out << item.key() << "=" << item.value().dump() << "\n";
    }
  }
  return kExitOk;
}

}  // namespace l2p::cli
