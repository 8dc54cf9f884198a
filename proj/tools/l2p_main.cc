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

// l2p: command-line front end. Run `l2p --help` for the subcommands.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "l2p/cli/commands.h"
#include "l2p/cli/run_config.h"

namespace {

using namespace l2p::cli;

int LoadAndRun(const std::string& path, int threads,
               const std::string& output_dir,
               const std::function<int(const RunConfig&)>& body) {
  absl::StatusOr<RunConfig> config = LoadRunConfig(path);
  if (!config.ok()) {
    std::cerr << "error: " << config.status().message() << "\n";
    return kExitConfig;
  }
  if (threads > 0) config->threads = threads;
  if (!output_dir.empty()) config->output_dir = output_dir;
  return body(*config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private online learning via the lazy-to-private transformation",
               "l2p"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(L2P_VERSION));

  std::string config_path;
  std::string output_dir;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "Monte Carlo run from a config");
  run->add_option("--config", config_path, "Run config JSON")->required();
  run->add_option("--threads", threads, "Worker threads (L2P_THREADS wins)");
  run->add_option("--output-dir", output_dir, "Override output_dir");

  std::vector<double> grid;
  CLI::App* sweep = app.add_subcommand("sweep", "Regret versus epsilon");
  sweep->add_option("--config", config_path, "Run config JSON")->required();
  sweep->add_option("--grid", grid, "Epsilon values")
      ->delimiter(',')
      ->required();
  sweep->add_option("--threads", threads, "Worker threads (L2P_THREADS wins)");
  sweep->add_option("--output-dir", output_dir, "Override output_dir");

  LowerBoundArgs lb;
  CLI::App* lower =
      app.add_subcommand("lower-bound", "Fixed-switch strawman on epoch losses");
  lower->add_option("--T", lb.horizon, "Rounds");
  lower->add_option("--epsilon", lb.epsilon, "Privacy parameter");
  lower->add_option("--d", lb.dimension, "Experts");
  lower->add_option("--reps", lb.reps, "Replicates");
  lower->add_option("--seed", lb.base_seed, "Base seed");
  lower->add_option("--switch-budget", lb.switch_budget,
                    "Strawman redraws (default: number of epochs)");
  lower->add_option("--delta", lb.delta, "Target delta for the L2P column");
  lower->add_option("--threads", threads, "Worker threads (L2P_THREADS wins)");

  AccountArgs acc;
  CLI::App* account = app.add_subcommand("account", "Privacy budget");
  account->add_option("--eta", acc.eta, "Divergence parameter");
  account->add_option("--p", acc.p, "Fake-switch probability");
  account->add_option("--T", acc.horizon, "Rounds");
  account->add_option("--B", acc.batch_size, "Batch size");
  account->add_option("--delta0", acc.delta0, "Measure slack");
  account->add_option("--delta1", acc.delta1, "Accounting slack");
  account->add_flag("--json", acc.json, "Emit JSON");

  AuditArgs aud;
  double audit_eta = 0.0;
  CLI::App* audit = app.add_subcommand("audit", "Empirical checks");
  audit->add_option("test", aud.test, "marginal, ratio, epsilon or switches")
      ->required();
  CLI::Option* audit_d = audit->add_option("--d", aud.dimension, "Experts");
  CLI::Option* audit_t = audit->add_option("--T", aud.horizon, "Rounds");
  audit->add_option("--B", aud.batch_size, "Batch size");
  CLI::Option* audit_eta_opt =
      audit->add_option("--eta", audit_eta, "Divergence parameter");
  audit->add_option("--p", aud.p, "Fake-switch probability");
  audit->add_option("--delta1", aud.delta1, "Accounting slack");
  audit->add_option("--epsilon", aud.epsilon, "Tuning target (epsilon test)");
  audit->add_option("--delta", aud.delta, "Tuning target (epsilon test)");
  audit->add_option("--runs", aud.runs, "Independent runs");
  audit->add_option("--seed", aud.seed, "Base seed");
  audit->add_option("--s", aud.batch_index, "Batch for the marginal test");
  audit->add_option("--index", aud.neighbor_index,
                    "Round changed in the neighbor (epsilon test)");
  audit->add_option("--threads", threads, "Worker threads (L2P_THREADS wins)");

  TuneArgs tn;
  CLI::App* tune = app.add_subcommand("tune", "Tuned parameters");
  tune->add_option("--problem", tn.problem, "ope or oco");
  tune->add_option("--T", tn.horizon, "Rounds");
  tune->add_option("--d", tn.dimension, "Dimension");
  tune->add_option("--epsilon", tn.epsilon, "Target epsilon");
  tune->add_option("--delta", tn.delta, "Target delta");
  tune->add_option("--L", tn.lipschitz, "Lipschitz bound (oco)");
  tune->add_option("--D", tn.diameter, "Domain diameter (oco)");
  tune->add_flag("--json", tn.json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  if (run->parsed()) {
    return LoadAndRun(config_path, threads, output_dir,
                      [](const RunConfig& c) {
                        return CmdRun(c, std::cout, std::cerr);
                      });
  }
  if (sweep->parsed()) {
    return LoadAndRun(config_path, threads, output_dir,
                      [&](const RunConfig& c) {
                        return CmdSweep(c, grid, std::cout, std::cerr);
                      });
  }
  if (lower->parsed()) {
    lb.threads = ResolveThreads(threads);
    return CmdLowerBound(lb, std::cout, std::cerr);
  }
  if (account->parsed()) return CmdAccount(acc, std::cout, std::cerr);
  if (audit->parsed()) {
    if (audit_eta_opt->count() > 0) aud.eta = audit_eta;
    if (aud.test == "epsilon") {
      if (audit_d->count() == 0) aud.dimension = 2;
      if (audit_t->count() == 0) aud.horizon = 10;
    }
    aud.threads = ResolveThreads(threads);
    return CmdAudit(aud, std::cout, std::cerr);
  }
  if (tune->parsed()) return CmdTune(tn, std::cout, std::cerr);
  return kExitConfig;
}
