// Copyright 2026 The mbpurify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "mbpurify/cli.hpp"

using mbpurify::cli::RunConfig;

namespace {

int dispatch(const RunConfig& cfg) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!cfg.output_path.empty()) {
    file.open(cfg.output_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot open output file " << cfg.output_path << "\n";
      return mbpurify::cli::kExitUsage;
    }
    os = &file;
  }
  try {
    if (cfg.command == "thresholds") return mbpurify::cli::cmd_thresholds(cfg, *os);
    if (cfg.command == "yield-curve") return mbpurify::cli::cmd_yield_curve(cfg, *os);
    if (cfg.command == "simulate") return mbpurify::cli::cmd_simulate(cfg, *os);
    if (cfg.command == "selftest") return mbpurify::cli::cmd_selftest(cfg, *os);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mbpurify::cli::kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mbpurify::cli::kExitInfeasible;
  }
  return mbpurify::cli::kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-based hashing entanglement purification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  RunConfig cfg;
  bool seed_given = false;

  auto add_target = [&](CLI::App* cmd, bool allow_all) {
    auto values = allow_all
                      ? std::vector<std::string>{"bell", "cluster1d", "cluster2d", "all"}
                      : std::vector<std::string>{"bell", "cluster1d", "cluster2d"};
    cmd->add_option("--target", cfg.target, "Purification target")
        ->check(CLI::IsMember(values));
  };
  auto add_common_output = [&](CLI::App* cmd) {
    cmd->add_option("--output", cfg.output_path, "Write the report to this file");
  };

  CLI::App* thresholds =
      app.add_subcommand("thresholds", "Closed-form noise thresholds for all targets");
  add_target(thresholds, true);
  thresholds->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  add_common_output(thresholds);

  CLI::App* yield_curve =
      app.add_subcommand("yield-curve", "Asymptotic yield as a CSV curve over q");
  cfg.target = "bell";
  add_target(yield_curve, false);
  yield_curve->add_option("--q-from", cfg.q_from, "Curve start");
  yield_curve->add_option("--q-to", cfg.q_to, "Curve end");
  yield_curve->add_option("--steps", cfg.steps, "Number of grid points (>= 2)");
  yield_curve->add_option("--convention", cfg.convention, "q -> fidelity conversion")
      ->check(CLI::IsMember({"paper_product", "exact"}));
  add_common_output(yield_curve);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo purification runs (JSON report)");
  simulate->add_option("--N", cfg.n_pairs, "Input pair count");
  simulate->add_option("--M", cfg.n_output, "Output pair count (default: from --delta)");
  simulate->add_option("--delta", cfg.delta, "Safety margin in M = N(1 - S - delta)");
  simulate->add_option("--p", cfg.p, "Resource-state LDN parameter");
  CLI::Option* q_opt = simulate->add_option("--q", cfg.q, "Input LDN parameter");
  simulate->add_option("--F", cfg.fidelity, "Input Werner fidelity (alternative to --q)")
      ->excludes(q_opt);
  simulate->add_option("--trials", cfg.trials, "Monte Carlo trials");
  simulate->add_option("--seed", cfg.seed, "Master seed (required)")
      ->required()
      ->trigger_on_parse();
  simulate->add_option("--mode", cfg.mode, "Execution model")
      ->check(CLI::IsMember({"mb", "gate"}));
  simulate->add_option("--gate-noise", cfg.gate_noise, "Per-gate LDN in gate mode");
  simulate->add_option("--convention", cfg.convention, "q -> fidelity conversion for --F")
      ->check(CLI::IsMember({"paper_product", "exact"}));
  simulate->add_option("--cutoff", cfg.cutoff, "Exhaustive decoder likelihood cutoff");
  simulate->add_option("--threads", cfg.threads, "Worker threads (0 = auto)");
  add_common_output(simulate);
  (void)seed_given;

  CLI::App* selftest = app.add_subcommand("selftest", "Run all module invariant suites");
  selftest->add_option("--seed", cfg.seed, "Master seed for the suites");
  add_common_output(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mbpurify::cli::kExitUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  return dispatch(cfg);
}
