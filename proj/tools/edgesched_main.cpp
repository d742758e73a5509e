// Copyright 2026 The edgesched Authors
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

// edgesched train | eval | suite

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "edgesched/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "run";
  std::string pattern;
  std::string trace;
  std::optional<int> episodes;
  std::optional<double> base_rate;
  bool full = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--seed", f.seed, "experiment seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--pattern", f.pattern, "request pattern")
      ->check(CLI::IsMember({"p1", "p2", "p3", "p4", "file"}));
  cmd->add_option("--trace", f.trace, "trace CSV for --pattern file");
  cmd->add_option("--episodes", f.episodes, "training episodes")->check(CLI::NonNegativeNumber);
  cmd->add_option("--base-rate", f.base_rate, "arrivals per slot")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--full-topology", f.full, "5 eAPs x 8 nodes, 30 services");
  cmd->add_flag("--quiet", f.quiet, "no per-episode progress");
}

edgesched::ExperimentConfig resolve(const Flags& f) {
  using namespace edgesched;
  ExperimentConfig cfg = f.config.empty() ? (f.full ? full_config() : desk_config())
                                          : load_config(f.config);
  if (!f.config.empty() && f.full) {
    throw ConfigError("--full-topology", "cannot be combined with --config; use \"preset\"");
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.pattern.empty()) cfg.workload.pattern = parse_pattern_kind(f.pattern);
  if (!f.trace.empty()) cfg.workload.trace = f.trace;
  if (f.episodes) cfg.training.episodes = *f.episodes;
  if (f.base_rate) cfg.workload.base_rate = *f.base_rate;
  validate(cfg);
  return cfg;
}

void print_result(const edgesched::EvalResult& r) {
  std::printf("mean_phi_f=%.6f phi_prime=%.6f arrived=%lld completed=%lld cost_kb=%.1f image_mb=%.1f\n",
              r.mean_phi_f, r.run.phi_prime(), static_cast<long long>(r.run.arrived),
              static_cast<long long>(r.run.completed), r.run.cost_kb, r.run.image_mb);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge dispatch and orchestration simulator"};
  app.require_subcommand(1);
  Flags flags;
  std::string checkpoints;
  std::string suite;

  auto* train = app.add_subcommand("train", "train the configured learners, then evaluate");
  add_common(train, flags);
  auto* eval = app.add_subcommand("eval", "evaluate from checkpoints");
  add_common(eval, flags);
  eval->add_option("--checkpoints", checkpoints, "checkpoint directory");
  auto* run_suite = app.add_subcommand("suite", "run an experiment grid");
  add_common(run_suite, flags);
  run_suite->add_option("--suite,name", suite, "suite name")
      ->required()
      ->check(CLI::IsMember({"patterns", "dequeue", "load_balance", "hyper_sweep", "baselines"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(flags);
    edgesched::Progress progress;
    if (!flags.quiet) {
      progress = [](int e, double phi) { std::fprintf(stderr, "episode %d mean_phi_f=%.4f\n", e, phi); };
    }
    if (*train) {
      print_result(edgesched::run_training(cfg, flags.out, progress));
    } else if (*eval) {
      const bool needs = cfg.dispatch == edgesched::DispatchKind::kCmmac ||
                         cfg.orchestrate == edgesched::OrchestrateKind::kGpg;
      if (needs && checkpoints.empty()) {
        throw edgesched::ConfigError("--checkpoints", "required by the configured learners");
      }
      print_result(edgesched::run_eval(cfg, checkpoints, flags.out));
    } else {
      edgesched::run_suite(suite, cfg, flags.out, progress);
      std::printf("suite %s written to %s\n", suite.c_str(), flags.out.c_str());
    }
  } catch (const edgesched::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
