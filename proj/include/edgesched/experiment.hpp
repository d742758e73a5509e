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

// Training and evaluation drivers, run directories and experiment suites.
//
// A run directory holds:
//   config.json        resolved configuration (rerunnable as --config)
//   seed.txt           the experiment seed
//   git_describe.txt   source revision of the binary
//   learning_curve.csv episode,mean_phi_f (training runs)
//   frames.csv         per-frame metrics of the evaluation (fixed schema)
//   summary.json       run-level totals
//   checkpoints/       one .bin per network

#ifndef EDGESCHED_EXPERIMENT_HPP_
#define EDGESCHED_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "edgesched/config.hpp"
#include "edgesched/simulation.hpp"

namespace edgesched {

const char* git_describe();

ServiceCatalog make_catalog(const ExperimentConfig& cfg);

/// Request stream for `frames` frames at base_rate * rate_scale; pattern
/// seeds derive from stream_seed. File traces ignore frames and rate_scale.
std::vector<Request> make_stream(const ExperimentConfig& cfg, int frames, double rate_scale,
                                 std::uint64_t stream_seed);

/// Environment with the initial replicate layout already placed.
ClusterState make_env(const ExperimentConfig& cfg, std::vector<Request> stream);

/// Seeds for training episode e and evaluation sequence k. Evaluation traffic
/// depends on the experiment seed only, so policies compared under one seed
/// see the same requests.
std::uint64_t train_stream_seed(std::uint64_t seed, int episode);
std::uint64_t eval_stream_seed(std::uint64_t seed, int sequence);

struct Agents {
  std::unique_ptr<Cmmac> cmmac;
  std::unique_ptr<GpgOrchestrator> gpg;
};

/// Learners required by the configured policies, freshly initialized.
Agents make_agents(const ExperimentConfig& cfg);
PolicySet policy_set(const ExperimentConfig& cfg, Agents& agents);

/// Curriculum stage of episode e out of `episodes` (stages split evenly).
CurriculumStage stage_for(const TrainingConfig& training, int episode);

struct TrainResult {
  std::vector<double> learning_curve;  // mean phi_f per episode
};

using Progress = std::function<void(int episode, double mean_phi_f)>;

TrainResult train(const ExperimentConfig& cfg, Agents& agents, const Progress& progress = {});

struct EvalResult {
  std::vector<FrameMetrics> frames;  // all sequences, renumbered consecutively
  RunMetrics run;
  double mean_phi_f = 0;
};

EvalResult evaluate(const ExperimentConfig& cfg, Agents& agents);

void save_agents(const Agents& agents, const std::filesystem::path& dir);
/// Throws ValidationError when a checkpoint is missing or shaped for a
/// different topology.
void load_agents(Agents& agents, const std::filesystem::path& dir);

/// Writes config.json, seed.txt and git_describe.txt.
void write_run_header(const ExperimentConfig& cfg, const std::filesystem::path& dir);
void write_learning_curve(const TrainResult& result, const std::filesystem::path& path);
void write_eval(const EvalResult& result, const std::filesystem::path& dir);

/// train: trains, saves checkpoints, evaluates. eval: loads checkpoints (when
/// the policies need them) and evaluates.
EvalResult run_training(const ExperimentConfig& cfg, const std::filesystem::path& out,
                        const Progress& progress = {});
EvalResult run_eval(const ExperimentConfig& cfg, const std::filesystem::path& checkpoints,
                    const std::filesystem::path& out);

struct SuiteCell {
  std::string name;
  ExperimentConfig cfg;
};

/// Cells of a named suite: patterns, dequeue, load_balance, hyper_sweep,
/// baselines. Throws ValidationError for an unknown name.
std::vector<SuiteCell> suite_cells(const std::string& name, const ExperimentConfig& base);

/// Runs every cell into out/<cell>/ and writes out/summary.csv.
void run_suite(const std::string& name, const ExperimentConfig& base,
               const std::filesystem::path& out, const Progress& progress = {});

}  // namespace edgesched

#endif  // EDGESCHED_EXPERIMENT_HPP_
