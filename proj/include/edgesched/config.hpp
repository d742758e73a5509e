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

// Experiment configuration and its JSON form. The schema is documented in
// README.md; every key is optional and falls back to the desk defaults.

#ifndef EDGESCHED_CONFIG_HPP_
#define EDGESCHED_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgesched/baselines.hpp"
#include "edgesched/catalog.hpp"
#include "edgesched/cluster.hpp"
#include "edgesched/cmmac.hpp"
#include "edgesched/gpg.hpp"
#include "edgesched/workload.hpp"

namespace edgesched {

enum class DispatchKind { kCmmac, kGreedy };
enum class OrchestrateKind { kGpg, kNativeThreshold, kNone };

const char* to_string(DispatchKind kind);
const char* to_string(OrchestrateKind kind);
const char* to_string(Aggregation mode);

struct CurriculumStage {
  int frames = 0;  // 0 means the full training length
  double rate_scale = 1.0;
};

struct WorkloadConfig {
  PatternKind pattern = PatternKind::kRaw;
  double base_rate = 1.2;  // arrivals per slot, cluster-wide
  int period_frames = 40;
  double amplitude = 0.5;
  std::string trace;  // CSV path when pattern is file
};

struct TrainingConfig {
  int episodes = 30;
  int episode_frames = 20;
  std::vector<CurriculumStage> curriculum{{10, 0.25}, {50, 0.5}, {0, 1.0}};
};

struct EvalConfig {
  int frames = 40;
  int drain_frames = 5;
  int sequences = 1;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  TopologySpec topology;
  std::vector<ServiceSpec> services;
  ClusterOptions cluster;
  int replicas_per_service = 2;  // initial layout
  WorkloadConfig workload;
  DispatchKind dispatch = DispatchKind::kCmmac;
  OrchestrateKind orchestrate = OrchestrateKind::kGpg;
  CmmacConfig cmmac;
  GpgConfig gpg;
  ThresholdAutoscalerConfig native;
  TrainingConfig training;
  EvalConfig eval;
};

/// 2 eAPs x 3 heterogeneous nodes, W = 6.
ExperimentConfig desk_config();
/// 5 eAPs x 8 nodes, W = 30, cloud parallelism 60.
ExperimentConfig full_config();

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& cfg);

/// Parses JSON text over the desk (or "preset": "full") defaults. Unknown
/// keys are errors.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full resolved configuration; parse_config(to_json(c)) reproduces c.
std::string to_json(const ExperimentConfig& cfg);

}  // namespace edgesched

#endif  // EDGESCHED_CONFIG_HPP_
