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

// The two-time-scale control loop: orchestrate at every frame boundary, then
// dispatch, simulate and learn once per slot.

#ifndef EDGESCHED_SIMULATION_HPP_
#define EDGESCHED_SIMULATION_HPP_

#include <string>
#include <vector>

#include "edgesched/baselines.hpp"
#include "edgesched/cluster.hpp"
#include "edgesched/cmmac.hpp"
#include "edgesched/config.hpp"
#include "edgesched/gpg.hpp"
#include "edgesched/metrics.hpp"

namespace edgesched {

/// Round-robin initial layout: `replicas` passes over services 1..W, each
/// replicate placed on the next node (cyclically) that can hold it. Returns
/// the number of replicates placed.
int deploy_initial(ClusterState& env, int replicas);

/// Policies driving one run. Learners are borrowed, not owned.
struct PolicySet {
  DispatchKind dispatch = DispatchKind::kGreedy;
  OrchestrateKind orchestrate = OrchestrateKind::kNone;
  Cmmac* cmmac = nullptr;
  GpgOrchestrator* gpg = nullptr;
  ThresholdAutoscalerConfig native;
};

struct EpisodeOptions {
  int frames = 1;
  int drain_frames = 0;
  PolicyMode mode = PolicyMode::kGreedy;
  bool train_dispatch = false;
  bool train_orchestration = false;
  double epsilon = 1.0;  // reward load-balance weight for logging and learning
  std::vector<std::string>* event_log = nullptr;  // "orchestrate f", "dispatch t"
};

struct EpisodeResult {
  std::vector<FrameMetrics> frames;
  RunMetrics run;
  double mean_phi_f = 0;
};

EpisodeResult run_episode(ClusterState& env, PolicySet& policies, const EpisodeOptions& options,
                          Rng& rng);

}  // namespace edgesched

#endif  // EDGESCHED_SIMULATION_HPP_
