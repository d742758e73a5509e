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

#include "edgesched/simulation.hpp"

namespace edgesched {

int deploy_initial(ClusterState& env, int replicas) {
  require(replicas >= 0, "replica count must be >= 0");
  int cursor = 0;
  int placed = 0;
  const int N = env.node_count();
  for (int pass = 0; pass < replicas; ++pass) {
    for (int w = 1; w <= env.service_count(); ++w) {
      for (int tries = 0; tries < N; ++tries) {
        const int n = cursor;
        cursor = (cursor + 1) % N;
        if (env.deploy(n, w)) {
          ++placed;
          break;
        }
      }
    }
  }
  return placed;
}

namespace {

void log_event(const EpisodeOptions& o, std::string entry) {
  if (o.event_log) o.event_log->push_back(std::move(entry));
}

// Orchestration step at a frame boundary; returns the scaling applied.
ScalingReport orchestrate(ClusterState& env, PolicySet& p, const EpisodeOptions& o, Rng& rng,
                          bool at_run_end) {
  ScalingReport report;
  switch (p.orchestrate) {
    case OrchestrateKind::kNone:
      break;
    case OrchestrateKind::kNativeThreshold:
      if (!at_run_end) report = env.apply_scaling(threshold_autoscale(env, p.native));
      break;
    case OrchestrateKind::kGpg: {
      require(p.gpg != nullptr, "gpg orchestration without a learner");
      if (o.train_orchestration && p.gpg->awaiting_reward()) {
        p.gpg->record_reward(orchestration_reward(env));
        if (p.gpg->recorded_frames() >= p.gpg->config().episode_frames ||
            (at_run_end && p.gpg->recorded_frames() > 0)) {
          p.gpg->finish_episode();
        }
      }
      if (!at_run_end) {
        report = env.apply_scaling(p.gpg->decide(env, o.mode, rng, o.train_orchestration));
      }
      break;
    }
  }
  if (!at_run_end) env.reset_usage();
  return report;
}

}  // namespace

EpisodeResult run_episode(ClusterState& env, PolicySet& p, const EpisodeOptions& o, Rng& rng) {
  require(o.frames >= 0 && o.drain_frames >= 0, "frame counts must be >= 0");
  require(env.clock().at_frame_boundary(), "episodes start on a frame boundary");
  if (p.dispatch == DispatchKind::kCmmac) require(p.cmmac != nullptr, "cmmac dispatch without a learner");
  if (p.gpg && o.train_orchestration) p.gpg->discard_episode();
  if (p.cmmac) p.cmmac->discard_pending();

  MetricsAccumulator metrics(env.clock().slots_per_frame);
  const int total = o.frames + o.drain_frames;
  for (int f = 0; f < total; ++f) {
    log_event(o, "orchestrate " + std::to_string(env.clock().frame_index()));
    metrics.record_scaling(orchestrate(env, p, o, rng, false));

    for (int s = 0; s < env.clock().slots_per_frame; ++s) {
      log_event(o, "dispatch " + std::to_string(env.clock().slot_index));
      std::vector<std::optional<DispatchAction>> actions;
      if (p.dispatch == DispatchKind::kCmmac) {
        actions = p.cmmac->decide(env, o.mode, rng, o.train_dispatch);
      } else {
        actions = greedy_dispatch_all(env);
      }
      const SlotOutcome outcome = env.step_slot(actions);
      const double reward = compute_reward(outcome, o.epsilon).value;
      if (p.dispatch == DispatchKind::kCmmac && o.train_dispatch) p.cmmac->observe(env, reward);
      metrics.record_slot(outcome, reward);
    }
    if (p.dispatch == DispatchKind::kCmmac && o.train_dispatch) p.cmmac->end_frame();
    metrics.close_frame(env.clock());
  }
  orchestrate(env, p, o, rng, true);

  EpisodeResult result;
  result.frames = metrics.frames();
  result.run = metrics.run();
  result.mean_phi_f = mean_phi_f(result.frames);
  return result;
}

}  // namespace edgesched
