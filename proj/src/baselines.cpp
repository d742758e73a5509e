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

#include "edgesched/baselines.hpp"

#include <cmath>

#include "edgesched/common.hpp"

namespace edgesched {

std::optional<DispatchAction> greedy_dispatch(const ClusterState& env, int eap) {
  const auto head = env.peek_head(eap);
  if (!head) return std::nullopt;
  const int w = env.request(*head).record.service_type;
  int best = -1;
  double best_util = 0;
  for (int n = 0; n < env.node_count(); ++n) {
    if (!env.node_accepts(n, w)) continue;
    const double util = 0.5 * (env.cpu_utilization(n) + env.mem_utilization(n));
    if (best < 0 || util < best_util) {
      best = n;
      best_util = util;
    }
  }
  return DispatchAction{eap, best + 1, *head};
}

std::vector<std::optional<DispatchAction>> greedy_dispatch_all(const ClusterState& env) {
  std::vector<std::optional<DispatchAction>> actions;
  for (int b = 0; b < env.eap_count(); ++b) actions.push_back(greedy_dispatch(env, b));
  return actions;
}

void validate(const ThresholdAutoscalerConfig& cfg) {
  if (!(cfg.scale_down_threshold > 0 && cfg.scale_down_threshold < cfg.scale_up_threshold &&
        cfg.scale_up_threshold < 1)) {
    throw ValidationError("autoscaler needs 0 < down < up < 1");
  }
  if (!(cfg.target_utilization > 0 && cfg.target_utilization < 1)) {
    throw ValidationError("autoscaler target must be in (0, 1)");
  }
  if (cfg.min_replicas < 0) throw ValidationError("min_replicas must be >= 0");
}

OrchestrationAction threshold_autoscale(const ClusterState& env,
                                        const ThresholdAutoscalerConfig& cfg) {
  validate(cfg);
  OrchestrationAction action;
  const auto& catalog = env.catalog();
  // Reserved cpu as the plan unfolds, so two adds never overfill one node.
  std::vector<double> cpu(static_cast<std::size_t>(env.node_count()));
  std::vector<double> mem(static_cast<std::size_t>(env.node_count()));
  for (int n = 0; n < env.node_count(); ++n) {
    cpu[static_cast<std::size_t>(n)] = env.nodes()[static_cast<std::size_t>(n)].reserved_cpu(catalog);
    mem[static_cast<std::size_t>(n)] = env.nodes()[static_cast<std::size_t>(n)].reserved_mem(catalog);
  }

  for (int w = 1; w <= env.service_count(); ++w) {
    double busy = 0;
    double samples = 0;
    int deployed = 0;
    for (int n = 0; n < env.node_count(); ++n) {
      const auto& u = env.usage(n, w);
      busy += u.busy_samples;
      samples += u.replicate_samples;
      deployed += env.nodes()[static_cast<std::size_t>(n)].accepting(w);
    }
    if (deployed == 0 || samples <= 0) continue;
    const double util = busy / samples;
    const int desired = static_cast<int>(std::ceil(deployed * util / cfg.target_utilization));
    const auto& spec = catalog[w];

    if (util > cfg.scale_up_threshold && desired > deployed) {
      int best = -1;
      double best_share = 0;
      for (int n = 0; n < env.node_count(); ++n) {
        const auto& node = env.nodes()[static_cast<std::size_t>(n)];
        const auto k = static_cast<std::size_t>(n);
        if (cpu[k] + spec.replicate_cpu > node.cpu_capacity ||
            mem[k] + spec.replicate_mem > node.mem_capacity) {
          continue;
        }
        const double share = cpu[k] / node.cpu_capacity;
        if (best < 0 || share < best_share) {
          best = n;
          best_share = share;
        }
      }
      if (best >= 0) {
        cpu[static_cast<std::size_t>(best)] += spec.replicate_cpu;
        mem[static_cast<std::size_t>(best)] += spec.replicate_mem;
        action.steps.push_back(NodeScaling{best, w});
      }
    } else if (util < cfg.scale_down_threshold && desired < deployed &&
               deployed > cfg.min_replicas) {
      int best = -1;
      double best_busy = 0;
      for (int n = 0; n < env.node_count(); ++n) {
        if (env.nodes()[static_cast<std::size_t>(n)].accepting(w) == 0) continue;
        const auto& u = env.usage(n, w);
        const double frac = u.replicate_samples > 0 ? u.busy_samples / u.replicate_samples : 0.0;
        if (best < 0 || frac < best_busy) {
          best = n;
          best_busy = frac;
        }
      }
      if (best >= 0) action.steps.push_back(NodeScaling{best, -w});
    }
  }
  return action;
}

}  // namespace edgesched
