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

// Non-learning reference policies.

#ifndef EDGESCHED_BASELINES_HPP_
#define EDGESCHED_BASELINES_HPP_

#include <optional>
#include <vector>

#include "edgesched/cluster.hpp"

namespace edgesched {

/// Lowest mean(cpu, mem) utilisation among the nodes the mask allows, ties to
/// the lower id; the cloud when no node is valid. nullopt on an empty queue.
std::optional<DispatchAction> greedy_dispatch(const ClusterState& env, int eap);
std::vector<std::optional<DispatchAction>> greedy_dispatch_all(const ClusterState& env);

/// Horizontal autoscaler analog driven by replicate busy fraction over the
/// last frame (the usage counters of ClusterState).
struct ThresholdAutoscalerConfig {
  double target_utilization = 0.5;
  double scale_up_threshold = 0.8;
  double scale_down_threshold = 0.2;
  int min_replicas = 1;  // per service, cluster-wide
};

void validate(const ThresholdAutoscalerConfig& cfg);

/// Per service w with deployed replicates:
///   util = busy samples / replicate samples, desired = ceil(d * util / target)
///   util > up and desired > d: +w on the node with the least reserved cpu
///     share that can fit it (ties to the lower id)
///   util < down, desired < d and d > min: -w on the node whose w replicates
///     were least busy (ties to the lower id)
/// Services are visited in order; no cap on the number of steps.
OrchestrationAction threshold_autoscale(const ClusterState& env,
                                        const ThresholdAutoscalerConfig& cfg);

}  // namespace edgesched

#endif  // EDGESCHED_BASELINES_HPP_
