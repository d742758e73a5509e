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

// Small topologies and request streams for tests.

#ifndef EDGESCHED_TESTS_FIXTURES_HPP_
#define EDGESCHED_TESTS_FIXTURES_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesched/cluster.hpp"
#include "edgesched/common.hpp"
#include "edgesched/workload.hpp"

namespace edgesched::fixture {

inline ServiceSpec service(double proc_ms, double cpu = 500, double mem = 512, double image = 200) {
  ServiceSpec s;
  s.nominal_proc_ms = proc_ms;
  s.replicate_cpu = cpu;
  s.replicate_mem = mem;
  s.image_size_mb = image;
  return s;
}

inline TopologySpec topology(int eaps, const std::vector<NodeSpec>& nodes, int cloud_parallelism = 60,
                             double slot_ms = 250, int slots_per_frame = 4) {
  TopologySpec t;
  t.eap_count = eaps;
  t.nodes = nodes;
  t.cloud.parallelism = cloud_parallelism;
  t.slot_ms = slot_ms;
  t.slots_per_frame = slots_per_frame;
  return t;
}

inline Request request(std::int64_t id, std::int64_t arrival, int service, std::int64_t deadline,
                       int eap = 0, double input_kb = 0, double cpu = 100, double mem = 64) {
  Request r;
  r.id = id;
  r.eap_id = eap;
  r.record = TraceRecord{arrival, service, deadline, cpu, mem, input_kb};
  return r;
}

// Random stream over the horizon, sorted and numbered.
inline std::vector<Request> random_stream(Rng& rng, int count, double horizon_ms, int services,
                                          int eaps, std::int64_t min_deadline = 100,
                                          std::int64_t max_deadline = 3000) {
  std::vector<TraceRecord> records;
  for (int i = 0; i < count; ++i) {
    TraceRecord r;
    r.arrival_ms = static_cast<std::int64_t>(uniform01(rng) * horizon_ms);
    r.service_type = 1 + static_cast<int>(rng() % static_cast<unsigned>(services));
    r.deadline_ms = min_deadline + static_cast<std::int64_t>(uniform01(rng) *
                                                             static_cast<double>(max_deadline - min_deadline));
    r.cpu_demand = 50 + 800 * uniform01(rng);
    r.mem_demand = 32 + 900 * uniform01(rng);
    r.input_size_kb = 500 * uniform01(rng);
    records.push_back(r);
  }
  return bind_to_eaps(std::move(records), eaps, rng());
}

// Random topology: 1..max_eaps eAPs with 1..max_nodes nodes each.
inline TopologySpec random_topology(Rng& rng, int max_eaps, int max_nodes) {
  TopologySpec t;
  t.eap_count = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_eaps));
  for (int b = 0; b < t.eap_count; ++b) {
    const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
    for (int k = 0; k < n; ++k) {
      NodeSpec s;
      s.eap_id = b;
      s.cpu_capacity = 1000 + 3000 * uniform01(rng);
      s.mem_capacity = 1024 + 6000 * uniform01(rng);
      s.speed_factor = 0.2 + uniform01(rng);
      t.nodes.push_back(s);
    }
  }
  t.cloud.parallelism = 1 + static_cast<int>(rng() % 8);
  t.slots_per_frame = 10;
  return t;
}

inline std::vector<ServiceSpec> random_services(Rng& rng, int W) {
  std::vector<ServiceSpec> s;
  for (int w = 0; w < W; ++w) {
    s.push_back(service(50 + 600 * uniform01(rng), 200 + 800 * uniform01(rng),
                        256 + 1024 * uniform01(rng), 50 + 300 * uniform01(rng)));
  }
  return s;
}

// Every valid target for eAP b's head: 0 (cloud) and j where node j-1 accepts.
inline std::vector<int> valid_targets(const ClusterState& env, int b) {
  std::vector<int> out{0};
  const auto head = env.peek_head(b);
  if (!head) return out;
  const int w = env.request(*head).record.service_type;
  for (int n = 0; n < env.node_count(); ++n) {
    if (env.node_accepts(n, w)) out.push_back(n + 1);
  }
  return out;
}

// A uniformly random valid action per eAP, skipping some eAPs at random.
inline std::vector<std::optional<DispatchAction>> random_actions(const ClusterState& env, Rng& rng) {
  std::vector<std::optional<DispatchAction>> actions(static_cast<std::size_t>(env.eap_count()));
  for (int b = 0; b < env.eap_count(); ++b) {
    const auto head = env.peek_head(b);
    if (!head || rng() % 5 == 0) continue;
    const auto targets = valid_targets(env, b);
    actions[static_cast<std::size_t>(b)] =
        DispatchAction{b, targets[rng() % targets.size()], *head};
  }
  return actions;
}

inline std::vector<std::optional<DispatchAction>> no_actions(const ClusterState& env) {
  return std::vector<std::optional<DispatchAction>>(static_cast<std::size_t>(env.eap_count()));
}

// First violated cluster invariant, or an empty string.
inline std::string invariant_violation(const ClusterState& env) {
  if (env.arrived_count() != env.completed_count() + env.dropped_count() + env.in_flight_count()) {
    return "conservation";
  }
  const auto& catalog = env.catalog();
  std::map<std::int64_t, int> seen;  // request -> places it occupies
  for (const auto& n : env.nodes()) {
    if (n.reserved_cpu(catalog) > n.cpu_capacity + 1e-9) return "cpu capacity";
    if (n.reserved_mem(catalog) > n.mem_capacity + 1e-9) return "mem capacity";
    for (const auto& rep : n.replicates) {
      if (!rep.request) continue;
      const auto& r = env.request(*rep.request);
      if (r.status != RequestStatus::kProcessing) return "replicate holds a non-processing request";
      if (r.record.service_type != rep.service) return "replicate runs a foreign service";
      ++seen[r.id];
    }
    for (const auto& q : n.executor_queue) ++seen[q.id];
  }
  for (const auto& e : env.eaps()) {
    for (const auto& q : e.dispatch_queue) {
      if (env.request(q.id).status != RequestStatus::kQueuedAtEap) return "eAP queue status";
      ++seen[q.id];
    }
  }
  for (const auto& q : env.cloud().executor_queue) ++seen[q.id];
  int cloud_processing = 0;
  std::int64_t active = 0;
  for (const auto& r : env.requests()) {
    const bool arrived = r.status != RequestStatus::kQueuedAtEap || seen.count(r.id) > 0;
    if (r.terminal()) {
      if (seen.count(r.id)) return "terminal request still queued";
      if (!r.completion_time_ms) return "terminal request without completion time";
      continue;
    }
    if (r.completion_time_ms) return "completion time on a live request";
    if (!arrived) continue;
    ++active;
    const int places = seen.count(r.id) ? seen.at(r.id) : 0;
    if (r.status == RequestStatus::kInTransit) {
      if (places != 0) return "in-transit request sits in a queue";
    } else if (r.status == RequestStatus::kProcessing && places == 0) {
      ++cloud_processing;
    } else if (places != 1) {
      return "request in " + std::to_string(places) + " places";
    }
  }
  if (active != env.in_flight_count()) return "in-flight count";
  if (cloud_processing != env.cloud().busy) return "cloud busy count";
  if (env.cloud().busy > env.cloud().parallelism) return "cloud parallelism";
  return {};
}

}  // namespace edgesched::fixture

#endif  // EDGESCHED_TESTS_FIXTURES_HPP_
