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

// Discrete-event model of one edge cluster and the cloud behind it.
//
// Decisions happen on a slot grid: dispatch at every slot boundary,
// orchestration at frame boundaries. Between boundaries an event list moves
// requests through transport, executor queues and replicates in continuous
// time. Requests whose deadline has passed are dropped at the end of the slot.

#ifndef EDGESCHED_CLUSTER_HPP_
#define EDGESCHED_CLUSTER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "edgesched/catalog.hpp"
#include "edgesched/dequeue.hpp"
#include "edgesched/workload.hpp"

namespace edgesched {

struct LinkSpec {
  double latency_ms = 0;
  double bandwidth_mbps = 1;
};

struct NetworkModel {
  LinkSpec device_edge{20.0, 50.0};
  LinkSpec intra_edge_lan{10.0, 1000.0};
  LinkSpec edge_cloud_wan{100.0, 100.0};
  double jitter_fraction = 0.0;  // reserved; no jitter is applied when 0
};

enum class LocationKind { kDevice, kEap, kNode, kCloud };

struct Location {
  LocationKind kind = LocationKind::kDevice;
  int index = 0;

  static Location device() { return {LocationKind::kDevice, 0}; }
  static Location eap(int b) { return {LocationKind::kEap, b}; }
  static Location node(int n) { return {LocationKind::kNode, n}; }
  static Location cloud() { return {LocationKind::kCloud, 0}; }
  bool operator==(const Location&) const = default;
};

/// latency + 8 * size_kb / (bandwidth_mbps * 1000) seconds, in ms, over the
/// link class joining src and dst: device-eAP uses the access link, anything
/// inside the edge cluster the LAN, edge-to-cloud the WAN.
double transport_delay(const Location& src, const Location& dst, double size_kb,
                       const NetworkModel& net);

struct Clock {
  double now_ms = 0;
  double slot_ms = 250.0;
  int slots_per_frame = 100;
  std::int64_t slot_index = 0;

  std::int64_t frame_index() const { return slot_index / slots_per_frame; }
  bool at_frame_boundary() const { return slot_index % slots_per_frame == 0; }
};

struct NodeSpec {
  int eap_id = 0;
  double cpu_capacity = 2000.0;  // millicores
  double mem_capacity = 4096.0;  // MB
  double storage_capacity = 300.0;  // GB
  double speed_factor = 1.0;
};

struct CloudSpec {
  int parallelism = 60;
  double speed_factor = 1.0;
};

struct TopologySpec {
  int eap_count = 1;
  std::vector<NodeSpec> nodes;
  CloudSpec cloud;
  NetworkModel network;
  double slot_ms = 250.0;
  int slots_per_frame = 100;
};

/// Fixed normalizers for observation vectors. Every feature is divided by its
/// normalizer and clamped to [0, 1].
struct StateScales {
  double queue_norm = 50.0;         // requests, executor and eAP queues
  double deadline_norm_ms = 10000.0;
  double latency_norm_ms = 1000.0;
  double replicate_norm = 4.0;
};

struct ClusterOptions {
  DequeueStrategy eap_strategy = DequeueStrategy::kDiscounted;
  DequeueStrategy executor_strategy = DequeueStrategy::kDiscounted;
  PriorityParams priority;
  double lambda_e = 0.9;
  int executor_queue_cap = 50;     // admission headroom for dispatch masks
  double decision_delay_ms = 0.0;  // added to every dispatch
  StateScales scales;
};

struct Replicate {
  int service = 1;
  std::optional<std::int64_t> request;  // busy iff set
  bool pending_delete = false;
};

struct EdgeNode {
  int id = 0;
  int eap_id = 0;
  double cpu_capacity = 0;
  double mem_capacity = 0;
  double storage_capacity = 0;
  double speed_factor = 1.0;
  std::vector<Replicate> replicates;
  std::vector<QueuedRequest> executor_queue;
  CompletionEstimator estimator;

  /// d(w, n), replicates marked for deletion included.
  int deployed(int service) const;
  /// Replicates of the service that still take new work.
  int accepting(int service) const;
  int idle(int service) const;
  double reserved_cpu(const ServiceCatalog& catalog) const;
  double reserved_mem(const ServiceCatalog& catalog) const;
};

struct Eap {
  int id = 0;
  std::vector<QueuedRequest> dispatch_queue;
  std::vector<int> attached_nodes;
  double measured_cloud_latency_ms = 0;
  CompletionEstimator estimator;
};

struct CloudCluster {
  std::vector<QueuedRequest> executor_queue;
  int parallelism = 60;
  double speed_factor = 1.0;
  int busy = 0;
  CompletionEstimator estimator;
};

/// target 0 is the cloud; target j >= 1 is node j - 1.
struct DispatchAction {
  int eap_id = 0;
  int target = 0;
  std::int64_t request_id = 0;
  bool operator==(const DispatchAction&) const = default;
};

/// delta 0 keeps the node as is, +w adds a replicate of w, -w removes one.
struct NodeScaling {
  int node = 0;
  int delta = 0;
  bool operator==(const NodeScaling&) const = default;
};

struct OrchestrationAction {
  std::vector<NodeScaling> steps;
};

struct ScalingReport {
  std::vector<NodeScaling> realized;  // delta 0 where the request was coerced
  double image_pull_mb = 0;
  int coerced = 0;
  int deferred_deletions = 0;
};

struct SlotOutcome {
  std::int64_t slot_index = 0;
  double start_ms = 0;
  double end_ms = 0;
  int arrived = 0;
  int dispatched = 0;
  int completed_edge = 0;  // on time
  int completed_cloud = 0;  // on time
  int dropped = 0;          // deadline violations, late completions included
  int late_completions = 0;
  double dispatch_cost_kb = 0;
  std::vector<double> cpu_util;  // per node at slot end
  std::vector<double> mem_util;

  int completed_on_time() const { return completed_edge + completed_cloud; }
};

class ClusterState {
 public:
  ClusterState(TopologySpec topology, ServiceCatalog catalog, ClusterOptions options,
               std::vector<Request> stream);

  const Clock& clock() const { return clock_; }
  const ServiceCatalog& catalog() const { return catalog_; }
  const ClusterOptions& options() const { return options_; }
  const TopologySpec& topology() const { return topology_; }
  const std::vector<EdgeNode>& nodes() const { return nodes_; }
  const std::vector<Eap>& eaps() const { return eaps_; }
  const CloudCluster& cloud() const { return cloud_; }
  const Request& request(std::int64_t id) const;
  const std::vector<Request>& requests() const { return requests_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int eap_count() const { return static_cast<int>(eaps_.size()); }
  int service_count() const { return catalog_.size(); }
  int max_nodes_per_eap() const;

  /// Request eAP b would dispatch now under its dequeue strategy.
  std::optional<std::int64_t> peek_head(int eap) const;

  /// Dispatch admission: the node runs a replicate of the service that is not
  /// being deleted and its executor queue is below the cap.
  bool node_accepts(int node, int service) const;

  /// Places a replicate without orchestration accounting (initial layout).
  /// Returns false when it does not fit.
  bool deploy(int node, int service);
  bool fits(int node, int service) const;

  /// Advances one slot. actions[b] is eAP b's decision, if any.
  SlotOutcome step_slot(std::span<const std::optional<DispatchAction>> actions);

  ScalingReport apply_scaling(const OrchestrationAction& action);

  double cpu_utilization(int node) const;
  double mem_utilization(int node) const;
  /// Requests waiting (not yet processing) in edge executor queues.
  int node_backlog() const;

  /// Per-(node, service) samples taken at each slot end since the last
  /// reset_usage(): busy replicates and deployed replicates.
  struct ServiceUsage {
    double busy_samples = 0;
    double replicate_samples = 0;
  };
  const ServiceUsage& usage(int node, int service) const;
  void reset_usage();

  std::int64_t arrived_count() const { return arrived_; }
  std::int64_t completed_count() const { return completed_; }
  std::int64_t dropped_count() const { return dropped_; }
  std::int64_t in_flight_count() const;
  /// Every request of the stream has arrived and reached a terminal state.
  bool drained() const;

 private:
  enum class EventKind { kArriveAtEap, kArriveAtExecutor, kComplete };
  struct Event {
    double time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::kArriveAtEap;
    std::int64_t request = 0;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };
  struct Observation {
    double sum = 0;
    int count = 0;
  };

  void push_event(double time, EventKind kind, std::int64_t request);
  void handle(const Event& ev, SlotOutcome& out);
  void drain(int executor, double now_ms);  // executor -1 is the cloud
  void finish(std::int64_t id, double now_ms, SlotOutcome& out);
  void release(std::int64_t id);
  void drop_expired(double end_ms, SlotOutcome& out);
  void update_estimators();
  Request& mut(std::int64_t id);

  TopologySpec topology_;
  ServiceCatalog catalog_;
  ClusterOptions options_;
  Clock clock_;
  std::vector<EdgeNode> nodes_;
  std::vector<Eap> eaps_;
  CloudCluster cloud_;

  std::vector<Request> requests_;
  std::vector<int> executor_of_;          // -1 cloud, n node, -2 none yet
  std::vector<double> executor_start_ms_;
  std::size_t next_arrival_ = 0;
  std::vector<std::int64_t> active_;      // arrived, not terminal

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t next_seq_ = 0;

  std::vector<std::vector<Observation>> eap_obs_;   // [eap][w-1]
  std::vector<std::vector<Observation>> exec_obs_;  // [node, cloud last][w-1]
  std::vector<std::vector<ServiceUsage>> usage_;    // [node][w-1]

  std::int64_t arrived_ = 0;
  std::int64_t completed_ = 0;
  std::int64_t dropped_ = 0;
};

/// Local observation of eAP b:
///   one-hot head service (W) | remaining deadline | |Q_b|
///   | per attached node, padded to the widest eAP:
///     [executor queue, free cpu, free mem, free storage]
///   | N_b / N_max | cloud latency | empty-queue flag | one-hot eAP id (B)
Eigen::VectorXd snapshot_local_state(const ClusterState& env, int eap);
int local_state_size(const ClusterState& env);

/// All local observations concatenated, then the cloud queue length.
Eigen::VectorXd snapshot_global_state(const ClusterState& env);
int global_state_size(const ClusterState& env);

}  // namespace edgesched

#endif  // EDGESCHED_CLUSTER_HPP_
