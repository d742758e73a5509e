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

#include "edgesched/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgesched/common.hpp"

namespace edgesched {

namespace {

double link_delay(const LinkSpec& link, double size_kb) {
  return link.latency_ms + 8.0 * size_kb / (link.bandwidth_mbps * 1000.0) * 1000.0;
}

bool in_edge(LocationKind k) { return k == LocationKind::kEap || k == LocationKind::kNode; }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_link(const LinkSpec& link, const char* name) {
  if (!(link.latency_ms >= 0) || !(link.bandwidth_mbps > 0)) {
    throw ValidationError(std::string("bad network link ") + name);
  }
}

}  // namespace

double transport_delay(const Location& src, const Location& dst, double size_kb,
                       const NetworkModel& net) {
  require(size_kb >= 0, "transfer size must be >= 0");
  if (src == dst) return 0.0;
  const bool src_dev = src.kind == LocationKind::kDevice;
  const bool dst_dev = dst.kind == LocationKind::kDevice;
  if (src_dev || dst_dev) {
    const Location other = src_dev ? dst : src;
    if (other.kind != LocationKind::kEap) {
      throw ContractError("devices only reach their eAP");
    }
    return link_delay(net.device_edge, size_kb);
  }
  if (in_edge(src.kind) && in_edge(dst.kind)) return link_delay(net.intra_edge_lan, size_kb);
  if (src.kind == LocationKind::kCloud || dst.kind == LocationKind::kCloud) {
    return link_delay(net.edge_cloud_wan, size_kb);
  }
  throw ContractError("unknown location pair");
}

// ---------------------------------------------------------------------------

int EdgeNode::deployed(int service) const {
  return static_cast<int>(std::count_if(replicates.begin(), replicates.end(),
                                        [&](const Replicate& r) { return r.service == service; }));
}

int EdgeNode::accepting(int service) const {
  return static_cast<int>(std::count_if(replicates.begin(), replicates.end(), [&](const Replicate& r) {
    return r.service == service && !r.pending_delete;
  }));
}

int EdgeNode::idle(int service) const {
  return static_cast<int>(std::count_if(replicates.begin(), replicates.end(), [&](const Replicate& r) {
    return r.service == service && !r.pending_delete && !r.request;
  }));
}

double EdgeNode::reserved_cpu(const ServiceCatalog& catalog) const {
  double total = 0;
  for (const auto& r : replicates) total += catalog[r.service].replicate_cpu;
  return total;
}

double EdgeNode::reserved_mem(const ServiceCatalog& catalog) const {
  double total = 0;
  for (const auto& r : replicates) total += catalog[r.service].replicate_mem;
  return total;
}

// ---------------------------------------------------------------------------

ClusterState::ClusterState(TopologySpec topology, ServiceCatalog catalog, ClusterOptions options,
                           std::vector<Request> stream)
    : topology_(std::move(topology)),
      catalog_(std::move(catalog)),
      options_(options),
      requests_(std::move(stream)) {
  if (catalog_.size() < 1) throw ValidationError("catalog is empty");
  if (topology_.eap_count < 1) throw ValidationError("need at least one eAP");
  if (topology_.nodes.empty()) throw ValidationError("need at least one edge node");
  if (!(topology_.slot_ms > 0) || topology_.slots_per_frame < 1) {
    throw ValidationError("bad slot grid");
  }
  if (topology_.cloud.parallelism < 1 || !(topology_.cloud.speed_factor > 0)) {
    throw ValidationError("bad cloud spec");
  }
  if (options_.executor_queue_cap < 1) throw ValidationError("executor queue cap must be >= 1");
  check_link(topology_.network.device_edge, "device_edge");
  check_link(topology_.network.intra_edge_lan, "intra_edge_lan");
  check_link(topology_.network.edge_cloud_wan, "edge_cloud_wan");

  const int W = catalog_.size();
  std::vector<double> nominal(static_cast<std::size_t>(W));
  for (int w = 1; w <= W; ++w) nominal[static_cast<std::size_t>(w - 1)] = catalog_[w].nominal_proc_ms;

  clock_.slot_ms = topology_.slot_ms;
  clock_.slots_per_frame = topology_.slots_per_frame;

  eaps_.resize(static_cast<std::size_t>(topology_.eap_count));
  for (int b = 0; b < topology_.eap_count; ++b) {
    auto& e = eaps_[static_cast<std::size_t>(b)];
    e.id = b;
    e.measured_cloud_latency_ms = topology_.network.edge_cloud_wan.latency_ms;
    e.estimator = CompletionEstimator(nominal, options_.lambda_e, EstimatorScope::kEap);
  }
  for (std::size_t n = 0; n < topology_.nodes.size(); ++n) {
    const auto& spec = topology_.nodes[n];
    if (spec.eap_id < 0 || spec.eap_id >= topology_.eap_count) {
      throw ValidationError("node " + std::to_string(n) + " attached to unknown eAP");
    }
    if (!(spec.cpu_capacity > 0) || !(spec.mem_capacity > 0) || !(spec.storage_capacity > 0) ||
        !(spec.speed_factor > 0)) {
      throw ValidationError("node " + std::to_string(n) + " has a non-positive capacity");
    }
    EdgeNode node;
    node.id = static_cast<int>(n);
    node.eap_id = spec.eap_id;
    node.cpu_capacity = spec.cpu_capacity;
    node.mem_capacity = spec.mem_capacity;
    node.storage_capacity = spec.storage_capacity;
    node.speed_factor = spec.speed_factor;
    std::vector<double> local(nominal);
    for (double& v : local) v /= spec.speed_factor;
    node.estimator = CompletionEstimator(local, options_.lambda_e, EstimatorScope::kExecutor);
    nodes_.push_back(std::move(node));
    eaps_[static_cast<std::size_t>(spec.eap_id)].attached_nodes.push_back(static_cast<int>(n));
  }
  cloud_.parallelism = topology_.cloud.parallelism;
  cloud_.speed_factor = topology_.cloud.speed_factor;
  {
    std::vector<double> remote(nominal);
    for (double& v : remote) v /= cloud_.speed_factor;
    cloud_.estimator = CompletionEstimator(remote, options_.lambda_e, EstimatorScope::kExecutor);
  }

  for (std::size_t i = 0; i < requests_.size(); ++i) {
    auto& r = requests_[i];
    if (r.id != static_cast<std::int64_t>(i)) throw ValidationError("request ids must be 0..n-1");
    if (r.eap_id < 0 || r.eap_id >= topology_.eap_count) {
      throw ValidationError("request " + std::to_string(i) + " bound to unknown eAP");
    }
    if (r.record.service_type < 1 || r.record.service_type > W) {
      throw ValidationError("request " + std::to_string(i) + " has unknown service");
    }
    if (i > 0 && r.record.arrival_ms < requests_[i - 1].record.arrival_ms) {
      throw ValidationError("request stream must be sorted by arrival");
    }
    r.status = RequestStatus::kQueuedAtEap;
    r.dequeue_time_ms.reset();
    r.completion_time_ms.reset();
  }
  executor_of_.assign(requests_.size(), -2);
  executor_start_ms_.assign(requests_.size(), 0.0);

  eap_obs_.assign(eaps_.size(), std::vector<Observation>(static_cast<std::size_t>(W)));
  exec_obs_.assign(nodes_.size() + 1, std::vector<Observation>(static_cast<std::size_t>(W)));
  usage_.assign(nodes_.size(), std::vector<ServiceUsage>(static_cast<std::size_t>(W)));
}

const Request& ClusterState::request(std::int64_t id) const {
  if (id < 0 || id >= static_cast<std::int64_t>(requests_.size())) {
    throw ContractError("unknown request id " + std::to_string(id));
  }
  return requests_[static_cast<std::size_t>(id)];
}

Request& ClusterState::mut(std::int64_t id) { return requests_[static_cast<std::size_t>(id)]; }

int ClusterState::max_nodes_per_eap() const {
  std::size_t widest = 0;
  for (const auto& e : eaps_) widest = std::max(widest, e.attached_nodes.size());
  return static_cast<int>(widest);
}

std::optional<std::int64_t> ClusterState::peek_head(int eap) const {
  require(eap >= 0 && eap < eap_count(), "unknown eAP");
  const auto& e = eaps_[static_cast<std::size_t>(eap)];
  auto index = select_next(e.dispatch_queue, options_.eap_strategy, e.estimator, options_.priority,
                           clock_.now_ms);
  if (!index) return std::nullopt;
  return e.dispatch_queue[*index].id;
}

bool ClusterState::node_accepts(int node, int service) const {
  require(node >= 0 && node < node_count(), "unknown node");
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  return n.accepting(service) > 0 &&
         static_cast<int>(n.executor_queue.size()) < options_.executor_queue_cap;
}

bool ClusterState::fits(int node, int service) const {
  require(node >= 0 && node < node_count(), "unknown node");
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  const auto& s = catalog_[service];
  return n.reserved_cpu(catalog_) + s.replicate_cpu <= n.cpu_capacity &&
         n.reserved_mem(catalog_) + s.replicate_mem <= n.mem_capacity;
}

bool ClusterState::deploy(int node, int service) {
  if (!fits(node, service)) return false;
  nodes_[static_cast<std::size_t>(node)].replicates.push_back(Replicate{service, std::nullopt, false});
  return true;
}

void ClusterState::push_event(double time, EventKind kind, std::int64_t request) {
  events_.push(Event{time, next_seq_++, kind, request});
}

SlotOutcome ClusterState::step_slot(std::span<const std::optional<DispatchAction>> actions) {
  if (!actions.empty() && static_cast<int>(actions.size()) != eap_count()) {
    throw ContractError("one optional action per eAP expected");
  }
  SlotOutcome out;
  out.slot_index = clock_.slot_index;
  out.start_ms = clock_.now_ms;
  out.end_ms = clock_.now_ms + clock_.slot_ms;
  const double start = out.start_ms;
  const double end = out.end_ms;

  for (auto& per : eap_obs_) std::fill(per.begin(), per.end(), Observation{});
  for (auto& per : exec_obs_) std::fill(per.begin(), per.end(), Observation{});

  // Validate every action before mutating anything.
  for (std::size_t b = 0; b < actions.size(); ++b) {
    if (!actions[b]) continue;
    const auto& a = *actions[b];
    if (a.eap_id != static_cast<int>(b)) throw InvalidActionError("action filed under wrong eAP");
    const auto head = peek_head(static_cast<int>(b));
    if (!head || *head != a.request_id) {
      throw InvalidActionError("eAP " + std::to_string(b) + " may only dispatch its head request");
    }
    if (a.target < 0 || a.target > node_count()) {
      throw InvalidActionError("dispatch target " + std::to_string(a.target) + " out of range");
    }
    if (a.target > 0 && !node_accepts(a.target - 1, request(a.request_id).record.service_type)) {
      throw InvalidActionError("node " + std::to_string(a.target - 1) +
                               " cannot accept service " +
                               std::to_string(request(a.request_id).record.service_type));
    }
  }

  for (std::size_t b = 0; b < actions.size(); ++b) {
    if (!actions[b]) continue;
    const auto& a = *actions[b];
    auto& e = eaps_[b];
    auto it = std::find_if(e.dispatch_queue.begin(), e.dispatch_queue.end(),
                           [&](const QueuedRequest& q) { return q.id == a.request_id; });
    e.dispatch_queue.erase(it);
    Request& r = mut(a.request_id);
    r.dequeue_time_ms = start;
    r.advance(RequestStatus::kInTransit, start);
    const Location dst = a.target == 0 ? Location::cloud() : Location::node(a.target - 1);
    const double delay = options_.decision_delay_ms +
                         transport_delay(Location::eap(static_cast<int>(b)), dst,
                                         r.record.input_size_kb, topology_.network);
    executor_of_[static_cast<std::size_t>(r.id)] = a.target - 1;
    push_event(start + delay, EventKind::kArriveAtExecutor, r.id);
    ++out.dispatched;
    const bool attached = a.target > 0 && nodes_[static_cast<std::size_t>(a.target - 1)].eap_id ==
                                              static_cast<int>(b);
    if (!attached) out.dispatch_cost_kb += r.record.input_size_kb;
  }

  // Replicates may have been freed or added since the last slot.
  for (int n = 0; n < node_count(); ++n) drain(n, start);
  drain(-1, start);

  const double precharge = topology_.network.device_edge.latency_ms;
  while (next_arrival_ < requests_.size()) {
    const auto& r = requests_[next_arrival_];
    const double at = static_cast<double>(r.record.arrival_ms) + precharge;
    if (at >= end) break;
    push_event(std::max(at, start), EventKind::kArriveAtEap, r.id);
    ++next_arrival_;
  }

  while (!events_.empty() && events_.top().time < end) {
    const Event ev = events_.top();
    events_.pop();
    handle(ev, out);
  }

  drop_expired(end, out);
  update_estimators();

  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    for (const auto& rep : nodes_[n].replicates) {
      auto& u = usage_[n][static_cast<std::size_t>(rep.service - 1)];
      u.replicate_samples += 1;
      if (rep.request) u.busy_samples += 1;
    }
  }
  out.cpu_util.resize(nodes_.size());
  out.mem_util.resize(nodes_.size());
  for (int n = 0; n < node_count(); ++n) {
    out.cpu_util[static_cast<std::size_t>(n)] = cpu_utilization(n);
    out.mem_util[static_cast<std::size_t>(n)] = mem_utilization(n);
  }

  clock_.slot_index += 1;
  clock_.now_ms = static_cast<double>(clock_.slot_index) * clock_.slot_ms;
  return out;
}

void ClusterState::handle(const Event& ev, SlotOutcome& out) {
  Request& r = mut(ev.request);
  switch (ev.kind) {
    case EventKind::kArriveAtEap: {
      r.status = RequestStatus::kQueuedAtEap;
      eaps_[static_cast<std::size_t>(r.eap_id)].dispatch_queue.push_back(
          QueuedRequest{r.id, r.record.service_type, ev.time, r.absolute_deadline_ms()});
      active_.push_back(r.id);
      ++arrived_;
      ++out.arrived;
      break;
    }
    case EventKind::kArriveAtExecutor: {
      if (r.terminal()) break;
      r.advance(RequestStatus::kQueuedAtExecutor, ev.time);
      const int ex = executor_of_[static_cast<std::size_t>(r.id)];
      const QueuedRequest q{r.id, r.record.service_type, ev.time, r.absolute_deadline_ms()};
      if (ex < 0) {
        cloud_.executor_queue.push_back(q);
      } else {
        nodes_[static_cast<std::size_t>(ex)].executor_queue.push_back(q);
      }
      drain(ex, ev.time);
      break;
    }
    case EventKind::kComplete: {
      if (r.terminal()) break;  // dropped at an earlier slot end
      const int ex = executor_of_[static_cast<std::size_t>(r.id)];
      finish(r.id, ev.time, out);
      drain(ex, ev.time);
      break;
    }
  }
}

void ClusterState::drain(int executor, double now_ms) {
  const int W = catalog_.size();
  if (executor < 0) {
    if (cloud_.executor_queue.empty()) return;
    const int free = cloud_.parallelism - cloud_.busy;
    IdleCapacity idle{std::vector<int>(static_cast<std::size_t>(W), free), free};
    auto taken = drain_executor(cloud_.executor_queue, options_.executor_strategy, cloud_.estimator,
                                options_.priority, std::move(idle), now_ms);
    for (const auto& q : taken) {
      Request& r = mut(q.id);
      r.advance(RequestStatus::kProcessing, now_ms);
      executor_start_ms_[static_cast<std::size_t>(q.id)] = now_ms;
      ++cloud_.busy;
      push_event(now_ms + catalog_[q.service].nominal_proc_ms / cloud_.speed_factor,
                 EventKind::kComplete, q.id);
    }
    return;
  }
  auto& node = nodes_[static_cast<std::size_t>(executor)];
  if (node.executor_queue.empty()) return;
  IdleCapacity idle{std::vector<int>(static_cast<std::size_t>(W), 0), std::nullopt};
  for (const auto& rep : node.replicates) {
    if (!rep.request && !rep.pending_delete) ++idle.per_service[static_cast<std::size_t>(rep.service - 1)];
  }
  auto taken = drain_executor(node.executor_queue, options_.executor_strategy, node.estimator,
                              options_.priority, std::move(idle), now_ms);
  for (const auto& q : taken) {
    auto rep = std::find_if(node.replicates.begin(), node.replicates.end(), [&](const Replicate& x) {
      return x.service == q.service && !x.request && !x.pending_delete;
    });
    if (rep == node.replicates.end()) throw ContractError("drain took a slot that does not exist");
    rep->request = q.id;
    Request& r = mut(q.id);
    r.advance(RequestStatus::kProcessing, now_ms);
    executor_start_ms_[static_cast<std::size_t>(q.id)] = now_ms;
    push_event(now_ms + catalog_[q.service].nominal_proc_ms / node.speed_factor,
               EventKind::kComplete, q.id);
  }
}

// Frees whatever the request holds: a replicate or a cloud slot.
void ClusterState::release(std::int64_t id) {
  const int ex = executor_of_[static_cast<std::size_t>(id)];
  if (ex < 0) {
    --cloud_.busy;
    require(cloud_.busy >= 0, "cloud busy count went negative");
    return;
  }
  auto& reps = nodes_[static_cast<std::size_t>(ex)].replicates;
  auto rep = std::find_if(reps.begin(), reps.end(),
                          [&](const Replicate& x) { return x.request && *x.request == id; });
  require(rep != reps.end(), "processing request without a replicate");
  if (rep->pending_delete) {
    reps.erase(rep);
  } else {
    rep->request.reset();
  }
}

void ClusterState::finish(std::int64_t id, double now_ms, SlotOutcome& out) {
  Request& r = mut(id);
  release(id);
  const int ex = executor_of_[static_cast<std::size_t>(id)];
  const int w = r.record.service_type;
  auto& exec = exec_obs_[ex < 0 ? nodes_.size() : static_cast<std::size_t>(ex)][static_cast<std::size_t>(w - 1)];
  exec.sum += now_ms - executor_start_ms_[static_cast<std::size_t>(id)];
  exec.count += 1;
  auto& eap = eap_obs_[static_cast<std::size_t>(r.eap_id)][static_cast<std::size_t>(w - 1)];
  eap.sum += now_ms - *r.dequeue_time_ms;
  eap.count += 1;

  if (now_ms <= r.absolute_deadline_ms()) {
    r.advance(RequestStatus::kCompletedOnTime, now_ms);
    ++completed_;
    if (ex < 0) {
      ++out.completed_cloud;
    } else {
      ++out.completed_edge;
    }
  } else {
    r.advance(RequestStatus::kDropped, now_ms);
    ++dropped_;
    ++out.dropped;
    ++out.late_completions;
  }
}

void ClusterState::drop_expired(double end_ms, SlotOutcome& out) {
  bool any = false;
  for (std::int64_t id : active_) {
    Request& r = mut(id);
    if (r.terminal() || r.absolute_deadline_ms() > end_ms) continue;
    if (r.status == RequestStatus::kProcessing) release(id);
    r.advance(RequestStatus::kDropped, end_ms);
    ++dropped_;
    ++out.dropped;
    any = true;
  }
  auto dead = [&](const QueuedRequest& q) { return mut(q.id).terminal(); };
  if (any) {
    for (auto& e : eaps_) std::erase_if(e.dispatch_queue, dead);
    for (auto& n : nodes_) std::erase_if(n.executor_queue, dead);
    std::erase_if(cloud_.executor_queue, dead);
  }
  std::erase_if(active_, [&](std::int64_t id) { return mut(id).terminal(); });
}

void ClusterState::update_estimators() {
  const int W = catalog_.size();
  for (int w = 1; w <= W; ++w) {
    const auto k = static_cast<std::size_t>(w - 1);
    for (std::size_t b = 0; b < eaps_.size(); ++b) {
      const auto& o = eap_obs_[b][k];
      if (o.count > 0) eaps_[b].estimator.update(w, o.sum / o.count);
    }
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
      const auto& o = exec_obs_[n][k];
      if (o.count > 0) nodes_[n].estimator.update(w, o.sum / o.count);
    }
    const auto& o = exec_obs_[nodes_.size()][k];
    if (o.count > 0) cloud_.estimator.update(w, o.sum / o.count);
  }
}

ScalingReport ClusterState::apply_scaling(const OrchestrationAction& action) {
  ScalingReport report;
  const int W = catalog_.size();
  for (const auto& step : action.steps) {
    require(step.node >= 0 && step.node < node_count(), "scaling targets unknown node");
    auto& node = nodes_[static_cast<std::size_t>(step.node)];
    const int w = std::abs(step.delta);
    NodeScaling realized{step.node, 0};
    if (step.delta == 0) {
      report.realized.push_back(realized);
      continue;
    }
    if (w > W) {
      ++report.coerced;
      report.realized.push_back(realized);
      continue;
    }
    if (step.delta > 0) {
      if (fits(step.node, w)) {
        if (node.deployed(w) == 0) report.image_pull_mb += catalog_[w].image_size_mb;
        node.replicates.push_back(Replicate{w, std::nullopt, false});
        realized.delta = w;
      } else {
        ++report.coerced;
      }
    } else {
      auto idle = std::find_if(node.replicates.begin(), node.replicates.end(), [&](const Replicate& r) {
        return r.service == w && !r.pending_delete && !r.request;
      });
      if (idle != node.replicates.end()) {
        node.replicates.erase(idle);
        realized.delta = -w;
      } else {
        auto busy = std::find_if(node.replicates.begin(), node.replicates.end(),
                                 [&](const Replicate& r) { return r.service == w && !r.pending_delete; });
        if (busy != node.replicates.end()) {
          busy->pending_delete = true;
          realized.delta = -w;
          ++report.deferred_deletions;
        } else {
          ++report.coerced;
        }
      }
    }
    report.realized.push_back(realized);
  }
  return report;
}

double ClusterState::cpu_utilization(int node) const {
  require(node >= 0 && node < node_count(), "unknown node");
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  double load = 0;
  for (const auto& rep : n.replicates) {
    if (rep.request) load += request(*rep.request).record.cpu_demand;
  }
  return clamp01(load / n.cpu_capacity);
}

double ClusterState::mem_utilization(int node) const {
  require(node >= 0 && node < node_count(), "unknown node");
  const auto& n = nodes_[static_cast<std::size_t>(node)];
  double load = 0;
  for (const auto& rep : n.replicates) {
    if (rep.request) load += request(*rep.request).record.mem_demand;
  }
  return clamp01(load / n.mem_capacity);
}

int ClusterState::node_backlog() const {
  std::size_t total = 0;
  for (const auto& n : nodes_) total += n.executor_queue.size();
  return static_cast<int>(total);
}

const ClusterState::ServiceUsage& ClusterState::usage(int node, int service) const {
  require(node >= 0 && node < node_count(), "unknown node");
  require(service >= 1 && service <= catalog_.size(), "unknown service");
  return usage_[static_cast<std::size_t>(node)][static_cast<std::size_t>(service - 1)];
}

void ClusterState::reset_usage() {
  for (auto& per : usage_) std::fill(per.begin(), per.end(), ServiceUsage{});
}

std::int64_t ClusterState::in_flight_count() const {
  return static_cast<std::int64_t>(active_.size());
}

bool ClusterState::drained() const {
  return next_arrival_ == requests_.size() && active_.empty();
}

// ---------------------------------------------------------------------------

int local_state_size(const ClusterState& env) {
  return env.service_count() + 2 + 4 * env.max_nodes_per_eap() + 3 + env.eap_count();
}

Eigen::VectorXd snapshot_local_state(const ClusterState& env, int eap) {
  require(eap >= 0 && eap < env.eap_count(), "unknown eAP");
  const auto& sc = env.options().scales;
  const auto& e = env.eaps()[static_cast<std::size_t>(eap)];
  const int W = env.service_count();
  const int nmax = env.max_nodes_per_eap();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(local_state_size(env));
  Eigen::Index k = 0;

  const auto head = env.peek_head(eap);
  if (head) {
    const Request& r = env.request(*head);
    v[r.record.service_type - 1] = 1.0;
    v[W] = clamp01((r.absolute_deadline_ms() - env.clock().now_ms) / sc.deadline_norm_ms);
  }
  k = W + 1;
  v[k++] = clamp01(static_cast<double>(e.dispatch_queue.size()) / sc.queue_norm);
  for (int i = 0; i < nmax; ++i) {
    if (i < static_cast<int>(e.attached_nodes.size())) {
      const auto& n = env.nodes()[static_cast<std::size_t>(e.attached_nodes[static_cast<std::size_t>(i)])];
      v[k] = clamp01(static_cast<double>(n.executor_queue.size()) / sc.queue_norm);
      v[k + 1] = clamp01(1.0 - env.cpu_utilization(n.id));
      v[k + 2] = clamp01(1.0 - env.mem_utilization(n.id));
      v[k + 3] = 1.0;  // no per-request storage demand is modelled
    }
    k += 4;
  }
  v[k++] = nmax > 0 ? static_cast<double>(e.attached_nodes.size()) / nmax : 0.0;
  v[k++] = clamp01(e.measured_cloud_latency_ms / sc.latency_norm_ms);
  v[k++] = head ? 0.0 : 1.0;
  v[k + eap] = 1.0;
  return v;
}

int global_state_size(const ClusterState& env) {
  return env.eap_count() * local_state_size(env) + 1;
}

Eigen::VectorXd snapshot_global_state(const ClusterState& env) {
  const int local = local_state_size(env);
  Eigen::VectorXd v(global_state_size(env));
  for (int b = 0; b < env.eap_count(); ++b) v.segment(b * local, local) = snapshot_local_state(env, b);
  v[v.size() - 1] =
      clamp01(static_cast<double>(env.cloud().executor_queue.size()) / env.options().scales.queue_norm);
  return v;
}

}  // namespace edgesched
