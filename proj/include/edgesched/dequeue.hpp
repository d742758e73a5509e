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

// Queue disciplines for eAP dispatch queues and executor queues.

#ifndef EDGESCHED_DEQUEUE_HPP_
#define EDGESCHED_DEQUEUE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edgesched {

enum class DequeueStrategy { kFifo, kLatencyGreedy, kDiscounted };

const char* to_string(DequeueStrategy strategy);
DequeueStrategy parse_dequeue_strategy(const std::string& name);

enum class EstimatorScope {
  kEap,       // dequeue-to-completion, transport included
  kExecutor,  // executor-dequeue-to-completion only
};

/// Exponentially discounted per-service completion-time estimate.
class CompletionEstimator {
 public:
  CompletionEstimator() = default;
  /// initial_ms[w-1] seeds the estimate for service w.
  CompletionEstimator(std::vector<double> initial_ms, double lambda_e, EstimatorScope scope);

  double estimate(int service) const;
  int service_count() const { return static_cast<int>(estimates_.size()); }
  double lambda_e() const { return lambda_e_; }
  EstimatorScope scope() const { return scope_; }

  /// E[w] <- lambda_e E[w] + (1 - lambda_e) observed. A zero observation
  /// means "nothing collected" and leaves the estimate alone.
  void update(int service, double observed_ms);

 private:
  std::vector<double> estimates_;
  double lambda_e_ = 0.9;
  EstimatorScope scope_ = EstimatorScope::kEap;
};

/// Functional form of CompletionEstimator::update.
CompletionEstimator update_estimate(CompletionEstimator est, int service, double observed_ms);

struct PriorityParams {
  double lambda_prime = 0.5;    // penalty for likely-late requests, in (0, 1)
  double tie_epsilon_ms = 1.0;  // |remaining - estimate| below this is a tie
  double tie_priority = 1000.0;  // 1/epsilon with epsilon in seconds
};

/// 1/(remaining - estimate) when the request can still make it,
/// lambda'/(estimate - remaining) when it probably cannot, and tie_priority
/// inside the tie band. Times are in ms, so outside the band the value never
/// exceeds 1 and a tie ranks above every other request.
double priority(double remaining_ms, double estimate_ms, const PriorityParams& params);

/// The fields a queue discipline looks at.
struct QueuedRequest {
  std::int64_t id = 0;
  int service = 1;
  double enqueue_ms = 0;   // time the request entered this queue
  double deadline_ms = 0;  // absolute deadline
};

/// Index of the request the strategy would dequeue next, or nullopt when the
/// queue is empty. Ties break by enqueue time, then id.
std::optional<std::size_t> select_next(std::span<const QueuedRequest> queue,
                                       DequeueStrategy strategy,
                                       const CompletionEstimator& est,
                                       const PriorityParams& params, double now_ms);

/// Removes and returns the selected request.
std::optional<QueuedRequest> dequeue_eap(std::vector<QueuedRequest>& queue,
                                         DequeueStrategy strategy,
                                         const CompletionEstimator& est,
                                         const PriorityParams& params, double now_ms);

/// Free execution slots. Edge nodes count idle replicates per service; the
/// cloud additionally caps the total through `shared`.
struct IdleCapacity {
  std::vector<int> per_service;  // index w-1
  std::optional<int> shared;
};

/// Scans the queue from highest to lowest priority and removes every request
/// whose service still has an idle slot, consuming the slot. Returned in
/// dequeue order.
std::vector<QueuedRequest> drain_executor(std::vector<QueuedRequest>& queue,
                                          DequeueStrategy strategy,
                                          const CompletionEstimator& est,
                                          const PriorityParams& params, IdleCapacity idle,
                                          double now_ms);

/// Queue indices in dequeue order for the strategy (highest priority first).
std::vector<std::size_t> priority_order(std::span<const QueuedRequest> queue,
                                        DequeueStrategy strategy,
                                        const CompletionEstimator& est,
                                        const PriorityParams& params, double now_ms);

}  // namespace edgesched

#endif  // EDGESCHED_DEQUEUE_HPP_
