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

#include "edgesched/dequeue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgesched/common.hpp"

namespace edgesched {

const char* to_string(DequeueStrategy strategy) {
  switch (strategy) {
    case DequeueStrategy::kFifo: return "fifo";
    case DequeueStrategy::kLatencyGreedy: return "latency_greedy";
    case DequeueStrategy::kDiscounted: return "discounted";
  }
  return "?";
}

DequeueStrategy parse_dequeue_strategy(const std::string& name) {
  if (name == "fifo") return DequeueStrategy::kFifo;
  if (name == "latency_greedy") return DequeueStrategy::kLatencyGreedy;
  if (name == "discounted") return DequeueStrategy::kDiscounted;
  throw ValidationError("unknown dequeue strategy '" + name + "'");
}

CompletionEstimator::CompletionEstimator(std::vector<double> initial_ms, double lambda_e,
                                         EstimatorScope scope)
    : estimates_(std::move(initial_ms)), lambda_e_(lambda_e), scope_(scope) {
  require(lambda_e > 0 && lambda_e < 1, "lambda_e must be in (0, 1)");
  for (double e : estimates_) require(e >= 0, "initial estimates must be >= 0");
}

double CompletionEstimator::estimate(int service) const {
  if (service < 1 || service > service_count()) {
    throw ContractError("estimator has no service " + std::to_string(service));
  }
  return estimates_[static_cast<std::size_t>(service - 1)];
}

void CompletionEstimator::update(int service, double observed_ms) {
  if (service < 1 || service > service_count()) {
    throw ContractError("estimator has no service " + std::to_string(service));
  }
  require(observed_ms >= 0, "observed time must be >= 0");
  if (observed_ms == 0) return;
  double& e = estimates_[static_cast<std::size_t>(service - 1)];
  e = lambda_e_ * e + (1.0 - lambda_e_) * observed_ms;
}

CompletionEstimator update_estimate(CompletionEstimator est, int service, double observed_ms) {
  est.update(service, observed_ms);
  return est;
}

double priority(double remaining_ms, double estimate_ms, const PriorityParams& params) {
  const double gap = remaining_ms - estimate_ms;
  if (std::abs(gap) < params.tie_epsilon_ms) return params.tie_priority;
  if (gap > 0) return 1.0 / gap;
  return params.lambda_prime / -gap;
}

namespace {

// Strict weak order "a is dequeued before b".
struct Precedes {
  DequeueStrategy strategy;
  const CompletionEstimator& est;
  const PriorityParams& params;
  double now_ms;

  bool tie_break(const QueuedRequest& a, const QueuedRequest& b) const {
    if (a.enqueue_ms != b.enqueue_ms) return a.enqueue_ms < b.enqueue_ms;
    return a.id < b.id;
  }

  bool operator()(const QueuedRequest& a, const QueuedRequest& b) const {
    switch (strategy) {
      case DequeueStrategy::kFifo:
        break;
      case DequeueStrategy::kLatencyGreedy: {
        const double ra = a.deadline_ms - now_ms;
        const double rb = b.deadline_ms - now_ms;
        if (ra != rb) return ra < rb;
        break;
      }
      case DequeueStrategy::kDiscounted: {
        const double pa = priority(a.deadline_ms - now_ms, est.estimate(a.service), params);
        const double pb = priority(b.deadline_ms - now_ms, est.estimate(b.service), params);
        if (pa != pb) return pa > pb;
        break;
      }
    }
    return tie_break(a, b);
  }
};

}  // namespace

std::optional<std::size_t> select_next(std::span<const QueuedRequest> queue,
                                       DequeueStrategy strategy,
                                       const CompletionEstimator& est,
                                       const PriorityParams& params, double now_ms) {
  if (queue.empty()) return std::nullopt;
  Precedes before{strategy, est, params, now_ms};
  std::size_t best = 0;
  for (std::size_t i = 1; i < queue.size(); ++i) {
    if (before(queue[i], queue[best])) best = i;
  }
  return best;
}

std::optional<QueuedRequest> dequeue_eap(std::vector<QueuedRequest>& queue,
                                         DequeueStrategy strategy,
                                         const CompletionEstimator& est,
                                         const PriorityParams& params, double now_ms) {
  auto index = select_next(queue, strategy, est, params, now_ms);
  if (!index) return std::nullopt;
  QueuedRequest out = queue[*index];
  queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(*index));
  return out;
}

std::vector<std::size_t> priority_order(std::span<const QueuedRequest> queue,
                                        DequeueStrategy strategy,
                                        const CompletionEstimator& est,
                                        const PriorityParams& params, double now_ms) {
  std::vector<std::size_t> order(queue.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Precedes before{strategy, est, params, now_ms};
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return before(queue[a], queue[b]); });
  return order;
}

std::vector<QueuedRequest> drain_executor(std::vector<QueuedRequest>& queue,
                                          DequeueStrategy strategy,
                                          const CompletionEstimator& est,
                                          const PriorityParams& params, IdleCapacity idle,
                                          double now_ms) {
  std::vector<QueuedRequest> taken;
  if (queue.empty()) return taken;
  if (idle.shared && *idle.shared <= 0) return taken;

  const auto order = priority_order(queue, strategy, est, params, now_ms);
  std::vector<bool> removed(queue.size(), false);
  for (std::size_t i : order) {
    if (idle.shared && *idle.shared <= 0) break;
    const int w = queue[i].service;
    if (w < 1 || w > static_cast<int>(idle.per_service.size())) continue;
    int& slots = idle.per_service[static_cast<std::size_t>(w - 1)];
    if (slots <= 0) continue;
    --slots;
    if (idle.shared) --*idle.shared;
    taken.push_back(queue[i]);
    removed[i] = true;
  }
  std::size_t keep = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (!removed[i]) queue[keep++] = queue[i];
  }
  queue.resize(keep);
  return taken;
}

}  // namespace edgesched
