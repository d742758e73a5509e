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

// Request streams: trace-file ingestion and synthetic arrival patterns.

#ifndef EDGESCHED_WORKLOAD_HPP_
#define EDGESCHED_WORKLOAD_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesched/catalog.hpp"

namespace edgesched {

/// One row of a trace file:
///   arrival_ms,service_type,deadline_ms,cpu_demand,mem_demand,input_size_kb
/// Header-less CSV. deadline_ms is a budget relative to arrival.
struct TraceRecord {
  std::int64_t arrival_ms = 0;
  int service_type = 1;
  std::int64_t deadline_ms = 1;
  double cpu_demand = 1.0;  // millicores
  double mem_demand = 1.0;  // MB
  double input_size_kb = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

enum class RequestStatus {
  kQueuedAtEap,
  kInTransit,
  kQueuedAtExecutor,
  kProcessing,
  kCompletedOnTime,
  kDropped,
};

const char* to_string(RequestStatus status);

struct Request {
  std::int64_t id = 0;
  TraceRecord record;
  int eap_id = 0;
  RequestStatus status = RequestStatus::kQueuedAtEap;
  std::optional<double> dequeue_time_ms;
  std::optional<double> completion_time_ms;

  double absolute_deadline_ms() const {
    return static_cast<double>(record.arrival_ms + record.deadline_ms);
  }
  bool terminal() const {
    return status == RequestStatus::kCompletedOnTime ||
           status == RequestStatus::kDropped;
  }
  /// Moves along the lifecycle; the order is monotone and terminal states
  /// are final. Terminal transitions stamp completion_time_ms.
  void advance(RequestStatus next, double now_ms);

  bool operator==(const Request&) const = default;
};

enum class PatternKind {
  kPeriodicCpu,     // P1
  kPeriodicMem,     // P2
  kPeriodicCpu2x,   // P3: P1 at twice the frequency
  kRaw,             // P4: heavy-tailed stochastic arrivals
  kFile,
};

const char* to_string(PatternKind kind);
PatternKind parse_pattern_kind(const std::string& name);  // p1..p4, file

struct ArrivalPattern {
  PatternKind kind = PatternKind::kRaw;
  int period_frames = 40;  // base (P1) period; P3 runs at half of it
  double amplitude = 0.5;
  std::uint64_t seed = 1;

  int effective_period_frames() const {
    return kind == PatternKind::kPeriodicCpu2x ? period_frames / 2 : period_frames;
  }
};

/// Time base used to lay synthesized arrivals onto slots and frames.
struct SlotGrid {
  double slot_ms = 250.0;
  int slots_per_frame = 100;
  int eap_count = 1;
};

std::vector<TraceRecord> parse_trace(std::istream& in, int service_count);

/// Reads a trace file; requests come out ordered by arrival with eAPs drawn
/// uniformly from the seed. Same (file, seed) gives an identical stream.
std::vector<Request> load_trace(const std::filesystem::path& path, int eap_count,
                                std::uint64_t seed, int service_count);

/// Binds parsed records to eAPs and assigns ids in arrival order.
std::vector<Request> bind_to_eaps(std::vector<TraceRecord> records, int eap_count,
                                  std::uint64_t seed);

/// Synthesizes `duration_frames` frames of traffic. base_rate is the mean
/// number of arrivals per slot over the whole cluster.
std::vector<Request> synthesize(const ArrivalPattern& pattern, int duration_frames,
                                double base_rate, const ServiceCatalog& catalog,
                                const SlotGrid& grid);

/// Folds raw trace type ids onto 1..W: distinct ids are sorted and the k-th
/// id maps to (k mod W) + 1. Seedless, so a given id set always maps the same
/// way, and exactly W distinct ids give a bijection.
std::map<std::int64_t, int> classify_services(const std::vector<std::int64_t>& raw_types,
                                              int service_count);

}  // namespace edgesched

#endif  // EDGESCHED_WORKLOAD_HPP_
