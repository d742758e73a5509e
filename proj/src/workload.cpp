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

#include "edgesched/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "edgesched/common.hpp"

namespace edgesched {

const char* to_string(RequestStatus status) {
  switch (status) {
    case RequestStatus::kQueuedAtEap: return "queued_at_eap";
    case RequestStatus::kInTransit: return "in_transit";
    case RequestStatus::kQueuedAtExecutor: return "queued_at_executor";
    case RequestStatus::kProcessing: return "processing";
    case RequestStatus::kCompletedOnTime: return "completed_on_time";
    case RequestStatus::kDropped: return "dropped";
  }
  return "?";
}

void Request::advance(RequestStatus next, double now_ms) {
  if (terminal()) {
    throw ContractError("request " + std::to_string(id) + " is already " +
                        to_string(status));
  }
  if (static_cast<int>(next) < static_cast<int>(status)) {
    throw ContractError("request " + std::to_string(id) + ": illegal transition " +
                        to_string(status) + " -> " + to_string(next));
  }
  status = next;
  if (terminal()) completion_time_ms = now_ms;
}

const char* to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::kPeriodicCpu: return "p1";
    case PatternKind::kPeriodicMem: return "p2";
    case PatternKind::kPeriodicCpu2x: return "p3";
    case PatternKind::kRaw: return "p4";
    case PatternKind::kFile: return "file";
  }
  return "?";
}

PatternKind parse_pattern_kind(const std::string& name) {
  if (name == "p1") return PatternKind::kPeriodicCpu;
  if (name == "p2") return PatternKind::kPeriodicMem;
  if (name == "p3") return PatternKind::kPeriodicCpu2x;
  if (name == "p4") return PatternKind::kRaw;
  if (name == "file") return PatternKind::kFile;
  throw ValidationError("unknown arrival pattern '" + name + "'");
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* name) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(line, std::string("bad ") + name + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in, int service_count) {
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 6) {
      throw ParseError(line_no, "expected 6 columns, got " + std::to_string(fields.size()));
    }
    TraceRecord r;
    r.arrival_ms = parse_field<std::int64_t>(fields[0], line_no, "arrival_ms");
    r.service_type = parse_field<int>(fields[1], line_no, "service_type");
    r.deadline_ms = parse_field<std::int64_t>(fields[2], line_no, "deadline_ms");
    r.cpu_demand = parse_field<double>(fields[3], line_no, "cpu_demand");
    r.mem_demand = parse_field<double>(fields[4], line_no, "mem_demand");
    r.input_size_kb = parse_field<double>(fields[5], line_no, "input_size_kb");

    if (r.arrival_ms < 0) throw ParseError(line_no, "arrival_ms must be >= 0");
    if (r.deadline_ms <= 0) throw ParseError(line_no, "deadline_ms must be > 0");
    if (!(r.cpu_demand > 0) || !(r.mem_demand > 0)) {
      throw ParseError(line_no, "cpu_demand and mem_demand must be > 0");
    }
    if (!(r.input_size_kb >= 0)) throw ParseError(line_no, "input_size_kb must be >= 0");
    if (r.service_type < 1 || r.service_type > service_count) {
      throw ValidationError("line " + std::to_string(line_no) + ": service_type " +
                            std::to_string(r.service_type) + " outside [1, " +
                            std::to_string(service_count) + "]");
    }
    records.push_back(r);
  }
  return records;
}

std::vector<Request> bind_to_eaps(std::vector<TraceRecord> records, int eap_count,
                                  std::uint64_t seed) {
  require(eap_count >= 1, "eap_count must be >= 1");
  std::stable_sort(records.begin(), records.end(),
                   [](const TraceRecord& a, const TraceRecord& b) {
                     return a.arrival_ms < b.arrival_ms;
                   });
  Rng rng = make_rng(seed, "eap-binding");
  std::vector<Request> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Request r;
    r.id = static_cast<std::int64_t>(i);
    r.record = records[i];
    r.eap_id = std::min(eap_count - 1, static_cast<int>(uniform01(rng) * eap_count));
    out.push_back(r);
  }
  return out;
}

std::vector<Request> load_trace(const std::filesystem::path& path, int eap_count,
                                std::uint64_t seed, int service_count) {
  require(eap_count >= 1, "eap_count must be >= 1");
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file " + path.string());
  return bind_to_eaps(parse_trace(in, service_count), eap_count, seed);
}

namespace {

int draw_service(const ServiceCatalog& catalog, Rng& rng) {
  double total = 0;
  for (const auto& s : catalog.specs()) total += s.weight;
  if (total <= 0) return 1 + std::min(catalog.size() - 1,
                                      static_cast<int>(uniform01(rng) * catalog.size()));
  double u = uniform01(rng) * total;
  for (int w = 1; w <= catalog.size(); ++w) {
    u -= catalog[w].weight;
    if (u < 0) return w;
  }
  return catalog.size();
}

std::int64_t draw_deadline(const ServiceSpec& spec, Rng& rng) {
  double d = spec.deadline_min_ms + uniform01(rng) * (spec.deadline_max_ms - spec.deadline_min_ms);
  return std::max<std::int64_t>(1, std::llround(d));
}

// Slot-by-slot Poisson arrivals whose rate (P1/P3) or memory demand (P2)
// follows base * (1 + amplitude * sin(2 pi f / period)).
std::vector<TraceRecord> synthesize_periodic(const ArrivalPattern& pattern, int frames,
                                             double base_rate,
                                             const ServiceCatalog& catalog,
                                             const SlotGrid& grid) {
  Rng rng = make_rng(pattern.seed, "arrivals");
  const int period = pattern.effective_period_frames();
  require(period > 0, "periodic patterns need period_frames > 0");
  std::vector<TraceRecord> out;
  for (int f = 0; f < frames; ++f) {
    const double wave =
        1.0 + pattern.amplitude * std::sin(2.0 * std::numbers::pi * f / period);
    const bool mem_wave = pattern.kind == PatternKind::kPeriodicMem;
    const double rate = mem_wave ? base_rate : base_rate * wave;
    std::poisson_distribution<int> count_dist(std::max(rate, 0.0));
    for (int s = 0; s < grid.slots_per_frame; ++s) {
      const double slot_start = (static_cast<double>(f) * grid.slots_per_frame + s) * grid.slot_ms;
      const int count = rate > 0 ? count_dist(rng) : 0;
      for (int k = 0; k < count; ++k) {
        TraceRecord r;
        r.arrival_ms = static_cast<std::int64_t>(std::floor(slot_start + uniform01(rng) * grid.slot_ms));
        r.service_type = draw_service(catalog, rng);
        const ServiceSpec& spec = catalog[r.service_type];
        r.deadline_ms = draw_deadline(spec, rng);
        r.cpu_demand = spec.request_cpu;
        r.mem_demand = mem_wave ? std::max(1e-3, spec.request_mem * wave) : spec.request_mem;
        r.input_size_kb = spec.input_size_kb;
        out.push_back(r);
      }
    }
  }
  return out;
}

// Lognormal inter-arrival gaps and demand multipliers (unit mean).
std::vector<TraceRecord> synthesize_raw(const ArrivalPattern& pattern, int frames,
                                        double base_rate, const ServiceCatalog& catalog,
                                        const SlotGrid& grid) {
  constexpr double kGapSigma = 1.0;
  constexpr double kDemandSigma = 0.5;
  Rng rng = make_rng(pattern.seed, "arrivals");
  const double mean_gap = grid.slot_ms / base_rate;
  std::lognormal_distribution<double> gap(std::log(mean_gap) - 0.5 * kGapSigma * kGapSigma,
                                          kGapSigma);
  std::lognormal_distribution<double> demand(-0.5 * kDemandSigma * kDemandSigma, kDemandSigma);
  const double horizon = static_cast<double>(frames) * grid.slots_per_frame * grid.slot_ms;
  std::vector<TraceRecord> out;
  double t = gap(rng);
  while (t < horizon) {
    TraceRecord r;
    r.arrival_ms = static_cast<std::int64_t>(std::floor(t));
    r.service_type = draw_service(catalog, rng);
    const ServiceSpec& spec = catalog[r.service_type];
    r.deadline_ms = draw_deadline(spec, rng);
    r.cpu_demand = spec.request_cpu * demand(rng);
    r.mem_demand = spec.request_mem * demand(rng);
    r.input_size_kb = spec.input_size_kb * demand(rng);
    out.push_back(r);
    t += gap(rng);
  }
  return out;
}

}  // namespace

std::vector<Request> synthesize(const ArrivalPattern& pattern, int duration_frames,
                                double base_rate, const ServiceCatalog& catalog,
                                const SlotGrid& grid) {
  require(duration_frames > 0, "duration_frames must be > 0");
  require(base_rate > 0, "base_rate must be > 0");
  require(pattern.amplitude >= 0 && pattern.amplitude <= 1, "amplitude must be in [0, 1]");
  std::vector<TraceRecord> records;
  switch (pattern.kind) {
    case PatternKind::kPeriodicCpu:
    case PatternKind::kPeriodicMem:
    case PatternKind::kPeriodicCpu2x:
      records = synthesize_periodic(pattern, duration_frames, base_rate, catalog, grid);
      break;
    case PatternKind::kRaw:
      records = synthesize_raw(pattern, duration_frames, base_rate, catalog, grid);
      break;
    case PatternKind::kFile:
      throw ContractError("file patterns are loaded with load_trace");
  }
  return bind_to_eaps(std::move(records), grid.eap_count, pattern.seed);
}

std::map<std::int64_t, int> classify_services(const std::vector<std::int64_t>& raw_types,
                                              int service_count) {
  require(service_count >= 1, "W must be >= 1");
  std::set<std::int64_t> distinct(raw_types.begin(), raw_types.end());
  std::map<std::int64_t, int> mapping;
  int rank = 0;
  for (std::int64_t raw : distinct) mapping[raw] = (rank++ % service_count) + 1;
  return mapping;
}

}  // namespace edgesched
