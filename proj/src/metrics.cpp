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

#include "edgesched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "edgesched/common.hpp"

namespace edgesched {

double load_std(std::span<const double> cpu_util, std::span<const double> mem_util) {
  require(cpu_util.size() == mem_util.size(), "cpu and mem vectors differ in length");
  const std::size_t n = cpu_util.size() + mem_util.size();
  if (n == 0) return 0.0;
  double mean = 0;
  for (double v : cpu_util) mean += v;
  for (double v : mem_util) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0;
  for (double v : cpu_util) ss += (v - mean) * (v - mean);
  for (double v : mem_util) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n));
}

MetricsAccumulator::MetricsAccumulator(int slots_per_frame) : slots_per_frame_(slots_per_frame) {
  require(slots_per_frame >= 1, "slots_per_frame must be >= 1");
}

void MetricsAccumulator::record_slot(const SlotOutcome& o, double reward) {
  current_.arrived += o.arrived;
  current_.completed_edge += o.completed_edge;
  current_.completed_cloud += o.completed_cloud;
  current_.dropped += o.dropped;
  current_.cost_kb += o.dispatch_cost_kb;
  run_.arrived += o.arrived;
  run_.completed += o.completed_on_time();
  run_.dropped += o.dropped;
  run_.cost_kb += o.dispatch_cost_kb;

  double mean = 0;
  for (double v : o.cpu_util) mean += v;
  for (double v : o.mem_util) mean += v;
  const std::size_t n = o.cpu_util.size() + o.mem_util.size();
  if (n > 0) mean /= static_cast<double>(n);
  util_mean_sum_ += mean;
  util_std_sum_ += load_std(o.cpu_util, o.mem_util);
  reward_sum_ += reward;
  ++slots_;
}

void MetricsAccumulator::record_scaling(const ScalingReport& report) {
  current_.image_mb += report.image_pull_mb;
  run_.image_mb += report.image_pull_mb;
}

FrameMetrics MetricsAccumulator::close_frame(const Clock& clock) {
  if (!clock.at_frame_boundary() || clock.slot_index == 0) {
    throw ContractError("close_frame called off a frame boundary");
  }
  FrameMetrics m = current_;
  m.frame = clock.frame_index() - 1;
  m.degenerate = m.arrived == 0;
  m.phi_f = static_cast<double>(m.completed_edge + m.completed_cloud) /
            static_cast<double>(std::max<std::int64_t>(m.arrived, 1));
  if (slots_ > 0) {
    m.util_mean = util_mean_sum_ / slots_;
    m.util_std = util_std_sum_ / slots_;
    m.reward_mean = reward_sum_ / slots_;
  }
  frames_.push_back(m);
  current_ = FrameMetrics{};
  slots_ = 0;
  util_mean_sum_ = util_std_sum_ = reward_sum_ = 0;
  return m;
}

double mean_phi_f(std::span<const FrameMetrics> frames) {
  double sum = 0;
  int count = 0;
  for (const auto& f : frames) {
    if (f.degenerate) continue;
    sum += f.phi_f;
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

void write_frames_header(std::ostream& out) {
  out << "frame,arrived,completed_edge,completed_cloud,dropped,phi_f,cost_kb,image_mb,"
         "util_mean,util_std,reward_mean\n";
}

void write_frame_row(std::ostream& out, const FrameMetrics& m) {
  // %.17g round-trips doubles, so reruns compare byte for byte.
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%lld,%lld,%lld,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                static_cast<long long>(m.frame), static_cast<long long>(m.arrived),
                static_cast<long long>(m.completed_edge), static_cast<long long>(m.completed_cloud),
                static_cast<long long>(m.dropped), m.phi_f, m.cost_kb, m.image_mb, m.util_mean,
                m.util_std, m.reward_mean);
  out << buf;
}

void write_frames_csv(std::ostream& out, std::span<const FrameMetrics> frames) {
  write_frames_header(out);
  for (const auto& f : frames) write_frame_row(out, f);
}

}  // namespace edgesched
