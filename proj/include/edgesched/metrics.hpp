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

// Throughput, cost and load-balance accounting.

#ifndef EDGESCHED_METRICS_HPP_
#define EDGESCHED_METRICS_HPP_

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "edgesched/cluster.hpp"

namespace edgesched {

/// Population standard deviation of the 2N values cpu ++ mem.
double load_std(std::span<const double> cpu_util, std::span<const double> mem_util);

struct FrameMetrics {
  std::int64_t frame = 0;
  std::int64_t arrived = 0;
  std::int64_t completed_edge = 0;
  std::int64_t completed_cloud = 0;
  std::int64_t dropped = 0;
  double phi_f = 0;          // on-time completions / max(arrived, 1)
  bool degenerate = false;   // no arrivals in the frame
  double cost_kb = 0;        // requests forwarded off their eAP
  double image_mb = 0;       // images pulled by scaling
  double util_mean = 0;      // mean over slots of the mean node cpu/mem utilisation
  double util_std = 0;       // mean over slots of load_std
  double reward_mean = 0;    // mean dispatch reward over the frame's slots
};

struct RunMetrics {
  std::int64_t arrived = 0;
  std::int64_t completed = 0;
  std::int64_t dropped = 0;
  double cost_kb = 0;
  double image_mb = 0;

  double phi_prime() const {
    return arrived > 0 ? static_cast<double>(completed) / static_cast<double>(arrived) : 0.0;
  }
};

class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(int slots_per_frame);

  void record_slot(const SlotOutcome& outcome, double reward);
  void record_scaling(const ScalingReport& report);

  /// Emits the frame that just ended. `clock` must sit on a frame boundary.
  FrameMetrics close_frame(const Clock& clock);

  const RunMetrics& run() const { return run_; }
  const std::vector<FrameMetrics>& frames() const { return frames_; }

 private:
  int slots_per_frame_;
  FrameMetrics current_;
  int slots_ = 0;
  double util_mean_sum_ = 0;
  double util_std_sum_ = 0;
  double reward_sum_ = 0;
  RunMetrics run_;
  std::vector<FrameMetrics> frames_;
};

/// Mean phi_f over frames that had arrivals.
double mean_phi_f(std::span<const FrameMetrics> frames);

/// Fixed column order shared with the analysis scripts.
void write_frames_header(std::ostream& out);
void write_frame_row(std::ostream& out, const FrameMetrics& m);
void write_frames_csv(std::ostream& out, std::span<const FrameMetrics> frames);

}  // namespace edgesched

#endif  // EDGESCHED_METRICS_HPP_
