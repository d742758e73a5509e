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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "edgesched/baselines.hpp"
#include "edgesched/metrics.hpp"
#include "fixtures.hpp"

using namespace edgesched;
namespace fx = edgesched::fixture;

namespace {

SlotOutcome outcome(int arrived, int edge, int cloud, int dropped, double cost = 0) {
  SlotOutcome o;
  o.arrived = arrived;
  o.completed_edge = edge;
  o.completed_cloud = cloud;
  o.dropped = dropped;
  o.dispatch_cost_kb = cost;
  o.cpu_util = {0.0, 0.0};
  o.mem_util = {0.0, 0.0};
  return o;
}

Clock clock_at(std::int64_t slot, int slots_per_frame) {
  Clock c;
  c.slots_per_frame = slots_per_frame;
  c.slot_index = slot;
  c.now_ms = slot * c.slot_ms;
  return c;
}

}  // namespace

TEST_CASE("load_std") {
  const std::vector<double> same{0.3, 0.3};
  CHECK(load_std(same, same) == 0.0);
  const std::vector<double> cpu{0.0, 1.0}, mem{0.4, 0.4};
  // values 0, 1, 0.4, 0.4: mean 0.45
  const double expected = std::sqrt((0.45 * 0.45 + 0.55 * 0.55 + 2 * 0.05 * 0.05) / 4.0);
  CHECK(load_std(cpu, mem) == doctest::Approx(expected));
  CHECK(load_std({}, {}) == 0.0);
  CHECK_THROWS_AS(load_std(cpu, std::vector<double>{0.1}), ContractError);
  Rng rng = make_rng(1, "std");
  for (int i = 0; i < 500; ++i) {
    std::vector<double> a(5), b(5);
    for (auto& v : a) v = uniform01(rng);
    for (auto& v : b) v = uniform01(rng);
    const double s = load_std(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 0.5 + 1e-12);
  }
}

TEST_CASE("slot accounting") {
  MetricsAccumulator acc(4);
  acc.record_slot(outcome(0, 0, 0, 0), 1.0);
  CHECK(acc.run().arrived == 0);
  CHECK(acc.run().completed == 0);
  acc.record_slot(outcome(1, 1, 0, 0), 1.0);
  CHECK(acc.run().completed == 1);
  acc.record_slot(outcome(1, 0, 0, 1), 1.0);
  CHECK(acc.run().dropped == 1);
  CHECK(acc.run().completed == 1);
  CHECK(acc.run().phi_prime() == doctest::Approx(0.5));
  CHECK(RunMetrics{}.phi_prime() == 0.0);
  CHECK_THROWS_AS(MetricsAccumulator(0), ContractError);
}

TEST_CASE("close_frame examples") {
  SUBCASE("eight of ten") {
    MetricsAccumulator acc(2);
    acc.record_slot(outcome(6, 3, 1, 0, 100), 0.5);
    acc.record_slot(outcome(4, 2, 2, 2, 50), 0.7);
    const auto m = acc.close_frame(clock_at(2, 2));
    CHECK(m.frame == 0);
    CHECK(m.arrived == 10);
    CHECK(m.completed_edge == 5);
    CHECK(m.completed_cloud == 3);
    CHECK(m.dropped == 2);
    CHECK(m.phi_f == doctest::Approx(0.8));
    CHECK_FALSE(m.degenerate);
    CHECK(m.cost_kb == 150);
    CHECK(m.reward_mean == doctest::Approx(0.6));
  }
  SUBCASE("no arrivals uses the max guard") {
    MetricsAccumulator acc(1);
    acc.record_slot(outcome(0, 2, 0, 0), 1.0);
    const auto m = acc.close_frame(clock_at(1, 1));
    CHECK(m.phi_f == 2.0);
    CHECK(m.degenerate);
  }
  SUBCASE("first-time image placement") {
    ClusterState env(fx::topology(1, {NodeSpec{}}), ServiceCatalog({fx::service(100, 500, 512, 200)}),
                     ClusterOptions{}, {});
    MetricsAccumulator acc(4);
    acc.record_scaling(env.apply_scaling(OrchestrationAction{{NodeScaling{0, 1}}}));
    for (int t = 0; t < 4; ++t) acc.record_slot(env.step_slot(fx::no_actions(env)), 1.0);
    const auto m = acc.close_frame(env.clock());
    CHECK(m.image_mb == 200);
    CHECK(acc.run().image_mb == 200);
  }
  SUBCASE("utilisation averages over slots") {
    MetricsAccumulator acc(2);
    auto a = outcome(1, 0, 0, 0);
    a.cpu_util = {0.0, 1.0};
    a.mem_util = {0.0, 1.0};
    auto b = outcome(1, 0, 0, 0);
    b.cpu_util = {0.5, 0.5};
    b.mem_util = {0.5, 0.5};
    acc.record_slot(a, 0.0);
    acc.record_slot(b, 0.0);
    const auto m = acc.close_frame(clock_at(2, 2));
    CHECK(m.util_mean == doctest::Approx(0.5));
    CHECK(m.util_std == doctest::Approx(0.25));
  }
  SUBCASE("off-boundary calls are rejected") {
    MetricsAccumulator acc(4);
    CHECK_THROWS_AS(acc.close_frame(clock_at(3, 4)), ContractError);
    CHECK_THROWS_AS(acc.close_frame(clock_at(0, 4)), ContractError);
  }
  SUBCASE("counters reset between frames") {
    MetricsAccumulator acc(1);
    acc.record_slot(outcome(3, 3, 0, 0), 1.0);
    acc.close_frame(clock_at(1, 1));
    acc.record_slot(outcome(2, 1, 0, 0), 1.0);
    const auto m = acc.close_frame(clock_at(2, 1));
    CHECK(m.frame == 1);
    CHECK(m.arrived == 2);
    CHECK(m.phi_f == doctest::Approx(0.5));
    CHECK(acc.frames().size() == 2);
    CHECK(mean_phi_f(acc.frames()) == doctest::Approx(0.75));
  }
}

TEST_CASE("mean_phi_f skips degenerate frames") {
  std::vector<FrameMetrics> frames(3);
  frames[0].phi_f = 0.5;
  frames[1].phi_f = 7.0;
  frames[1].degenerate = true;
  frames[2].phi_f = 1.0;
  CHECK(mean_phi_f(frames) == doctest::Approx(0.75));
  CHECK(mean_phi_f({}) == 0.0);
}

TEST_CASE("frames csv") {
  std::ostringstream header;
  write_frames_header(header);
  CHECK(header.str() ==
        "frame,arrived,completed_edge,completed_cloud,dropped,phi_f,cost_kb,image_mb,util_mean,"
        "util_std,reward_mean\n");

  FrameMetrics m;
  m.frame = 3;
  m.arrived = 7;
  m.completed_edge = 4;
  m.completed_cloud = 2;
  m.dropped = 1;
  m.phi_f = 6.0 / 7.0;
  m.cost_kb = 12.5;
  m.image_mb = 200;
  m.util_mean = 0.1;
  m.util_std = 1.0 / 3.0;
  m.reward_mean = std::exp(-0.5);
  std::ostringstream out;
  write_frames_csv(out, std::vector<FrameMetrics>{m});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::string> cells;
  std::stringstream row(line);
  for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
  REQUIRE(cells.size() == 11);
  CHECK(cells[0] == "3");
  CHECK(cells[1] == "7");
  CHECK(std::stod(cells[5]) == m.phi_f);
  CHECK(std::stod(cells[9]) == m.util_std);
  CHECK(std::stod(cells[10]) == m.reward_mean);
}

TEST_CASE("run totals agree with the request ledger") {
  Rng rng = make_rng(2, "ledger");
  for (int trial = 0; trial < 8; ++trial) {
    auto topo = fx::random_topology(rng, 3, 3);
    topo.slots_per_frame = 8;
    const int W = 2;
    const auto stream = fx::random_stream(rng, 300, 40 * 250.0, W, topo.eap_count);
    ClusterState env(topo, ServiceCatalog(fx::random_services(rng, W)), ClusterOptions{}, stream);
    for (int n = 0; n < env.node_count(); ++n) env.deploy(n, 1 + n % W);
    MetricsAccumulator acc(topo.slots_per_frame);
    double last_cost = 0;
    while (!env.drained() || !env.clock().at_frame_boundary()) {
      acc.record_slot(env.step_slot(greedy_dispatch_all(env)), 1.0);
      CHECK(acc.run().cost_kb >= last_cost);
      last_cost = acc.run().cost_kb;
      if (env.clock().at_frame_boundary()) acc.close_frame(env.clock());
    }
    std::int64_t on_time = 0, dropped = 0, frame_completed = 0, frame_arrived = 0;
    for (const auto& r : env.requests()) {
      on_time += r.status == RequestStatus::kCompletedOnTime;
      dropped += r.status == RequestStatus::kDropped;
    }
    for (const auto& f : acc.frames()) {
      frame_completed += f.completed_edge + f.completed_cloud;
      frame_arrived += f.arrived;
    }
    CHECK(acc.run().arrived == static_cast<std::int64_t>(stream.size()));
    CHECK(frame_arrived == acc.run().arrived);
    CHECK(frame_completed == acc.run().completed);
    CHECK(acc.run().completed == on_time);
    CHECK(acc.run().dropped == dropped);
    CHECK(acc.run().phi_prime() ==
          doctest::Approx(static_cast<double>(on_time) / static_cast<double>(stream.size())));
    CHECK(acc.run().phi_prime() <= 1.0);
  }
}
