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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "edgesched/experiment.hpp"

using namespace edgesched;
namespace fs = std::filesystem;

namespace {

// Desk topology with tiny learners and short episodes.
ExperimentConfig quick_config(std::uint64_t seed = 3) {
  ExperimentConfig c = desk_config();
  c.seed = seed;
  c.topology.slots_per_frame = 12;
  c.training.episodes = 2;
  c.training.episode_frames = 2;
  c.training.curriculum = {{1, 0.5}, {0, 1.0}};
  c.eval.frames = 2;
  c.eval.drain_frames = 1;
  c.cmmac.actor_hidden = {16};
  c.cmmac.critic_hidden = {16};
  c.gpg.d_emb = 8;
  c.gpg.gnn_hidden = 8;
  c.gpg.episode_frames = 2;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("edgesched_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string config_error_path(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("EDGESCHED_CLI");
  REQUIRE(cli != nullptr);
  const int status = std::system((std::string(cli) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("presets") {
  const auto desk = desk_config();
  CHECK_NOTHROW(validate(desk));
  CHECK(desk.topology.eap_count == 2);
  CHECK(desk.topology.nodes.size() == 6);
  CHECK(desk.services.size() == 6);
  CHECK(desk.topology.slot_ms == 250);
  CHECK(desk.topology.slots_per_frame == 100);
  CHECK(desk.gpg.nodes_per_frame == 2);
  CHECK(desk.cmmac.gamma == 0.9);
  CHECK(desk.cmmac.epsilon == 1.0);
  CHECK(desk.cmmac.actor_lr == 5e-4);
  CHECK(desk.gpg.lr == 1e-3);

  const auto full = full_config();
  CHECK_NOTHROW(validate(full));
  CHECK(full.topology.eap_count == 5);
  CHECK(full.topology.nodes.size() == 40);
  CHECK(full.services.size() == 30);
  CHECK(full.topology.cloud.parallelism == 60);
}

TEST_CASE("parse_config") {
  CHECK(to_json(parse_config("{}")) == to_json(desk_config()));
  CHECK(to_json(parse_config(R"({"preset": "full"})")) == to_json(full_config()));
  const auto c = parse_config(R"({"seed": 9, "cmmac": {"epsilon": 4}, "policy": {"dispatch": "greedy"}})");
  CHECK(c.seed == 9);
  CHECK(c.cmmac.epsilon == 4.0);
  CHECK(c.dispatch == DispatchKind::kGreedy);
  CHECK(c.orchestrate == OrchestrateKind::kGpg);
}

TEST_CASE("config errors name the field") {
  CHECK(config_error_path(R"({"cmmac": {"gama": 0.9}})") == "cmmac.gama");
  CHECK(config_error_path(R"({"cmmac": {"gamma": "high"}})") == "cmmac.gamma");
  CHECK(config_error_path(R"({"cmmac": {"gamma": 0}})") == "cmmac.gamma");
  CHECK(config_error_path(R"({"gpg": {"H": 0}})") == "gpg.H");
  CHECK(config_error_path(R"({"training": {"episodes": -1}})") == "training.episodes");
  CHECK(config_error_path(R"({"workload": {"pattern": "file"}})") == "workload.trace");
  CHECK(config_error_path(R"({"preset": "cloud"})") == "preset");
  CHECK(config_error_path(R"({"seed": )") == "<root>");
  CHECK(config_error_path(R"({"bogus": 1})") == "bogus");
  CHECK(config_error_path(R"({"cluster": {"lambda_e": 1.5}})") == "cluster.lambda_e");
  CHECK(config_error_path(R"({"workload": {"base_rate": 0}})") == "workload.base_rate");
  CHECK_THROWS_AS(load_config("/nonexistent/edgesched.json"), ConfigError);
}

TEST_CASE("to_json round trips") {
  auto c = quick_config(11);
  c.workload.pattern = PatternKind::kPeriodicCpu2x;
  c.cluster.eap_strategy = DequeueStrategy::kFifo;
  c.orchestrate = OrchestrateKind::kNativeThreshold;
  c.gpg.aggregation = Aggregation::kSequential;
  c.cmmac.epsilon = 0.25;
  c.topology.nodes[2].speed_factor = 0.3;
  c.services[1].deadline_max_ms = 1234.5;
  const std::string text = to_json(c);
  const auto back = parse_config(text);
  CHECK(to_json(back) == text);
  CHECK(back.workload.pattern == PatternKind::kPeriodicCpu2x);
  CHECK(back.cluster.eap_strategy == DequeueStrategy::kFifo);
  CHECK(back.gpg.aggregation == Aggregation::kSequential);
  CHECK(back.topology.nodes[2].speed_factor == 0.3);
  CHECK(back.services[1].deadline_max_ms == 1234.5);
  CHECK(back.training.curriculum.size() == 2);
}

TEST_CASE("curriculum stages") {
  TrainingConfig t;
  t.episodes = 9;
  t.episode_frames = 20;
  CHECK(stage_for(t, 0).frames == 10);
  CHECK(stage_for(t, 0).rate_scale == 0.25);
  CHECK(stage_for(t, 3).frames == 20);  // 50 capped at the episode length
  CHECK(stage_for(t, 3).rate_scale == 0.5);
  CHECK(stage_for(t, 8).frames == 20);
  CHECK(stage_for(t, 8).rate_scale == 1.0);
  t.curriculum.clear();
  CHECK(stage_for(t, 4).frames == 20);
  CHECK(stage_for(t, 4).rate_scale == 1.0);
}

TEST_CASE("streams and layout") {
  const auto c = quick_config();
  CHECK(make_stream(c, 3, 1.0, 5) == make_stream(c, 3, 1.0, 5));
  CHECK_FALSE(make_stream(c, 3, 1.0, 5) == make_stream(c, 3, 1.0, 6));
  CHECK(eval_stream_seed(1, 0) != train_stream_seed(1, 0));
  CHECK(eval_stream_seed(1, 0) == eval_stream_seed(1, 0));
  CHECK(eval_stream_seed(1, 0) != eval_stream_seed(2, 0));

  ClusterState env(c.topology, make_catalog(c), c.cluster, {});
  CHECK(deploy_initial(env, 2) == 12);
  for (int w = 1; w <= 6; ++w) {
    int count = 0;
    for (const auto& n : env.nodes()) count += n.deployed(w);
    CHECK(count == 2);
  }
}

TEST_CASE("frame boundary orchestration precedes every dispatch") {
  auto c = quick_config();
  c.topology.slots_per_frame = 3;
  Agents agents = make_agents(c);
  PolicySet p = policy_set(c, agents);
  ClusterState env = make_env(c, make_stream(c, 2, 1.0, 1));
  std::vector<std::string> log;
  EpisodeOptions o;
  o.frames = 2;
  o.drain_frames = 1;
  o.mode = PolicyMode::kSample;
  o.train_dispatch = true;
  o.train_orchestration = true;
  o.event_log = &log;
  Rng rng = make_rng(1, "log");
  const auto r = run_episode(env, p, o, rng);
  CHECK(r.frames.size() == 3);
  const std::vector<std::string> expected{
      "orchestrate 0", "dispatch 0", "dispatch 1", "dispatch 2",
      "orchestrate 1", "dispatch 3", "dispatch 4", "dispatch 5",
      "orchestrate 2", "dispatch 6", "dispatch 7", "dispatch 8"};
  CHECK(log == expected);
}

TEST_CASE("zero episodes") {
  auto c = quick_config();
  c.training.episodes = 0;
  const auto dir = scratch("zero");
  run_training(c, dir);
  CHECK(slurp(dir / "learning_curve.csv") == "episode,mean_phi_f\n");
  for (const char* f : {"actor.bin", "critic.bin", "critic_target.bin", "gnn_f1.bin", "policy_q.bin"}) {
    CHECK(fs::exists(dir / "checkpoints" / f));
  }
  // Freshly initialized networks.
  Agents fresh = make_agents(c);
  CHECK(nn::load_mlp((dir / "checkpoints" / "actor.bin").string()) == fresh.cmmac->actor());
  CHECK(nn::load_mlp((dir / "checkpoints" / "policy_g.bin").string()) == fresh.gpg->networks().g);
}

TEST_CASE("run directories and determinism") {
  const auto c = quick_config(5);
  const auto a = scratch("det_a"), b = scratch("det_b"), rerun = scratch("det_rerun");
  const auto ra = run_training(c, a);
  run_training(c, b);
  for (const char* f : {"config.json", "seed.txt", "git_describe.txt", "learning_curve.csv",
                        "frames.csv", "summary.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "checkpoints" / "actor.bin") == slurp(b / "checkpoints" / "actor.bin"));
  CHECK(slurp(a / "seed.txt") == "5\n");
  CHECK(slurp(a / "frames.csv").rfind("frame,arrived,", 0) == 0);
  CHECK(ra.frames.size() == 3);

  // Rerun from the echoed configuration.
  run_training(load_config(a / "config.json"), rerun);
  CHECK(slurp(rerun / "frames.csv") == slurp(a / "frames.csv"));
  CHECK(slurp(rerun / "learning_curve.csv") == slurp(a / "learning_curve.csv"));

  // Evaluating the saved checkpoints reproduces the post-training evaluation.
  const auto ev = scratch("det_eval");
  run_eval(c, a / "checkpoints", ev);
  CHECK(slurp(ev / "frames.csv") == slurp(a / "frames.csv"));

  // A different seed changes the traffic.
  const auto other = scratch("det_other");
  run_training(quick_config(6), other);
  CHECK(slurp(other / "frames.csv") != slurp(a / "frames.csv"));
}

TEST_CASE("checkpoints from another topology are rejected") {
  const auto c = quick_config();
  const auto dir = scratch("shape");
  auto zero = c;
  zero.training.episodes = 0;
  run_training(zero, dir);
  auto wider = c;
  wider.topology.nodes.push_back(NodeSpec{1, 2000, 4096, 300, 1.0});
  CHECK_THROWS_AS(run_eval(wider, dir / "checkpoints", scratch("shape_eval")), ValidationError);
  CHECK_THROWS_AS(run_eval(c, scratch("shape_missing"), scratch("shape_eval2")), std::exception);
}

TEST_CASE("baseline policies need no checkpoints") {
  auto c = quick_config();
  c.dispatch = DispatchKind::kGreedy;
  c.orchestrate = OrchestrateKind::kNativeThreshold;
  const auto out = scratch("greedy");
  const auto r = run_eval(c, {}, out);
  CHECK(r.run.arrived > 0);
  CHECK(fs::exists(out / "frames.csv"));
  CHECK(r.run.phi_prime() <= 1.0);
}

TEST_CASE("suite grids") {
  const auto base = desk_config();
  CHECK(suite_cells("hyper_sweep", base).size() == 27);
  CHECK(suite_cells("dequeue", base).size() == 3);
  CHECK(suite_cells("baselines", base).size() == 4);
  CHECK(suite_cells("patterns", base).size() == 4);
  CHECK(suite_cells("load_balance", base).size() == 3);
  CHECK_THROWS_AS(suite_cells("ablation", base), ValidationError);
  for (const char* name : {"hyper_sweep", "dequeue", "baselines", "patterns", "load_balance"}) {
    std::set<std::string> names;
    for (const auto& cell : suite_cells(name, base)) {
      names.insert(cell.name);
      CHECK_NOTHROW(validate(cell.cfg));
      CHECK(cell.cfg.seed == base.seed);
    }
    CHECK(names.size() == suite_cells(name, base).size());
  }
  std::set<std::pair<int, int>> policies;
  for (const auto& cell : suite_cells("baselines", base)) {
    policies.insert({static_cast<int>(cell.cfg.dispatch), static_cast<int>(cell.cfg.orchestrate)});
  }
  CHECK(policies.size() == 4);

  auto quick = quick_config();
  quick.training.episodes = 0;
  const auto out = scratch("suite");
  run_suite("dequeue", quick, out);
  const std::string summary = slurp(out / "summary.csv");
  CHECK(summary.rfind("cell,mean_phi_f,phi_prime,cost_kb,image_mb\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
  CHECK(fs::exists(out / "dequeue_fifo" / "frames.csv"));
}

TEST_CASE("command line") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"cmmac": {"gama": 1}})";
  std::ofstream(dir / "invalid.json") << R"({"gpg": {"H": 99}})";
  CHECK(run_cli("train --config " + (dir / "bad.json").string() + " --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("train --config " + (dir / "invalid.json").string() + " --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("eval --out " + (dir / "y").string()) == 2);  // learners need checkpoints
  CHECK(run_cli("frobnicate") != 0);

  auto c = quick_config();
  std::ofstream(dir / "quick.json") << to_json(c);
  CHECK(run_cli("train --quiet --episodes 0 --config " + (dir / "quick.json").string() + " --out " +
                (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "summary.json"));
  CHECK(parse_config(slurp(dir / "run" / "config.json")).training.episodes == 0);
  CHECK(run_cli("eval --config " + (dir / "quick.json").string() + " --checkpoints " +
                (dir / "run" / "checkpoints").string() + " --out " + (dir / "ev").string()) == 0);
  CHECK(slurp(dir / "ev" / "frames.csv") == slurp(dir / "run" / "frames.csv"));
}
