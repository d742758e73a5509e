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

#include "edgesched/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#ifndef EDGESCHED_GIT_DESCRIBE
#define EDGESCHED_GIT_DESCRIBE "unknown"
#endif

namespace edgesched {

namespace fs = std::filesystem;

const char* git_describe() { return EDGESCHED_GIT_DESCRIBE; }

ServiceCatalog make_catalog(const ExperimentConfig& cfg) { return ServiceCatalog(cfg.services); }

std::vector<Request> make_stream(const ExperimentConfig& cfg, int frames, double rate_scale,
                                 std::uint64_t stream_seed) {
  const ServiceCatalog catalog = make_catalog(cfg);
  if (cfg.workload.pattern == PatternKind::kFile) {
    return load_trace(cfg.workload.trace, cfg.topology.eap_count, stream_seed, catalog.size());
  }
  ArrivalPattern pattern;
  pattern.kind = cfg.workload.pattern;
  pattern.period_frames = cfg.workload.period_frames;
  pattern.amplitude = cfg.workload.amplitude;
  pattern.seed = stream_seed;
  SlotGrid grid{cfg.topology.slot_ms, cfg.topology.slots_per_frame, cfg.topology.eap_count};
  return synthesize(pattern, frames, cfg.workload.base_rate * rate_scale, catalog, grid);
}

ClusterState make_env(const ExperimentConfig& cfg, std::vector<Request> stream) {
  ClusterState env(cfg.topology, make_catalog(cfg), cfg.cluster, std::move(stream));
  deploy_initial(env, cfg.replicas_per_service);
  return env;
}

std::uint64_t train_stream_seed(std::uint64_t seed, int episode) {
  Rng rng = make_rng(seed, "train-episode-" + std::to_string(episode));
  return rng();
}

std::uint64_t eval_stream_seed(std::uint64_t seed, int sequence) {
  Rng rng = make_rng(seed, "eval-sequence-" + std::to_string(sequence));
  return rng();
}

Agents make_agents(const ExperimentConfig& cfg) {
  Agents agents;
  const ClusterState probe = make_env(cfg, {});
  // Network initialization follows the experiment seed.
  if (cfg.dispatch == DispatchKind::kCmmac) {
    CmmacConfig c = cfg.cmmac;
    c.seed = cfg.seed;
    agents.cmmac = std::make_unique<Cmmac>(local_state_size(probe), global_state_size(probe),
                                           probe.eap_count(), probe.node_count(), c);
  }
  if (cfg.orchestrate == OrchestrateKind::kGpg) {
    GpgConfig g = cfg.gpg;
    g.seed = cfg.seed;
    agents.gpg = std::make_unique<GpgOrchestrator>(probe.service_count(), g);
  }
  return agents;
}

PolicySet policy_set(const ExperimentConfig& cfg, Agents& agents) {
  PolicySet p;
  p.dispatch = cfg.dispatch;
  p.orchestrate = cfg.orchestrate;
  p.cmmac = agents.cmmac.get();
  p.gpg = agents.gpg.get();
  p.native = cfg.native;
  return p;
}

CurriculumStage stage_for(const TrainingConfig& training, int episode) {
  if (training.curriculum.empty()) return CurriculumStage{training.episode_frames, 1.0};
  const int S = static_cast<int>(training.curriculum.size());
  const int E = std::max(training.episodes, 1);
  const int index = std::min(S - 1, episode * S / E);
  CurriculumStage stage = training.curriculum[static_cast<std::size_t>(index)];
  if (stage.frames == 0 || stage.frames > training.episode_frames) stage.frames = training.episode_frames;
  return stage;
}

TrainResult train(const ExperimentConfig& cfg, Agents& agents, const Progress& progress) {
  TrainResult result;
  PolicySet policies = policy_set(cfg, agents);
  Rng rng = make_rng(cfg.seed, "training-policy");
  for (int e = 0; e < cfg.training.episodes; ++e) {
    const CurriculumStage stage = stage_for(cfg.training, e);
    ClusterState env =
        make_env(cfg, make_stream(cfg, stage.frames, stage.rate_scale, train_stream_seed(cfg.seed, e)));
    EpisodeOptions o;
    o.frames = stage.frames;
    o.mode = PolicyMode::kSample;
    o.train_dispatch = agents.cmmac != nullptr;
    o.train_orchestration = agents.gpg != nullptr;
    o.epsilon = cfg.cmmac.epsilon;
    const EpisodeResult r = run_episode(env, policies, o, rng);
    result.learning_curve.push_back(r.mean_phi_f);
    if (progress) progress(e, r.mean_phi_f);
  }
  if (agents.cmmac) agents.cmmac->sync_acting();  // evaluate what gets saved
  return result;
}

EvalResult evaluate(const ExperimentConfig& cfg, Agents& agents) {
  EvalResult result;
  PolicySet policies = policy_set(cfg, agents);
  Rng rng = make_rng(cfg.seed, "evaluation-policy");
  std::int64_t offset = 0;
  for (int k = 0; k < cfg.eval.sequences; ++k) {
    ClusterState env = make_env(cfg, make_stream(cfg, cfg.eval.frames, 1.0, eval_stream_seed(cfg.seed, k)));
    EpisodeOptions o;
    o.frames = cfg.eval.frames;
    o.drain_frames = cfg.eval.drain_frames;
    o.mode = PolicyMode::kGreedy;
    o.epsilon = cfg.cmmac.epsilon;
    const EpisodeResult r = run_episode(env, policies, o, rng);
    for (auto f : r.frames) {
      f.frame += offset;
      result.frames.push_back(f);
    }
    offset += static_cast<std::int64_t>(r.frames.size());
    result.run.arrived += r.run.arrived;
    result.run.completed += r.run.completed;
    result.run.dropped += r.run.dropped;
    result.run.cost_kb += r.run.cost_kb;
    result.run.image_mb += r.run.image_mb;
  }
  result.mean_phi_f = mean_phi_f(result.frames);
  return result;
}

void save_agents(const Agents& agents, const fs::path& dir) {
  fs::create_directories(dir);
  if (agents.cmmac) agents.cmmac->save(dir);
  if (agents.gpg) agents.gpg->save(dir);
}

void load_agents(Agents& agents, const fs::path& dir) {
  if (agents.cmmac) agents.cmmac->load(dir);
  if (agents.gpg) agents.gpg->load(dir);
}

void write_run_header(const ExperimentConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << to_json(cfg);
  std::ofstream(dir / "seed.txt") << cfg.seed << "\n";
  std::ofstream(dir / "git_describe.txt") << git_describe() << "\n";
}

void write_learning_curve(const TrainResult& result, const fs::path& path) {
  std::ofstream out(path);
  out << "episode,mean_phi_f\n";
  char buf[64];
  for (std::size_t e = 0; e < result.learning_curve.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", e, result.learning_curve[e]);
    out << buf;
  }
}

void write_eval(const EvalResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "frames.csv");
    write_frames_csv(out, result.frames);
  }
  nlohmann::json summary = {{"arrived", result.run.arrived},
                            {"completed", result.run.completed},
                            {"dropped", result.run.dropped},
                            {"phi_prime", result.run.phi_prime()},
                            {"mean_phi_f", result.mean_phi_f},
                            {"cost_kb", result.run.cost_kb},
                            {"image_mb", result.run.image_mb}};
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
}

EvalResult run_training(const ExperimentConfig& cfg, const fs::path& out, const Progress& progress) {
  validate(cfg);
  write_run_header(cfg, out);
  Agents agents = make_agents(cfg);
  const TrainResult trained = train(cfg, agents, progress);
  write_learning_curve(trained, out / "learning_curve.csv");
  save_agents(agents, out / "checkpoints");
  EvalResult result = evaluate(cfg, agents);
  write_eval(result, out);
  return result;
}

EvalResult run_eval(const ExperimentConfig& cfg, const fs::path& checkpoints, const fs::path& out) {
  validate(cfg);
  write_run_header(cfg, out);
  Agents agents = make_agents(cfg);
  if (agents.cmmac || agents.gpg) load_agents(agents, checkpoints);
  EvalResult result = evaluate(cfg, agents);
  write_eval(result, out);
  return result;
}

std::vector<SuiteCell> suite_cells(const std::string& name, const ExperimentConfig& base) {
  std::vector<SuiteCell> cells;
  if (name == "patterns") {
    for (auto kind : {PatternKind::kPeriodicCpu, PatternKind::kPeriodicMem,
                      PatternKind::kPeriodicCpu2x, PatternKind::kRaw}) {
      ExperimentConfig c = base;
      c.workload.pattern = kind;
      cells.push_back({std::string("pattern_") + to_string(kind), c});
    }
  } else if (name == "dequeue") {
    for (auto s : {DequeueStrategy::kFifo, DequeueStrategy::kLatencyGreedy,
                   DequeueStrategy::kDiscounted}) {
      ExperimentConfig c = base;
      c.cluster.eap_strategy = s;
      c.cluster.executor_strategy = s;
      cells.push_back({std::string("dequeue_") + to_string(s), c});
    }
  } else if (name == "load_balance") {
    for (double eps : {0.0, 1.0, 4.0}) {
      ExperimentConfig c = base;
      c.cmmac.epsilon = eps;
      char label[32];
      std::snprintf(label, sizeof(label), "epsilon_%g", eps);
      cells.push_back({label, c});
    }
  } else if (name == "hyper_sweep") {
    for (double slot : {100.0, 250.0, 500.0}) {
      for (int frame : {50, 100, 200}) {
        for (int H : {1, 2, 4}) {
          ExperimentConfig c = base;
          c.topology.slot_ms = slot;
          c.topology.slots_per_frame = frame;
          c.gpg.nodes_per_frame = std::min(H, static_cast<int>(c.topology.nodes.size()));
          char label[64];
          std::snprintf(label, sizeof(label), "slot_%g_frame_%d_H_%d", slot, frame, H);
          cells.push_back({label, c});
        }
      }
    }
  } else if (name == "baselines") {
    for (auto d : {DispatchKind::kCmmac, DispatchKind::kGreedy}) {
      for (auto o : {OrchestrateKind::kGpg, OrchestrateKind::kNativeThreshold}) {
        ExperimentConfig c = base;
        c.dispatch = d;
        c.orchestrate = o;
        cells.push_back({std::string(to_string(d)) + "_" + to_string(o), c});
      }
    }
  } else {
    throw ValidationError("unknown suite '" + name + "'");
  }
  return cells;
}

void run_suite(const std::string& name, const ExperimentConfig& base, const fs::path& out,
               const Progress& progress) {
  const auto cells = suite_cells(name, base);
  fs::create_directories(out);
  std::ofstream summary(out / "summary.csv");
  summary << "cell,mean_phi_f,phi_prime,cost_kb,image_mb\n";
  for (const auto& cell : cells) {
    const EvalResult r = run_training(cell.cfg, out / cell.name, progress);
    char buf[256];
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,%.17g\n", r.mean_phi_f, r.run.phi_prime(),
                  r.run.cost_kb, r.run.image_mb);
    summary << cell.name << buf;
  }
}

}  // namespace edgesched
