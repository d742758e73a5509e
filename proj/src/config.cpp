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

#include "edgesched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace edgesched {

using nlohmann::json;

const char* to_string(DispatchKind kind) {
  return kind == DispatchKind::kCmmac ? "cmmac" : "greedy";
}

const char* to_string(OrchestrateKind kind) {
  switch (kind) {
    case OrchestrateKind::kGpg: return "gpg";
    case OrchestrateKind::kNativeThreshold: return "native_threshold";
    case OrchestrateKind::kNone: return "none";
  }
  return "?";
}

const char* to_string(Aggregation mode) {
  return mode == Aggregation::kParallel ? "parallel" : "sequential";
}

namespace {

ServiceSpec service(double proc, double cpu, double mem, double image, double dmin, double dmax,
                    double req_cpu, double req_mem, double input_kb, double weight) {
  ServiceSpec s;
  s.nominal_proc_ms = proc;
  s.replicate_cpu = cpu;
  s.replicate_mem = mem;
  s.image_size_mb = image;
  s.deadline_min_ms = dmin;
  s.deadline_max_ms = dmax;
  s.request_cpu = req_cpu;
  s.request_mem = req_mem;
  s.input_size_kb = input_kb;
  s.weight = weight;
  return s;
}

// Reads one JSON object, remembering which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void num(const char* key, double& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      out = v->get<double>();
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void u64(const char* key, std::uint64_t& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                      v->get<std::int64_t>() < 0)) {
        throw ConfigError(at(key), "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void str(const char* key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void ints(const char* key, std::vector<int>& out) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) throw ConfigError(at(key), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number_integer()) {
          throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected an integer");
        }
        out.push_back((*v)[i].get<int>());
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key().c_str()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_link(Reader& r, const char* key, LinkSpec& link) {
  if (const json* v = r.raw(key)) {
    Reader l(*v, r.at(key));
    l.num("latency_ms", link.latency_ms);
    l.num("bandwidth_mbps", link.bandwidth_mbps);
    l.finish();
  }
}

template <typename Parse>
auto parse_enum(Reader& r, const char* key, Parse parse) {
  std::string name;
  r.str(key, name);
  try {
    return parse(name);
  } catch (const ValidationError& e) {
    throw ConfigError(r.at(key), e.what());
  }
}

DispatchKind parse_dispatch(const std::string& s) {
  if (s == "cmmac") return DispatchKind::kCmmac;
  if (s == "greedy") return DispatchKind::kGreedy;
  throw ValidationError("unknown dispatch policy '" + s + "'");
}

OrchestrateKind parse_orchestrate(const std::string& s) {
  if (s == "gpg") return OrchestrateKind::kGpg;
  if (s == "native_threshold") return OrchestrateKind::kNativeThreshold;
  if (s == "none") return OrchestrateKind::kNone;
  throw ValidationError("unknown orchestration policy '" + s + "'");
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "parallel") return Aggregation::kParallel;
  if (s == "sequential") return Aggregation::kSequential;
  throw ValidationError("unknown aggregation mode '" + s + "'");
}

void read_topology(const json& j, ExperimentConfig& cfg) {
  Reader r(j, "topology");
  auto& t = cfg.topology;
  r.integer("eaps", t.eap_count);
  if (const json* nodes = r.raw("nodes")) {
    if (!nodes->is_array()) throw ConfigError("topology.nodes", "expected an array");
    t.nodes.clear();
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      Reader n((*nodes)[i], "topology.nodes[" + std::to_string(i) + "]");
      NodeSpec spec;
      n.integer("eap", spec.eap_id);
      n.num("cpu", spec.cpu_capacity);
      n.num("mem", spec.mem_capacity);
      n.num("storage", spec.storage_capacity);
      n.num("speed", spec.speed_factor);
      n.finish();
      t.nodes.push_back(spec);
    }
  }
  if (const json* c = r.raw("cloud")) {
    Reader cr(*c, "topology.cloud");
    cr.integer("parallelism", t.cloud.parallelism);
    cr.num("speed_factor", t.cloud.speed_factor);
    cr.finish();
  }
  if (const json* n = r.raw("network")) {
    Reader nr(*n, "topology.network");
    read_link(nr, "device_edge", t.network.device_edge);
    read_link(nr, "intra_edge_lan", t.network.intra_edge_lan);
    read_link(nr, "edge_cloud_wan", t.network.edge_cloud_wan);
    nr.num("jitter_fraction", t.network.jitter_fraction);
    nr.finish();
  }
  r.num("slot_ms", t.slot_ms);
  r.integer("slots_per_frame", t.slots_per_frame);
  r.finish();
}

void read_services(const json& j, ExperimentConfig& cfg) {
  if (!j.is_array()) throw ConfigError("services", "expected an array");
  cfg.services.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    Reader s(j[i], "services[" + std::to_string(i) + "]");
    ServiceSpec spec;
    s.num("nominal_proc_ms", spec.nominal_proc_ms);
    s.num("replicate_cpu", spec.replicate_cpu);
    s.num("replicate_mem", spec.replicate_mem);
    s.num("image_size_mb", spec.image_size_mb);
    s.num("deadline_min_ms", spec.deadline_min_ms);
    s.num("deadline_max_ms", spec.deadline_max_ms);
    s.num("request_cpu", spec.request_cpu);
    s.num("request_mem", spec.request_mem);
    s.num("input_size_kb", spec.input_size_kb);
    s.num("weight", spec.weight);
    s.finish();
    cfg.services.push_back(spec);
  }
}

json link_json(const LinkSpec& l) {
  return json{{"latency_ms", l.latency_ms}, {"bandwidth_mbps", l.bandwidth_mbps}};
}

}  // namespace

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.topology.eap_count = 2;
  cfg.topology.nodes.clear();
  for (int b = 0; b < 2; ++b) {
    cfg.topology.nodes.push_back(NodeSpec{b, 4000, 8192, 300, 1.0});
    cfg.topology.nodes.push_back(NodeSpec{b, 2000, 4096, 200, 0.6});
    cfg.topology.nodes.push_back(NodeSpec{b, 2000, 4096, 200, 0.3});
  }
  cfg.topology.cloud = CloudSpec{1, 1.0};
  cfg.services = {
      service(150, 500, 512, 120, 400, 900, 400, 256, 50, 1.5),
      service(250, 500, 512, 200, 600, 1500, 450, 384, 100, 1.0),
      service(300, 500, 768, 300, 800, 2500, 500, 512, 200, 1.0),
      service(400, 500, 512, 250, 1500, 4000, 400, 256, 80, 1.0),
      service(200, 500, 512, 150, 500, 1200, 350, 256, 60, 1.0),
      service(600, 500, 1024, 400, 2000, 5000, 600, 768, 300, 0.5),
  };
  return cfg;
}

ExperimentConfig full_config() {
  ExperimentConfig cfg = desk_config();
  cfg.topology.eap_count = 5;
  cfg.topology.nodes.clear();
  const double speeds[8] = {1.0, 1.0, 0.8, 0.8, 0.6, 0.6, 0.4, 0.3};
  for (int b = 0; b < 5; ++b) {
    for (int k = 0; k < 8; ++k) {
      cfg.topology.nodes.push_back(NodeSpec{b, k < 2 ? 4000.0 : 2000.0, k < 2 ? 8192.0 : 4096.0,
                                            k < 2 ? 300.0 : 200.0, speeds[k]});
    }
  }
  cfg.topology.cloud = CloudSpec{60, 1.0};
  const auto base = cfg.services;
  cfg.services.clear();
  for (int w = 0; w < 30; ++w) cfg.services.push_back(base[static_cast<std::size_t>(w % 6)]);
  cfg.replicas_per_service = 1;
  cfg.workload.base_rate = 3.0;
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  const auto& t = cfg.topology;
  if (t.eap_count < 1) throw ConfigError("topology.eaps", "must be >= 1");
  if (t.nodes.empty()) throw ConfigError("topology.nodes", "must list at least one node");
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    const std::string p = "topology.nodes[" + std::to_string(i) + "]";
    if (n.eap_id < 0 || n.eap_id >= t.eap_count) throw ConfigError(p + ".eap", "unknown eAP");
    if (!(n.cpu_capacity > 0)) throw ConfigError(p + ".cpu", "must be > 0");
    if (!(n.mem_capacity > 0)) throw ConfigError(p + ".mem", "must be > 0");
    if (!(n.storage_capacity > 0)) throw ConfigError(p + ".storage", "must be > 0");
    if (!(n.speed_factor > 0)) throw ConfigError(p + ".speed", "must be > 0");
  }
  for (int b = 0; b < t.eap_count; ++b) {
    bool any = false;
    for (const auto& n : t.nodes) any = any || n.eap_id == b;
    if (!any) throw ConfigError("topology.nodes", "eAP " + std::to_string(b) + " has no nodes");
  }
  if (t.cloud.parallelism < 1) throw ConfigError("topology.cloud.parallelism", "must be >= 1");
  if (!(t.cloud.speed_factor > 0)) throw ConfigError("topology.cloud.speed_factor", "must be > 0");
  auto link = [](const LinkSpec& l, const std::string& p) {
    if (!(l.latency_ms >= 0)) throw ConfigError(p + ".latency_ms", "must be >= 0");
    if (!(l.bandwidth_mbps > 0)) throw ConfigError(p + ".bandwidth_mbps", "must be > 0");
  };
  link(t.network.device_edge, "topology.network.device_edge");
  link(t.network.intra_edge_lan, "topology.network.intra_edge_lan");
  link(t.network.edge_cloud_wan, "topology.network.edge_cloud_wan");
  if (!(t.slot_ms > 0)) throw ConfigError("topology.slot_ms", "must be > 0");
  if (t.slots_per_frame < 1) throw ConfigError("topology.slots_per_frame", "must be >= 1");

  if (cfg.services.empty()) throw ConfigError("services", "must list at least one service");
  try {
    ServiceCatalog check(cfg.services);
  } catch (const ValidationError& e) {
    throw ConfigError("services", e.what());
  }

  const auto& c = cfg.cluster;
  if (!(c.lambda_e > 0 && c.lambda_e < 1)) throw ConfigError("cluster.lambda_e", "must be in (0, 1)");
  if (!(c.priority.lambda_prime > 0 && c.priority.lambda_prime < 1)) {
    throw ConfigError("cluster.lambda_prime", "must be in (0, 1)");
  }
  if (!(c.priority.tie_epsilon_ms > 0)) throw ConfigError("cluster.tie_epsilon_ms", "must be > 0");
  if (!(c.priority.tie_priority > 0)) throw ConfigError("cluster.tie_priority", "must be > 0");
  if (c.executor_queue_cap < 1) throw ConfigError("cluster.executor_queue_cap", "must be >= 1");
  if (!(c.decision_delay_ms >= 0)) throw ConfigError("cluster.decision_delay_ms", "must be >= 0");
  if (cfg.replicas_per_service < 0) throw ConfigError("cluster.replicas_per_service", "must be >= 0");

  if (!(cfg.workload.base_rate > 0)) throw ConfigError("workload.base_rate", "must be > 0");
  if (cfg.workload.period_frames < 2) throw ConfigError("workload.period_frames", "must be >= 2");
  if (!(cfg.workload.amplitude >= 0 && cfg.workload.amplitude <= 1)) {
    throw ConfigError("workload.amplitude", "must be in [0, 1]");
  }
  if (cfg.workload.pattern == PatternKind::kFile && cfg.workload.trace.empty()) {
    throw ConfigError("workload.trace", "required when pattern is file");
  }

  if (!(cfg.cmmac.gamma > 0 && cfg.cmmac.gamma <= 1)) throw ConfigError("cmmac.gamma", "must be in (0, 1]");
  if (!(cfg.cmmac.epsilon >= 0)) throw ConfigError("cmmac.epsilon", "must be >= 0");
  if (!(cfg.cmmac.actor_lr > 0)) throw ConfigError("cmmac.actor_lr", "must be > 0");
  if (!(cfg.cmmac.critic_lr > 0)) throw ConfigError("cmmac.critic_lr", "must be > 0");
  if (cfg.cmmac.actor_sync_slots < 1) throw ConfigError("cmmac.actor_sync_slots", "must be >= 1");
  for (int h : cfg.cmmac.actor_hidden) if (h < 1) throw ConfigError("cmmac.actor_hidden", "widths must be >= 1");
  for (int h : cfg.cmmac.critic_hidden) if (h < 1) throw ConfigError("cmmac.critic_hidden", "widths must be >= 1");

  if (cfg.gpg.nodes_per_frame < 1 || cfg.gpg.nodes_per_frame > static_cast<int>(t.nodes.size())) {
    throw ConfigError("gpg.H", "must be in [1, node count]");
  }
  if (cfg.gpg.episode_frames < 1) throw ConfigError("gpg.T", "must be >= 1");
  if (!(cfg.gpg.lr > 0)) throw ConfigError("gpg.lr", "must be > 0");
  if (cfg.gpg.d_emb < 1) throw ConfigError("gpg.d_emb", "must be >= 1");
  if (cfg.gpg.gnn_hidden < 1) throw ConfigError("gpg.gnn_hidden", "must be >= 1");

  try {
    validate(cfg.native);
  } catch (const ValidationError& e) {
    throw ConfigError("native", e.what());
  }

  if (cfg.training.episodes < 0) throw ConfigError("training.episodes", "must be >= 0");
  if (cfg.training.episode_frames < 1) throw ConfigError("training.episode_frames", "must be >= 1");
  for (std::size_t i = 0; i < cfg.training.curriculum.size(); ++i) {
    const auto& s = cfg.training.curriculum[i];
    const std::string p = "training.curriculum[" + std::to_string(i) + "]";
    if (s.frames < 0) throw ConfigError(p + ".frames", "must be >= 0");
    if (!(s.rate_scale > 0)) throw ConfigError(p + ".rate_scale", "must be > 0");
  }
  if (cfg.eval.frames < 1) throw ConfigError("eval.frames", "must be >= 1");
  if (cfg.eval.drain_frames < 0) throw ConfigError("eval.drain_frames", "must be >= 0");
  if (cfg.eval.sequences < 1) throw ConfigError("eval.sequences", "must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  Reader r(root, "");
  std::string preset = "desk";
  r.str("preset", preset);
  ExperimentConfig cfg;
  if (preset == "desk") {
    cfg = desk_config();
  } else if (preset == "full") {
    cfg = full_config();
  } else {
    throw ConfigError("preset", "unknown preset '" + preset + "'");
  }

  r.u64("seed", cfg.seed);
  if (const json* t = r.raw("topology")) read_topology(*t, cfg);
  if (const json* s = r.raw("services")) read_services(*s, cfg);

  if (const json* c = r.raw("cluster")) {
    Reader cr(*c, "cluster");
    cfg.cluster.eap_strategy = parse_enum(cr, "eap_dequeue", [&](const std::string& s) {
      return s.empty() ? cfg.cluster.eap_strategy : parse_dequeue_strategy(s);
    });
    cfg.cluster.executor_strategy = parse_enum(cr, "executor_dequeue", [&](const std::string& s) {
      return s.empty() ? cfg.cluster.executor_strategy : parse_dequeue_strategy(s);
    });
    cr.num("lambda_e", cfg.cluster.lambda_e);
    cr.num("lambda_prime", cfg.cluster.priority.lambda_prime);
    cr.num("tie_epsilon_ms", cfg.cluster.priority.tie_epsilon_ms);
    cr.num("tie_priority", cfg.cluster.priority.tie_priority);
    cr.integer("executor_queue_cap", cfg.cluster.executor_queue_cap);
    cr.num("decision_delay_ms", cfg.cluster.decision_delay_ms);
    cr.integer("replicas_per_service", cfg.replicas_per_service);
    if (const json* s = cr.raw("scales")) {
      Reader sr(*s, "cluster.scales");
      sr.num("queue_norm", cfg.cluster.scales.queue_norm);
      sr.num("deadline_norm_ms", cfg.cluster.scales.deadline_norm_ms);
      sr.num("latency_norm_ms", cfg.cluster.scales.latency_norm_ms);
      sr.num("replicate_norm", cfg.cluster.scales.replicate_norm);
      sr.finish();
    }
    cr.finish();
  }

  if (const json* w = r.raw("workload")) {
    Reader wr(*w, "workload");
    cfg.workload.pattern = parse_enum(wr, "pattern", [&](const std::string& s) {
      return s.empty() ? cfg.workload.pattern : parse_pattern_kind(s);
    });
    wr.num("base_rate", cfg.workload.base_rate);
    wr.integer("period_frames", cfg.workload.period_frames);
    wr.num("amplitude", cfg.workload.amplitude);
    wr.str("trace", cfg.workload.trace);
    wr.finish();
  }

  if (const json* p = r.raw("policy")) {
    Reader pr(*p, "policy");
    cfg.dispatch = parse_enum(pr, "dispatch", [&](const std::string& s) {
      return s.empty() ? cfg.dispatch : parse_dispatch(s);
    });
    cfg.orchestrate = parse_enum(pr, "orchestrate", [&](const std::string& s) {
      return s.empty() ? cfg.orchestrate : parse_orchestrate(s);
    });
    pr.finish();
  }

  if (const json* c = r.raw("cmmac")) {
    Reader cr(*c, "cmmac");
    cr.num("gamma", cfg.cmmac.gamma);
    cr.num("epsilon", cfg.cmmac.epsilon);
    cr.num("actor_lr", cfg.cmmac.actor_lr);
    cr.num("critic_lr", cfg.cmmac.critic_lr);
    cr.integer("actor_sync_slots", cfg.cmmac.actor_sync_slots);
    cr.ints("actor_hidden", cfg.cmmac.actor_hidden);
    cr.ints("critic_hidden", cfg.cmmac.critic_hidden);
    cr.finish();
  }

  if (const json* g = r.raw("gpg")) {
    Reader gr(*g, "gpg");
    gr.integer("H", cfg.gpg.nodes_per_frame);
    gr.integer("T", cfg.gpg.episode_frames);
    gr.num("lr", cfg.gpg.lr);
    gr.integer("d_emb", cfg.gpg.d_emb);
    gr.integer("gnn_hidden", cfg.gpg.gnn_hidden);
    cfg.gpg.aggregation = parse_enum(gr, "aggregation", [&](const std::string& s) {
      return s.empty() ? cfg.gpg.aggregation : parse_aggregation(s);
    });
    gr.finish();
  }

  if (const json* n = r.raw("native")) {
    Reader nr(*n, "native");
    nr.num("target_utilization", cfg.native.target_utilization);
    nr.num("scale_up_threshold", cfg.native.scale_up_threshold);
    nr.num("scale_down_threshold", cfg.native.scale_down_threshold);
    nr.integer("min_replicas", cfg.native.min_replicas);
    nr.finish();
  }

  if (const json* t = r.raw("training")) {
    Reader tr(*t, "training");
    tr.integer("episodes", cfg.training.episodes);
    tr.integer("episode_frames", cfg.training.episode_frames);
    if (const json* c = tr.raw("curriculum")) {
      if (!c->is_array()) throw ConfigError("training.curriculum", "expected an array");
      cfg.training.curriculum.clear();
      for (std::size_t i = 0; i < c->size(); ++i) {
        Reader sr((*c)[i], "training.curriculum[" + std::to_string(i) + "]");
        CurriculumStage stage;
        sr.integer("frames", stage.frames);
        sr.num("rate_scale", stage.rate_scale);
        sr.finish();
        cfg.training.curriculum.push_back(stage);
      }
    }
    tr.finish();
  }

  if (const json* e = r.raw("eval")) {
    Reader er(*e, "eval");
    er.integer("frames", cfg.eval.frames);
    er.integer("drain_frames", cfg.eval.drain_frames);
    er.integer("sequences", cfg.eval.sequences);
    er.finish();
  }

  r.finish();
  cfg.cmmac.seed = cfg.seed;
  cfg.gpg.seed = cfg.seed;
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const ExperimentConfig& cfg) {
  json nodes = json::array();
  for (const auto& n : cfg.topology.nodes) {
    nodes.push_back({{"eap", n.eap_id},
                     {"cpu", n.cpu_capacity},
                     {"mem", n.mem_capacity},
                     {"storage", n.storage_capacity},
                     {"speed", n.speed_factor}});
  }
  json services = json::array();
  for (const auto& s : cfg.services) {
    services.push_back({{"nominal_proc_ms", s.nominal_proc_ms},
                        {"replicate_cpu", s.replicate_cpu},
                        {"replicate_mem", s.replicate_mem},
                        {"image_size_mb", s.image_size_mb},
                        {"deadline_min_ms", s.deadline_min_ms},
                        {"deadline_max_ms", s.deadline_max_ms},
                        {"request_cpu", s.request_cpu},
                        {"request_mem", s.request_mem},
                        {"input_size_kb", s.input_size_kb},
                        {"weight", s.weight}});
  }
  json curriculum = json::array();
  for (const auto& s : cfg.training.curriculum) {
    curriculum.push_back({{"frames", s.frames}, {"rate_scale", s.rate_scale}});
  }
  const auto& t = cfg.topology;
  json root = {
      {"seed", cfg.seed},
      {"topology",
       {{"eaps", t.eap_count},
        {"nodes", nodes},
        {"cloud", {{"parallelism", t.cloud.parallelism}, {"speed_factor", t.cloud.speed_factor}}},
        {"network",
         {{"device_edge", link_json(t.network.device_edge)},
          {"intra_edge_lan", link_json(t.network.intra_edge_lan)},
          {"edge_cloud_wan", link_json(t.network.edge_cloud_wan)},
          {"jitter_fraction", t.network.jitter_fraction}}},
        {"slot_ms", t.slot_ms},
        {"slots_per_frame", t.slots_per_frame}}},
      {"services", services},
      {"cluster",
       {{"eap_dequeue", to_string(cfg.cluster.eap_strategy)},
        {"executor_dequeue", to_string(cfg.cluster.executor_strategy)},
        {"lambda_e", cfg.cluster.lambda_e},
        {"lambda_prime", cfg.cluster.priority.lambda_prime},
        {"tie_epsilon_ms", cfg.cluster.priority.tie_epsilon_ms},
        {"tie_priority", cfg.cluster.priority.tie_priority},
        {"executor_queue_cap", cfg.cluster.executor_queue_cap},
        {"decision_delay_ms", cfg.cluster.decision_delay_ms},
        {"replicas_per_service", cfg.replicas_per_service},
        {"scales",
         {{"queue_norm", cfg.cluster.scales.queue_norm},
          {"deadline_norm_ms", cfg.cluster.scales.deadline_norm_ms},
          {"latency_norm_ms", cfg.cluster.scales.latency_norm_ms},
          {"replicate_norm", cfg.cluster.scales.replicate_norm}}}}},
      {"workload",
       {{"pattern", to_string(cfg.workload.pattern)},
        {"base_rate", cfg.workload.base_rate},
        {"period_frames", cfg.workload.period_frames},
        {"amplitude", cfg.workload.amplitude},
        {"trace", cfg.workload.trace}}},
      {"policy", {{"dispatch", to_string(cfg.dispatch)}, {"orchestrate", to_string(cfg.orchestrate)}}},
      {"cmmac",
       {{"gamma", cfg.cmmac.gamma},
        {"epsilon", cfg.cmmac.epsilon},
        {"actor_lr", cfg.cmmac.actor_lr},
        {"critic_lr", cfg.cmmac.critic_lr},
        {"actor_sync_slots", cfg.cmmac.actor_sync_slots},
        {"actor_hidden", cfg.cmmac.actor_hidden},
        {"critic_hidden", cfg.cmmac.critic_hidden}}},
      {"gpg",
       {{"H", cfg.gpg.nodes_per_frame},
        {"T", cfg.gpg.episode_frames},
        {"lr", cfg.gpg.lr},
        {"d_emb", cfg.gpg.d_emb},
        {"gnn_hidden", cfg.gpg.gnn_hidden},
        {"aggregation", to_string(cfg.gpg.aggregation)}}},
      {"native",
       {{"target_utilization", cfg.native.target_utilization},
        {"scale_up_threshold", cfg.native.scale_up_threshold},
        {"scale_down_threshold", cfg.native.scale_down_threshold},
        {"min_replicas", cfg.native.min_replicas}}},
      {"training",
       {{"episodes", cfg.training.episodes},
        {"episode_frames", cfg.training.episode_frames},
        {"curriculum", curriculum}}},
      {"eval",
       {{"frames", cfg.eval.frames},
        {"drain_frames", cfg.eval.drain_frames},
        {"sequences", cfg.eval.sequences}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace edgesched
