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

#include "edgesched/gpg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgesched {

namespace {

using nn::Activation;
using Cache = nn::ForwardCache<double>;

nn::Mlp<double> gnn_net(int in, int hidden, int out, std::uint64_t seed) {
  return nn::Mlp<double>({in, hidden, out}, {Activation::kRelu, Activation::kLinear}, seed);
}

nn::Mlp<double> head_net(int in, int out, std::uint64_t seed) {
  return nn::Mlp<double>({in, 128, 64, 32, out},
                         {Activation::kRelu, Activation::kRelu, Activation::kRelu,
                          Activation::kLinear},
                         seed);
}

std::vector<int> owner_of(const Grouping& groups, int node_count) {
  std::vector<int> owner(static_cast<std::size_t>(node_count), -1);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    for (int n : groups[b]) {
      require(n >= 0 && n < node_count, "grouping names an unknown node");
      require(owner[static_cast<std::size_t>(n)] == -1, "node belongs to two eAPs");
      owner[static_cast<std::size_t>(n)] = static_cast<int>(b);
    }
  }
  for (int o : owner) require(o >= 0, "node without an eAP");
  return owner;
}

// Every intermediate of one pass, kept for the backward sweep.
struct Pass {
  Grouping groups;  // each group sorted ascending
  std::vector<int> owner;
  Eigen::MatrixXd x0;
  std::vector<Cache> f1_boot, f1_final;
  std::vector<Eigen::VectorXd> f1_boot_out, f1_final_out;
  std::vector<bool> final_used;
  std::vector<Cache> h1;
  std::vector<Cache> f2;
  std::vector<Cache> h2;
  std::vector<Cache> f3;
  Cache h3;
  Embeddings emb;
};

Pass run_forward(const GpgNetworks& nets, const Eigen::MatrixXd& features, const Grouping& groups,
                 Aggregation mode) {
  const int N = static_cast<int>(features.rows());
  const int d = nets.d_emb();
  require(N >= 1, "no nodes to embed");
  Pass p;
  p.groups = groups;
  for (auto& g : p.groups) std::sort(g.begin(), g.end());
  p.owner = owner_of(p.groups, N);
  const auto B = p.groups.size();

  p.x0.resize(N, d);
  for (int n = 0; n < N; ++n) p.x0.row(n) = lift(features.row(n).transpose(), d).transpose();

  p.f1_boot.resize(static_cast<std::size_t>(N));
  p.f1_final.resize(static_cast<std::size_t>(N));
  p.f1_boot_out.resize(static_cast<std::size_t>(N));
  p.f1_final_out.resize(static_cast<std::size_t>(N));
  p.final_used.assign(static_cast<std::size_t>(N), false);
  p.h1.resize(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const auto k = static_cast<std::size_t>(n);
    p.f1_boot_out[k] = nn::forward(nets.f1, Eigen::VectorXd(p.x0.row(n).transpose()), p.f1_boot[k]);
  }

  p.emb.x.resize(N, d);
  for (const auto& group : p.groups) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      const int n = group[i];
      Eigen::VectorXd agg = Eigen::VectorXd::Zero(d);
      for (std::size_t j = 0; j < group.size(); ++j) {
        if (j == i) continue;
        const auto m = static_cast<std::size_t>(group[j]);
        if (mode == Aggregation::kSequential && j < i) {
          agg += p.f1_final_out[m];
        } else {
          agg += p.f1_boot_out[m];
        }
      }
      const auto k = static_cast<std::size_t>(n);
      p.emb.x.row(n) = (nn::forward(nets.h1, agg, p.h1[k]) + p.x0.row(n).transpose()).transpose();
      if (mode == Aggregation::kSequential && i + 1 < group.size()) {
        p.final_used[k] = true;
        p.f1_final_out[k] =
            nn::forward(nets.f1, Eigen::VectorXd(p.emb.x.row(n).transpose()), p.f1_final[k]);
      }
    }
  }

  p.f2.resize(static_cast<std::size_t>(N));
  p.h2.resize(B);
  p.f3.resize(B);
  p.emb.y.resize(static_cast<Eigen::Index>(B), d);
  Eigen::VectorXd s3 = Eigen::VectorXd::Zero(d);
  for (std::size_t b = 0; b < B; ++b) {
    Eigen::VectorXd s2 = Eigen::VectorXd::Zero(d);
    for (int n : p.groups[b]) {
      s2 += nn::forward(nets.f2, Eigen::VectorXd(p.emb.x.row(n).transpose()),
                        p.f2[static_cast<std::size_t>(n)]);
    }
    p.emb.y.row(static_cast<Eigen::Index>(b)) = nn::forward(nets.h2, s2, p.h2[b]).transpose();
    s3 += nn::forward(nets.f3, Eigen::VectorXd(p.emb.y.row(static_cast<Eigen::Index>(b)).transpose()),
                      p.f3[b]);
  }
  p.emb.z = nn::forward(nets.h3, s3, p.h3);
  return p;
}

Eigen::VectorXd head_input(const Embeddings& e, int node, int eap) {
  const auto d = e.z.size();
  Eigen::VectorXd in(3 * d);
  in << e.x.row(node).transpose(), e.y.row(eap).transpose(), e.z;
  return in;
}

// Propagates embedding gradients back through the three GNN levels.
void run_backward(const GpgNetworks& nets, const Pass& p, Eigen::MatrixXd dx, Eigen::MatrixXd dy,
                  Eigen::VectorXd dz, GpgGradients& grads, Aggregation mode) {
  const int N = static_cast<int>(p.emb.x.rows());
  const int d = nets.d_emb();
  auto& g = grads.nets;

  const Eigen::VectorXd ds3 = nn::backward(nets.h3, p.h3, dz, g[5]);
  for (std::size_t b = 0; b < p.groups.size(); ++b) {
    dy.row(static_cast<Eigen::Index>(b)) += nn::backward(nets.f3, p.f3[b], ds3, g[4]).transpose();
  }
  for (std::size_t b = 0; b < p.groups.size(); ++b) {
    const Eigen::VectorXd ds2 =
        nn::backward(nets.h2, p.h2[b], Eigen::VectorXd(dy.row(static_cast<Eigen::Index>(b)).transpose()), g[3]);
    for (int n : p.groups[b]) {
      dx.row(n) += nn::backward(nets.f2, p.f2[static_cast<std::size_t>(n)], ds2, g[2]).transpose();
    }
  }

  // Reverse traversal so that every consumer of f1(x_n) is seen before n.
  std::vector<Eigen::VectorXd> d_boot(static_cast<std::size_t>(N), Eigen::VectorXd::Zero(d));
  std::vector<Eigen::VectorXd> d_final(static_cast<std::size_t>(N), Eigen::VectorXd::Zero(d));
  for (const auto& group : p.groups) {
    for (std::size_t i = group.size(); i-- > 0;) {
      const int n = group[i];
      const auto k = static_cast<std::size_t>(n);
      Eigen::VectorXd dxn = dx.row(n).transpose();
      if (p.final_used[k]) dxn += nn::backward(nets.f1, p.f1_final[k], d_final[k], g[0]);
      const Eigen::VectorXd dagg = nn::backward(nets.h1, p.h1[k], dxn, g[1]);
      for (std::size_t j = 0; j < group.size(); ++j) {
        if (j == i) continue;
        const auto m = static_cast<std::size_t>(group[j]);
        if (mode == Aggregation::kSequential && j < i) {
          d_final[m] += dagg;
        } else {
          d_boot[m] += dagg;
        }
      }
    }
  }
  for (int n = 0; n < N; ++n) {
    const auto k = static_cast<std::size_t>(n);
    if (d_boot[k].squaredNorm() > 0) nn::backward(nets.f1, p.f1_boot[k], d_boot[k], g[0]);
  }
}

}  // namespace

int node_feature_size(int service_count) { return 6 + 2 * service_count; }

Eigen::MatrixXd node_features(const ClusterState& env) {
  const int W = env.service_count();
  const auto& sc = env.options().scales;
  const auto& net = env.topology().network;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(env.node_count(), node_feature_size(W));
  for (int n = 0; n < env.node_count(); ++n) {
    const auto& node = env.nodes()[static_cast<std::size_t>(n)];
    f(n, 0) = std::clamp(1.0 - node.reserved_cpu(env.catalog()) / node.cpu_capacity, 0.0, 1.0);
    f(n, 1) = std::clamp(1.0 - node.reserved_mem(env.catalog()) / node.mem_capacity, 0.0, 1.0);
    f(n, 2) = 1.0;  // no storage consumption is modelled
    f(n, 3) = std::clamp(net.intra_edge_lan.latency_ms / sc.latency_norm_ms, 0.0, 1.0);
    f(n, 4) = std::clamp(net.edge_cloud_wan.latency_ms / sc.latency_norm_ms, 0.0, 1.0);
    f(n, 5) = std::clamp(static_cast<double>(node.executor_queue.size()) / sc.queue_norm, 0.0, 1.0);
    for (int w = 1; w <= W; ++w) {
      const int count = node.deployed(w);
      f(n, 5 + w) = count > 0 ? 1.0 : 0.0;
      f(n, 5 + W + w) = std::clamp(count / sc.replicate_norm, 0.0, 1.0);
    }
  }
  return f;
}

Eigen::VectorXd lift(const Eigen::VectorXd& feature, int d) {
  require(d >= 1, "lift width must be >= 1");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  const auto k = std::min<Eigen::Index>(d, feature.size());
  out.head(k) = feature.head(k);
  return out;
}

GpgNetworks GpgNetworks::make(int service_count, int d_emb, int gnn_hidden, std::uint64_t seed) {
  require(service_count >= 1 && d_emb >= 1 && gnn_hidden >= 1, "bad GPG network sizes");
  GpgNetworks n;
  n.f1 = gnn_net(d_emb, gnn_hidden, d_emb, seed * 16 + 1);
  n.h1 = gnn_net(d_emb, gnn_hidden, d_emb, seed * 16 + 2);
  n.f2 = gnn_net(d_emb, gnn_hidden, d_emb, seed * 16 + 3);
  n.h2 = gnn_net(d_emb, gnn_hidden, d_emb, seed * 16 + 4);
  n.f3 = gnn_net(d_emb, gnn_hidden, d_emb, seed * 16 + 5);
  n.h3 = gnn_net(d_emb, gnn_hidden, d_emb, seed * 16 + 6);
  n.g = head_net(3 * d_emb, 1, seed * 16 + 7);
  n.q = head_net(3 * d_emb, 2 * service_count + 1, seed * 16 + 8);
  // Both policies start uniform.
  n.g.layers().back().weights.setZero();
  n.q.layers().back().weights.setZero();
  return n;
}

std::array<nn::Mlp<double>*, GpgNetworks::kCount> GpgNetworks::all() {
  return {&f1, &h1, &f2, &h2, &f3, &h3, &g, &q};
}

std::array<const nn::Mlp<double>*, GpgNetworks::kCount> GpgNetworks::all() const {
  return {&f1, &h1, &f2, &h2, &f3, &h3, &g, &q};
}

std::array<const char*, GpgNetworks::kCount> GpgNetworks::names() {
  return {"gnn_f1", "gnn_h1", "gnn_f2", "gnn_h2", "gnn_f3", "gnn_h3", "policy_g", "policy_q"};
}

GpgGradients GpgGradients::zeros_like(const GpgNetworks& n) {
  GpgGradients g;
  const auto nets = n.all();
  for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) {
    g.nets[i] = nn::Gradients<double>::zeros_like(*nets[i]);
  }
  return g;
}

double GpgGradients::squared_norm() const {
  double total = 0;
  for (const auto& g : nets) total += g.squared_norm();
  return total;
}

Grouping grouping_of(const ClusterState& env) {
  Grouping groups;
  for (const auto& e : env.eaps()) groups.push_back(e.attached_nodes);
  return groups;
}

Eigen::MatrixXd embed_nodes(const GpgNetworks& nets, const Eigen::MatrixXd& features,
                            const Grouping& groups, Aggregation mode) {
  return run_forward(nets, features, groups, mode).emb.x;
}

void embed_eaps_and_cluster(const GpgNetworks& nets, const Eigen::MatrixXd& x,
                            const Grouping& groups, Eigen::MatrixXd& y, Eigen::VectorXd& z) {
  const int d = nets.d_emb();
  require(x.cols() == d, "embedding width mismatch");
  owner_of(groups, static_cast<int>(x.rows()));
  y.resize(static_cast<Eigen::Index>(groups.size()), d);
  Eigen::VectorXd s3 = Eigen::VectorXd::Zero(d);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    std::vector<int> members = groups[b];
    std::sort(members.begin(), members.end());
    Eigen::VectorXd s2 = Eigen::VectorXd::Zero(d);
    for (int n : members) s2 += nn::forward(nets.f2, Eigen::VectorXd(x.row(n).transpose()));
    y.row(static_cast<Eigen::Index>(b)) = nn::forward(nets.h2, s2).transpose();
    s3 += nn::forward(nets.f3, Eigen::VectorXd(y.row(static_cast<Eigen::Index>(b)).transpose()));
  }
  z = nn::forward(nets.h3, s3);
}

Embeddings embed(const GpgNetworks& nets, const Eigen::MatrixXd& features, const Grouping& groups,
                 Aggregation mode) {
  return run_forward(nets, features, groups, mode).emb;
}

Eigen::VectorXd selection_probabilities(const GpgNetworks& nets, const Embeddings& e,
                                        const Grouping& groups) {
  const int N = static_cast<int>(e.x.rows());
  const auto owner = owner_of(groups, N);
  Eigen::VectorXd logits(N);
  for (int n = 0; n < N; ++n) {
    logits[n] = nn::forward(nets.g, head_input(e, n, owner[static_cast<std::size_t>(n)]))[0];
  }
  return nn::softmax<double>(logits);
}

Eigen::VectorXd scaling_probabilities(const GpgNetworks& nets, const Embeddings& e,
                                      const Grouping& groups, int node) {
  const int N = static_cast<int>(e.x.rows());
  require(node >= 0 && node < N, "unknown node");
  const auto owner = owner_of(groups, N);
  return nn::softmax<double>(
      nn::forward(nets.q, head_input(e, node, owner[static_cast<std::size_t>(node)])));
}

std::vector<int> select_nodes(const Eigen::VectorXd& sigma, int count, PolicyMode mode, Rng& rng) {
  const int N = static_cast<int>(sigma.size());
  if (count > N) throw ContractError("cannot select more nodes than exist");
  require(count >= 0, "selection count must be >= 0");
  std::vector<int> chosen;
  if (mode == PolicyMode::kGreedy) {
    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });
    chosen.assign(order.begin(), order.begin() + count);
    return chosen;
  }
  std::vector<bool> taken(static_cast<std::size_t>(N), false);
  for (int k = 0; k < count; ++k) {
    double remaining = 0;
    for (int n = 0; n < N; ++n) {
      if (!taken[static_cast<std::size_t>(n)]) remaining += sigma[n];
    }
    const double u = uniform01(rng) * remaining;
    double cumulative = 0;
    int pick = -1;
    for (int n = 0; n < N; ++n) {
      if (taken[static_cast<std::size_t>(n)]) continue;
      pick = n;
      cumulative += sigma[n];
      if (u < cumulative) break;
    }
    taken[static_cast<std::size_t>(pick)] = true;
    chosen.push_back(pick);
  }
  return chosen;
}

double orchestration_reward(int backlog) {
  require(backlog >= 0, "backlog must be >= 0");
  return std::exp(-static_cast<double>(backlog));
}

double orchestration_reward(const ClusterState& env) { return orchestration_reward(env.node_backlog()); }

double joint_log_prob(const GpgNetworks& nets, const GpgSample& sample, Aggregation mode,
                      GpgGradients* grads, double weight) {
  require(sample.nodes.size() == sample.delta_index.size(), "one delta per selected node");
  const Pass p = run_forward(nets, sample.features, sample.groups, mode);
  const int N = static_cast<int>(p.emb.x.rows());
  const int d = nets.d_emb();

  std::vector<Cache> g_cache(static_cast<std::size_t>(N));
  Eigen::VectorXd logits(N);
  for (int n = 0; n < N; ++n) {
    logits[n] = nn::forward(nets.g, head_input(p.emb, n, p.owner[static_cast<std::size_t>(n)]),
                            g_cache[static_cast<std::size_t>(n)])[0];
  }
  const Eigen::VectorXd sigma = nn::softmax<double>(logits);

  double logp = 0;
  Eigen::VectorXd dlogits = Eigen::VectorXd::Zero(N);
  std::vector<Cache> q_cache(sample.nodes.size());
  std::vector<Eigen::VectorXd> dq(sample.nodes.size());
  for (std::size_t k = 0; k < sample.nodes.size(); ++k) {
    const int h = sample.nodes[k];
    require(h >= 0 && h < N, "selected node out of range");
    logp += std::log(sigma[h]);
    dlogits -= sigma;
    dlogits[h] += 1.0;
    const Eigen::VectorXd ql =
        nn::forward(nets.q, head_input(p.emb, h, p.owner[static_cast<std::size_t>(h)]), q_cache[k]);
    const Eigen::VectorXd qp = nn::softmax<double>(ql);
    const int l = sample.delta_index[k];
    require(l >= 0 && l < qp.size(), "delta index out of range");
    logp += std::log(qp[l]);
    dq[k] = -qp;
    dq[k][l] += 1.0;
  }
  if (!grads) return logp;

  const auto B = static_cast<Eigen::Index>(p.groups.size());
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(N, d);
  Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(B, d);
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(d);
  auto scatter = [&](int node, const Eigen::VectorXd& din) {
    dx.row(node) += din.segment(0, d).transpose();
    dy.row(p.owner[static_cast<std::size_t>(node)]) += din.segment(d, d).transpose();
    dz += din.segment(2 * d, d);
  };
  for (int n = 0; n < N; ++n) {
    if (dlogits[n] == 0) continue;
    Eigen::VectorXd go(1);
    go[0] = weight * dlogits[n];
    scatter(n, nn::backward(nets.g, g_cache[static_cast<std::size_t>(n)], go, grads->nets[6]));
  }
  for (std::size_t k = 0; k < sample.nodes.size(); ++k) {
    scatter(sample.nodes[k],
            nn::backward(nets.q, q_cache[k], Eigen::VectorXd(weight * dq[k]), grads->nets[7]));
  }
  run_backward(nets, p, std::move(dx), std::move(dy), std::move(dz), *grads, mode);
  return logp;
}

// ---------------------------------------------------------------------------

GpgOrchestrator::GpgOrchestrator(int service_count, GpgConfig config)
    : service_count_(service_count), config_(config) {
  require(config_.nodes_per_frame >= 1, "H must be >= 1");
  require(config_.episode_frames >= 1, "episode length must be >= 1");
  nets_ = GpgNetworks::make(service_count, config_.d_emb, config_.gnn_hidden, config_.seed);
  const auto nets = nets_.all();
  for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) {
    opt_[i] = nn::AdamState<double>(*nets[i], config_.lr);
  }
}

OrchestrationAction GpgOrchestrator::decide(const ClusterState& env, PolicyMode mode, Rng& rng,
                                            bool training) {
  require(env.service_count() == service_count_, "environment does not match the orchestrator");
  GpgSample s;
  s.features = node_features(env);
  s.groups = grouping_of(env);
  const Embeddings e = embed(nets_, s.features, s.groups, config_.aggregation);
  const Eigen::VectorXd sigma = selection_probabilities(nets_, e, s.groups);
  const int H = std::min(config_.nodes_per_frame, env.node_count());
  s.nodes = select_nodes(sigma, H, mode, rng);

  OrchestrationAction action;
  for (int h : s.nodes) {
    const Eigen::VectorXd q = scaling_probabilities(nets_, e, s.groups, h);
    int l = 0;
    if (mode == PolicyMode::kGreedy) {
      Eigen::Index best = 0;
      q.maxCoeff(&best);
      l = static_cast<int>(best);
    } else {
      const double u = uniform01(rng);
      double cumulative = 0;
      l = static_cast<int>(q.size()) - 1;
      for (Eigen::Index j = 0; j < q.size(); ++j) {
        cumulative += q[j];
        if (u < cumulative) {
          l = static_cast<int>(j);
          break;
        }
      }
    }
    s.delta_index.push_back(l);
    action.steps.push_back(NodeScaling{h, l - service_count_});
  }
  if (training) episode_.push_back(std::move(s));
  return action;
}

void GpgOrchestrator::record_reward(double reward) {
  require(awaiting_reward(), "no orchestration decision is waiting for a reward");
  rewards_.push_back(reward);
}

double GpgOrchestrator::finish_episode() {
  if (episode_.empty() || rewards_.size() != episode_.size()) {
    throw ContractError("orchestration episode is incomplete");
  }
  const std::size_t T = episode_.size();
  std::vector<double> to_go(T);
  double running = 0;
  for (std::size_t t = T; t-- > 0;) {
    running += rewards_[t];
    to_go[t] = running;
  }
  if (baseline_.size() < T) {
    baseline_.resize(T, 0.0);
    baseline_count_.resize(T, 0);
  }
  auto grads = GpgGradients::zeros_like(nets_);
  for (std::size_t t = 0; t < T; ++t) {
    const double advantage = to_go[t] - baseline_[t];
    // adam_step descends, so accumulate the gradient of -advantage * log pi.
    if (advantage != 0) joint_log_prob(nets_, episode_[t], config_.aggregation, &grads, -advantage);
  }
  for (std::size_t t = 0; t < T; ++t) {
    ++baseline_count_[t];
    baseline_[t] += (to_go[t] - baseline_[t]) / static_cast<double>(baseline_count_[t]);
  }
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > 0) {
    const auto nets = nets_.all();
    for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) {
      nn::adam_step(opt_[i], *nets[i], grads.nets[i]);
    }
  }
  discard_episode();
  return norm;
}

void GpgOrchestrator::discard_episode() {
  episode_.clear();
  rewards_.clear();
}

void GpgOrchestrator::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto nets = nets_.all();
  const auto names = GpgNetworks::names();
  for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) {
    nn::save_mlp((dir / (std::string(names[i]) + ".bin")).string(), *nets[i]);
  }
}

void GpgOrchestrator::load(const std::filesystem::path& dir) {
  auto nets = nets_.all();
  const auto names = GpgNetworks::names();
  std::array<nn::Mlp<double>, GpgNetworks::kCount> loaded;
  for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) {
    loaded[i] = nn::load_mlp((dir / (std::string(names[i]) + ".bin")).string());
    if (loaded[i].layer_sizes() != nets[i]->layer_sizes()) {
      throw ValidationError(std::string(names[i]) + " checkpoint shape does not match this topology");
    }
  }
  for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) {
    *nets[i] = std::move(loaded[i]);
    opt_[i] = nn::AdamState<double>(*nets[i], config_.lr);
  }
}

}  // namespace edgesched
