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

// Frame-scale orchestration: graph embeddings of nodes, eAP summaries and the
// cluster summary feed a node-selection head and a per-node scaling head.

#ifndef EDGESCHED_GPG_HPP_
#define EDGESCHED_GPG_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "edgesched/cluster.hpp"
#include "edgesched/cmmac.hpp"
#include "edgesched/nn.hpp"

namespace edgesched {

/// Per-node attributes, one row per node, 6 + 2W columns:
///   free cpu, free mem, free storage, latency to eAP, latency to cloud,
///   executor backlog, deployed indicator (W), replicate counts (W).
/// Free resources are the unreserved share of capacity.
Eigen::MatrixXd node_features(const ClusterState& env);
int node_feature_size(int service_count);

/// Zero-pads or truncates a feature row to d columns.
Eigen::VectorXd lift(const Eigen::VectorXd& feature, int d);

enum class Aggregation {
  kParallel,    // every neighbour contributes its lifted feature
  kSequential,  // ascending id; already embedded neighbours contribute x
};

struct GpgNetworks {
  // node level, eAP level, cluster level, then the two policy heads
  nn::Mlp<double> f1, h1, f2, h2, f3, h3, g, q;

  static GpgNetworks make(int service_count, int d_emb, int gnn_hidden, std::uint64_t seed);
  static constexpr std::size_t kCount = 8;
  std::array<nn::Mlp<double>*, kCount> all();
  std::array<const nn::Mlp<double>*, kCount> all() const;
  static std::array<const char*, kCount> names();
  int d_emb() const { return static_cast<int>(h1.output_size()); }
};

struct GpgGradients {
  std::array<nn::Gradients<double>, GpgNetworks::kCount> nets;
  static GpgGradients zeros_like(const GpgNetworks& n);
  double squared_norm() const;
};

struct Embeddings {
  Eigen::MatrixXd x;  // N x d
  Eigen::MatrixXd y;  // B x d
  Eigen::VectorXd z;  // d
};

/// Node membership: groups[b] lists eAP b's nodes.
using Grouping = std::vector<std::vector<int>>;
Grouping grouping_of(const ClusterState& env);

Eigen::MatrixXd embed_nodes(const GpgNetworks& nets, const Eigen::MatrixXd& features,
                            const Grouping& groups, Aggregation mode);
void embed_eaps_and_cluster(const GpgNetworks& nets, const Eigen::MatrixXd& x,
                            const Grouping& groups, Eigen::MatrixXd& y, Eigen::VectorXd& z);
Embeddings embed(const GpgNetworks& nets, const Eigen::MatrixXd& features, const Grouping& groups,
                 Aggregation mode);

/// Node-selection probabilities over all nodes.
Eigen::VectorXd selection_probabilities(const GpgNetworks& nets, const Embeddings& e,
                                        const Grouping& groups);
/// Distribution over the 2W+1 deltas -W..W for node h (index l + W).
Eigen::VectorXd scaling_probabilities(const GpgNetworks& nets, const Embeddings& e,
                                      const Grouping& groups, int node);

/// Training: H distinct nodes by repeated renormalized draws.
/// Evaluation: the H most probable nodes (ties to the lower id).
std::vector<int> select_nodes(const Eigen::VectorXd& sigma, int count, PolicyMode mode, Rng& rng);

/// exp(-total executor backlog).
double orchestration_reward(const ClusterState& env);
double orchestration_reward(int backlog);

/// One orchestration decision as the learner sees it.
struct GpgSample {
  Eigen::MatrixXd features;
  Grouping groups;
  std::vector<int> nodes;
  std::vector<int> delta_index;  // per node, index l + W
};

/// log pi of the joint action: sum of log sigma over the chosen nodes plus
/// the log probabilities of their deltas. With grads set, adds
/// d(weight * log pi)/d(params) into it.
double joint_log_prob(const GpgNetworks& nets, const GpgSample& sample, Aggregation mode,
                      GpgGradients* grads = nullptr, double weight = 1.0);

struct GpgConfig {
  int nodes_per_frame = 2;  // H
  int episode_frames = 20;  // T
  double lr = 1e-3;
  int d_emb = 32;
  int gnn_hidden = 64;
  Aggregation aggregation = Aggregation::kParallel;
  std::uint64_t seed = 1;
};

class GpgOrchestrator {
 public:
  GpgOrchestrator(int service_count, GpgConfig config);

  const GpgConfig& config() const { return config_; }
  GpgNetworks& networks() { return nets_; }
  const GpgNetworks& networks() const { return nets_; }
  int service_count() const { return service_count_; }

  /// Decides the frame's scaling. In training mode the sample is kept until
  /// its reward arrives.
  OrchestrationAction decide(const ClusterState& env, PolicyMode mode, Rng& rng, bool training);
  /// Reward of the oldest decision still waiting for one.
  void record_reward(double reward);
  bool awaiting_reward() const { return !episode_.empty() && rewards_.size() < episode_.size(); }
  int recorded_frames() const { return static_cast<int>(rewards_.size()); }

  /// Policy-gradient step over the stored frames with the running-mean
  /// baseline per frame position. Throws when any frame lacks its reward.
  /// Returns the gradient norm.
  double finish_episode();
  void discard_episode();

  /// Running mean of reward-to-go at each frame position.
  const std::vector<double>& baseline() const { return baseline_; }

  void save(const std::filesystem::path& dir) const;
  void load(const std::filesystem::path& dir);

 private:
  int service_count_;
  GpgConfig config_;
  GpgNetworks nets_;
  std::array<nn::AdamState<double>, GpgNetworks::kCount> opt_;
  std::vector<GpgSample> episode_;
  std::vector<double> rewards_;
  std::vector<double> baseline_;
  std::vector<std::int64_t> baseline_count_;
};

}  // namespace edgesched

#endif  // EDGESCHED_GPG_HPP_
