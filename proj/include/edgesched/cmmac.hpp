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

// Slot-scale dispatch: per-eAP actors sharing one parameter set, a centralized
// critic with a frozen target copy, and masked action distributions.

#ifndef EDGESCHED_CMMAC_HPP_
#define EDGESCHED_CMMAC_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "edgesched/cluster.hpp"
#include "edgesched/common.hpp"
#include "edgesched/nn.hpp"

namespace edgesched {

enum class PolicyMode { kSample, kGreedy };

struct DispatchReward {
  double lambda_violation = 0;  // violations / (violations + on time)
  double xi = 0;                // load std
  double nu = 0.5;              // sigmoid(xi)
  double epsilon_weight = 1;
  double value = 1;             // exp(-lambda - epsilon * nu)
};

DispatchReward compute_reward(int violations, int on_time, std::span<const double> cpu_util,
                              std::span<const double> mem_util, double epsilon);
DispatchReward compute_reward(const SlotOutcome& outcome, double epsilon);

/// Validity vector over {cloud, node 0, ..., node N-1} for eAP b's head
/// request. The cloud entry is always 1. With an empty queue only the cloud
/// is marked.
Eigen::VectorXd build_context(const ClusterState& env, int eap);

/// sum_k prob_k * (reward_k + gamma * next_value_k) over acting agents.
double critic_target(std::span<const double> probs, std::span<const double> rewards,
                     std::span<const double> next_values, double gamma);

struct CmmacConfig {
  double gamma = 0.9;
  double epsilon = 1.0;  // load-balance weight in the reward
  double actor_lr = 5e-4;
  double critic_lr = 5e-4;
  int actor_sync_slots = 10;  // acting copy refresh period
  std::vector<int> actor_hidden{256, 128, 32};
  std::vector<int> critic_hidden{256, 128, 64, 32};
  std::uint64_t seed = 1;
};

/// One finalized actor sample: state, stored mask, chosen index, advantage.
struct ActorRecord {
  Eigen::VectorXd state;
  Eigen::VectorXd mask;
  int action = 0;
  double advantage = 0;
};

/// Critic inputs of every agent that acted in one slot, and their joint
/// target.
struct CriticRecord {
  std::vector<Eigen::VectorXd> inputs;
  double target = 0;
};

class Cmmac {
 public:
  Cmmac(int local_size, int global_size, int eap_count, int node_count, CmmacConfig config);

  const CmmacConfig& config() const { return config_; }
  int action_count() const { return node_count_ + 1; }

  nn::Mlp<double>& actor() { return actor_; }
  const nn::Mlp<double>& actor() const { return actor_; }
  const nn::Mlp<double>& acting_actor() const { return acting_; }
  nn::Mlp<double>& critic() { return critic_; }
  const nn::Mlp<double>& critic() const { return critic_; }
  const nn::Mlp<double>& critic_target_net() const { return target_; }

  /// Masked distribution under the acting copy of the actor.
  Eigen::VectorXd probabilities(const Eigen::VectorXd& state, const Eigen::VectorXd& mask) const;
  /// Same under the trained parameters.
  Eigen::VectorXd training_probabilities(const Eigen::VectorXd& state,
                                         const Eigen::VectorXd& mask) const;
  int act(const Eigen::VectorXd& state, const Eigen::VectorXd& mask, PolicyMode mode,
          Rng& rng) const;

  Eigen::VectorXd critic_input(const Eigen::VectorXd& global_state, int eap) const;
  double value(const Eigen::VectorXd& critic_in) const;
  double target_value(const Eigen::VectorXd& critic_in) const;

  /// One Adam step on mean (sum_k V(inputs_k) - target)^2. Returns the
  /// pre-step loss.
  double train_critic(std::span<const CriticRecord> batch);
  /// One Adam ascent step on sum log pi(a|s) * A. Returns the gradient norm.
  double train_actor(std::span<const ActorRecord> batch);

  void sync_target() { target_ = critic_; }
  void sync_acting() { acting_ = actor_; }

  /// Dispatch decisions for every eAP at the current slot boundary. In
  /// training mode the decisions are remembered until observe().
  std::vector<std::optional<DispatchAction>> decide(const ClusterState& env, PolicyMode mode,
                                                    Rng& rng, bool training);
  /// Finalizes the previous slot's records against the post-slot state and
  /// runs one critic and one actor update.
  void observe(const ClusterState& env_after, double reward);
  /// Frame end: refresh the target network.
  void end_frame() { sync_target(); }
  /// Forget unfinished records (between episodes).
  void discard_pending() { pending_.clear(); }

  /// Probability the acting policy gave each decision of the last decide().
  const std::vector<Eigen::VectorXd>& last_distributions() const { return last_dist_; }

  void save(const std::filesystem::path& dir) const;
  /// Throws ValidationError when a checkpoint does not fit this topology.
  void load(const std::filesystem::path& dir);

 private:
  struct Pending {
    int eap = 0;
    Eigen::VectorXd state;
    Eigen::VectorXd mask;
    Eigen::VectorXd critic_in;
    int action = 0;
    double probability = 0;
  };

  CmmacConfig config_;
  int eap_count_;
  int node_count_;
  nn::Mlp<double> actor_;
  nn::Mlp<double> acting_;
  nn::Mlp<double> critic_;
  nn::Mlp<double> target_;
  nn::AdamState<double> actor_opt_;
  nn::AdamState<double> critic_opt_;
  std::vector<Pending> pending_;
  std::vector<Eigen::VectorXd> last_dist_;
  std::int64_t updates_ = 0;
};

}  // namespace edgesched

#endif  // EDGESCHED_CMMAC_HPP_
