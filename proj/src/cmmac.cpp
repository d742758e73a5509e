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

#include "edgesched/cmmac.hpp"

#include <cmath>

#include "edgesched/metrics.hpp"

namespace edgesched {

namespace {

std::vector<int> sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

std::vector<nn::Activation> acts(std::size_t hidden, nn::Activation last) {
  std::vector<nn::Activation> a(hidden, nn::Activation::kRelu);
  a.push_back(last);
  return a;
}

}  // namespace

DispatchReward compute_reward(int violations, int on_time, std::span<const double> cpu_util,
                              std::span<const double> mem_util, double epsilon) {
  require(violations >= 0 && on_time >= 0, "counts must be >= 0");
  require(epsilon >= 0, "epsilon must be >= 0");
  DispatchReward r;
  const int terminal = violations + on_time;
  r.lambda_violation = terminal > 0 ? static_cast<double>(violations) / terminal : 0.0;
  r.xi = load_std(cpu_util, mem_util);
  r.nu = 1.0 / (1.0 + std::exp(-r.xi));
  r.epsilon_weight = epsilon;
  r.value = std::exp(-r.lambda_violation - epsilon * r.nu);
  return r;
}

DispatchReward compute_reward(const SlotOutcome& o, double epsilon) {
  return compute_reward(o.dropped, o.completed_on_time(), o.cpu_util, o.mem_util, epsilon);
}

Eigen::VectorXd build_context(const ClusterState& env, int eap) {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(env.node_count() + 1);
  mask[0] = 1.0;
  const auto head = env.peek_head(eap);
  if (!head) return mask;
  const int w = env.request(*head).record.service_type;
  for (int n = 0; n < env.node_count(); ++n) {
    if (env.node_accepts(n, w)) mask[n + 1] = 1.0;
  }
  return mask;
}

double critic_target(std::span<const double> probs, std::span<const double> rewards,
                     std::span<const double> next_values, double gamma) {
  require(probs.size() == rewards.size() && probs.size() == next_values.size(),
          "critic target terms differ in length");
  double total = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    total += probs[k] * (rewards[k] + gamma * next_values[k]);
  }
  return total;
}

Cmmac::Cmmac(int local_size, int global_size, int eap_count, int node_count, CmmacConfig config)
    : config_(std::move(config)), eap_count_(eap_count), node_count_(node_count) {
  require(local_size > 0 && global_size > 0 && eap_count > 0 && node_count > 0,
          "cmmac sizes must be positive");
  require(config_.gamma > 0 && config_.gamma <= 1, "gamma must be in (0, 1]");
  require(config_.actor_sync_slots >= 1, "actor_sync_slots must be >= 1");
  actor_ = nn::Mlp<double>(sizes(local_size, config_.actor_hidden, node_count + 1),
                           acts(config_.actor_hidden.size(), nn::Activation::kReluPlusOne),
                           config_.seed * 2 + 1);
  critic_ = nn::Mlp<double>(sizes(global_size + eap_count, config_.critic_hidden, 1),
                            acts(config_.critic_hidden.size(), nn::Activation::kLinear),
                            config_.seed * 2 + 2);
  acting_ = actor_;
  target_ = critic_;
  actor_opt_ = nn::AdamState<double>(actor_, config_.actor_lr);
  critic_opt_ = nn::AdamState<double>(critic_, config_.critic_lr);
}

Eigen::VectorXd Cmmac::probabilities(const Eigen::VectorXd& state,
                                     const Eigen::VectorXd& mask) const {
  return nn::masked_softmax<double>(nn::forward(acting_, state), mask);
}

Eigen::VectorXd Cmmac::training_probabilities(const Eigen::VectorXd& state,
                                              const Eigen::VectorXd& mask) const {
  return nn::masked_softmax<double>(nn::forward(actor_, state), mask);
}

int Cmmac::act(const Eigen::VectorXd& state, const Eigen::VectorXd& mask, PolicyMode mode,
               Rng& rng) const {
  const Eigen::VectorXd p = probabilities(state, mask);
  if (mode == PolicyMode::kGreedy) {
    Eigen::Index best = 0;
    p.maxCoeff(&best);  // first maximum on ties
    return static_cast<int>(best);
  }
  const double u = uniform01(rng);
  double cumulative = 0;
  int last_valid = 0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p[j] <= 0) continue;
    last_valid = static_cast<int>(j);
    cumulative += p[j];
    if (u < cumulative) return last_valid;
  }
  return last_valid;  // rounding left u above the running sum
}

Eigen::VectorXd Cmmac::critic_input(const Eigen::VectorXd& global_state, int eap) const {
  require(eap >= 0 && eap < eap_count_, "unknown eAP");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(global_state.size() + eap_count_);
  x.head(global_state.size()) = global_state;
  x[global_state.size() + eap] = 1.0;
  return x;
}

double Cmmac::value(const Eigen::VectorXd& critic_in) const {
  return nn::forward(critic_, critic_in)[0];
}

double Cmmac::target_value(const Eigen::VectorXd& critic_in) const {
  return nn::forward(target_, critic_in)[0];
}

double Cmmac::train_critic(std::span<const CriticRecord> batch) {
  require(!batch.empty(), "critic batch is empty");
  auto grads = nn::Gradients<double>::zeros_like(critic_);
  double loss = 0;
  for (const auto& rec : batch) {
    require(!rec.inputs.empty(), "critic record without inputs");
    std::vector<nn::ForwardCache<double>> caches(rec.inputs.size());
    double total = 0;
    for (std::size_t k = 0; k < rec.inputs.size(); ++k) {
      total += nn::forward(critic_, rec.inputs[k], caches[k])[0];
    }
    const double err = total - rec.target;
    loss += err * err;
    Eigen::VectorXd g(1);
    g[0] = 2.0 * err / static_cast<double>(batch.size());
    for (auto& cache : caches) nn::backward(critic_, cache, g, grads);
  }
  nn::adam_step(critic_opt_, critic_, grads);
  return loss / static_cast<double>(batch.size());
}

double Cmmac::train_actor(std::span<const ActorRecord> batch) {
  require(!batch.empty(), "actor batch is empty");
  auto grads = nn::Gradients<double>::zeros_like(actor_);
  for (const auto& rec : batch) {
    if (rec.action < 0 || rec.action >= rec.mask.size() || rec.mask[rec.action] <= 0) {
      throw ContractError("actor record chose an action outside its mask");
    }
    nn::ForwardCache<double> cache;
    const Eigen::VectorXd logits = nn::forward(actor_, rec.state, cache);
    const double total = logits.cwiseProduct(rec.mask).sum();
    // d log p_a / d logit_j = [j == a] / logit_a - mask_j / total; negated
    // because adam_step descends.
    Eigen::VectorXd g = rec.mask / total;
    g[rec.action] -= 1.0 / logits[rec.action];
    g *= rec.advantage;
    nn::backward(actor_, cache, g, grads);
  }
  const double norm = std::sqrt(grads.squared_norm());
  nn::adam_step(actor_opt_, actor_, grads);
  return norm;
}

std::vector<std::optional<DispatchAction>> Cmmac::decide(const ClusterState& env, PolicyMode mode,
                                                         Rng& rng, bool training) {
  require(env.eap_count() == eap_count_ && env.node_count() == node_count_,
          "environment does not match the dispatcher");
  std::vector<std::optional<DispatchAction>> actions(static_cast<std::size_t>(eap_count_));
  last_dist_.clear();
  const auto head_state = training ? snapshot_global_state(env) : Eigen::VectorXd();
  for (int b = 0; b < eap_count_; ++b) {
    const auto head = env.peek_head(b);
    if (!head) continue;  // nothing to dispatch, nothing stored
    Eigen::VectorXd state = snapshot_local_state(env, b);
    Eigen::VectorXd mask = build_context(env, b);
    const Eigen::VectorXd p = probabilities(state, mask);
    last_dist_.push_back(p);
    const int a = act(state, mask, mode, rng);
    actions[static_cast<std::size_t>(b)] = DispatchAction{b, a, *head};
    if (training) {
      pending_.push_back(Pending{b, std::move(state), std::move(mask), critic_input(head_state, b),
                                 a, p[a]});
    }
  }
  return actions;
}

void Cmmac::observe(const ClusterState& env_after, double reward) {
  if (pending_.empty()) return;
  const Eigen::VectorXd next_global = snapshot_global_state(env_after);
  std::vector<ActorRecord> actor_batch;
  CriticRecord critic_rec;
  std::vector<double> probs, rewards, next_values;
  for (auto& p : pending_) {
    const double next_v = target_value(critic_input(next_global, p.eap));
    const double advantage = reward + config_.gamma * next_v - value(p.critic_in);
    actor_batch.push_back(ActorRecord{std::move(p.state), std::move(p.mask), p.action, advantage});
    critic_rec.inputs.push_back(std::move(p.critic_in));
    probs.push_back(p.probability);
    rewards.push_back(reward);
    next_values.push_back(next_v);
  }
  pending_.clear();
  critic_rec.target = critic_target(probs, rewards, next_values, config_.gamma);
  train_critic(std::span<const CriticRecord>(&critic_rec, 1));
  train_actor(actor_batch);
  if (++updates_ % config_.actor_sync_slots == 0) sync_acting();
}

void Cmmac::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nn::save_mlp((dir / "actor.bin").string(), actor_);
  nn::save_mlp((dir / "critic.bin").string(), critic_);
  nn::save_mlp((dir / "critic_target.bin").string(), target_);
}

void Cmmac::load(const std::filesystem::path& dir) {
  auto actor = nn::load_mlp((dir / "actor.bin").string());
  auto critic = nn::load_mlp((dir / "critic.bin").string());
  auto target = nn::load_mlp((dir / "critic_target.bin").string());
  if (actor.layer_sizes() != actor_.layer_sizes()) {
    throw ValidationError("actor checkpoint shape does not match this topology");
  }
  if (critic.layer_sizes() != critic_.layer_sizes() ||
      target.layer_sizes() != critic_.layer_sizes()) {
    throw ValidationError("critic checkpoint shape does not match this topology");
  }
  actor_ = std::move(actor);
  acting_ = actor_;
  critic_ = std::move(critic);
  target_ = std::move(target);
  actor_opt_ = nn::AdamState<double>(actor_, config_.actor_lr);
  critic_opt_ = nn::AdamState<double>(critic_, config_.critic_lr);
}

}  // namespace edgesched
