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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "edgesched/gpg.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace edgesched;
namespace fx = edgesched::fixture;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

nn::Mlp<double> scalar_affine(double a, double b) {
  nn::DenseLayer<double> l;
  l.weights = MatrixXd::Constant(1, 1, a);
  l.bias = VectorXd::Constant(1, b);
  return nn::Mlp<double>({l});
}

void zero_output(nn::Mlp<double>& net) {
  net.layers().back().weights.setZero();
  net.layers().back().bias.setZero();
}

MatrixXd random_features(Rng& rng, int nodes, int W) {
  MatrixXd f(nodes, node_feature_size(W));
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = uniform01(rng);
  return f;
}

GpgConfig small_config(std::uint64_t seed = 1) {
  GpgConfig c;
  c.d_emb = 8;
  c.gnn_hidden = 6;
  c.nodes_per_frame = 1;
  c.seed = seed;
  return c;
}

// Two eAPs: nodes {0, 1} and {2}.
ClusterState two_eaps(int W = 2) {
  std::vector<ServiceSpec> s;
  for (int w = 0; w < W; ++w) s.push_back(fx::service(100, 500, 1024));
  return ClusterState(fx::topology(2, {NodeSpec{0, 2000, 4096, 300, 1.0}, NodeSpec{0, 1000, 2048, 300, 1.0},
                                       NodeSpec{1, 2000, 4096, 300, 1.0}}),
                      ServiceCatalog(s), ClusterOptions{}, {});
}

}  // namespace

TEST_CASE("lift pads and truncates") {
  const VectorXd f = (VectorXd(3) << 1, 2, 3).finished();
  CHECK(lift(f, 5) == (VectorXd(5) << 1, 2, 3, 0, 0).finished());
  CHECK(lift(f, 2) == (VectorXd(2) << 1, 2).finished());
  CHECK(lift(f, 3) == f);
  CHECK_THROWS_AS(lift(f, 0), ContractError);
}

TEST_CASE("node_features layout") {
  auto env = two_eaps(2);
  env.deploy(0, 2);
  env.deploy(0, 2);
  env.deploy(2, 1);
  const MatrixXd f = node_features(env);
  CHECK(f.rows() == 3);
  CHECK(f.cols() == 6 + 2 * 2);
  CHECK(node_feature_size(30) == 66);
  CHECK(f(0, 0) == doctest::Approx(1.0 - 1000.0 / 2000.0));
  CHECK(f(0, 1) == doctest::Approx(1.0 - 2048.0 / 4096.0));
  CHECK(f(1, 0) == 1.0);
  CHECK(f(0, 5) == 0.0);
  CHECK(f(0, 6) == 0.0);  // service 1 absent
  CHECK(f(0, 7) == 1.0);  // service 2 deployed
  CHECK(f(0, 9) > f(2, 8));  // two replicates against one
  CHECK(f(2, 6) == 1.0);
  CHECK(f(1, 6) + f(1, 7) + f(1, 8) + f(1, 9) == 0.0);
  CHECK(((f.array() >= 0) && (f.array() <= 1)).all());
}

TEST_CASE("scalar hand trace of the node, eAP and cluster embeddings") {
  GpgNetworks nets;
  nets.f1 = scalar_affine(2, 0);
  nets.h1 = scalar_affine(1, 1);
  nets.f2 = scalar_affine(1, 0);
  nets.h2 = scalar_affine(1, 0);
  nets.f3 = scalar_affine(3, 0);
  nets.h3 = scalar_affine(1, -1);
  MatrixXd feats = MatrixXd::Zero(3, 2);
  feats(0, 0) = 0.5;
  feats(1, 0) = 2.0;
  feats(2, 0) = 4.0;
  const Grouping groups{{0, 1}, {2}};
  SUBCASE("parallel") {
    const auto e = embed(nets, feats, groups, Aggregation::kParallel);
    CHECK(e.x(0, 0) == doctest::Approx(2 * 2.0 + 1 + 0.5));
    CHECK(e.x(1, 0) == doctest::Approx(2 * 0.5 + 1 + 2.0));
    CHECK(e.x(2, 0) == doctest::Approx(1 + 4.0));  // no neighbours
    CHECK(e.y(0, 0) == doctest::Approx(5.5 + 4.0));
    CHECK(e.y(1, 0) == doctest::Approx(5.0));
    CHECK(e.z[0] == doctest::Approx(3 * (9.5 + 5.0) - 1));
  }
  SUBCASE("sequential") {
    const auto e = embed(nets, feats, groups, Aggregation::kSequential);
    CHECK(e.x(0, 0) == doctest::Approx(5.5));
    CHECK(e.x(1, 0) == doctest::Approx(2 * 5.5 + 1 + 2.0));
    CHECK(e.y(0, 0) == doctest::Approx(5.5 + 14.0));
    CHECK(e.z[0] == doctest::Approx(3 * (19.5 + 5.0) - 1));
  }
  SUBCASE("embed_nodes and embed_eaps_and_cluster agree with embed") {
    const auto e = embed(nets, feats, groups, Aggregation::kParallel);
    const MatrixXd x = embed_nodes(nets, feats, groups, Aggregation::kParallel);
    CHECK(x == e.x);
    MatrixXd y;
    VectorXd z;
    embed_eaps_and_cluster(nets, x, groups, y, z);
    CHECK(y.isApprox(e.y));
    CHECK(z.isApprox(e.z));
  }
}

TEST_CASE("residual: zero h1 returns the lifted features") {
  Rng rng = make_rng(1, "residual");
  auto nets = GpgNetworks::make(3, 32, 64, 5);
  zero_output(nets.h1);
  const MatrixXd feats = random_features(rng, 5, 3);
  for (auto mode : {Aggregation::kParallel, Aggregation::kSequential}) {
    const MatrixXd x = embed_nodes(nets, feats, {{0, 1, 2}, {3, 4}}, mode);
    for (int n = 0; n < 5; ++n) {
      CHECK(VectorXd(x.row(n).transpose()) == lift(feats.row(n).transpose(), 32));
    }
  }
  // Truncation when the feature row is wider than the embedding.
  auto narrow = GpgNetworks::make(30, 32, 64, 5);
  zero_output(narrow.h1);
  const MatrixXd wide = random_features(rng, 2, 30);
  const MatrixXd x = embed_nodes(narrow, wide, {{0}, {1}}, Aggregation::kParallel);
  CHECK(VectorXd(x.row(1).transpose()) == VectorXd(wide.row(1).head(32).transpose()));
}

TEST_CASE("singleton groups") {
  Rng rng = make_rng(2, "singleton");
  const auto nets = GpgNetworks::make(2, 8, 6, 3);
  const MatrixXd feats = random_features(rng, 1, 2);
  const auto e = embed(nets, feats, {{0}}, Aggregation::kParallel);
  const VectorXd x = e.x.row(0).transpose();
  CHECK(x.isApprox(nn::forward(nets.h1, VectorXd(VectorXd::Zero(8))) + lift(feats.row(0).transpose(), 8)));
  const VectorXd y = nn::forward(nets.h2, nn::forward(nets.f2, x));
  CHECK(VectorXd(e.y.row(0).transpose()).isApprox(y));
  CHECK(e.z.isApprox(nn::forward(nets.h3, nn::forward(nets.f3, y))));
}

TEST_CASE("permutation equivariance under parallel aggregation") {
  Rng rng = make_rng(3, "perm");
  const auto nets = GpgNetworks::make(3, 8, 6, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd feats = random_features(rng, 5, 3);
    const Grouping groups{{0, 1, 2}, {3, 4}};
    // Relabel within eAP 0: 0 -> 2, 1 -> 0, 2 -> 1; within eAP 1: swap.
    const std::vector<int> to{2, 0, 1, 4, 3};
    MatrixXd permuted(feats.rows(), feats.cols());
    for (int n = 0; n < 5; ++n) permuted.row(to[static_cast<std::size_t>(n)]) = feats.row(n);
    const auto a = embed(nets, feats, groups, Aggregation::kParallel);
    const auto b = embed(nets, permuted, groups, Aggregation::kParallel);
    for (int n = 0; n < 5; ++n) {
      CHECK(VectorXd(a.x.row(n)).isApprox(VectorXd(b.x.row(to[static_cast<std::size_t>(n)])), 1e-12));
    }
    CHECK(a.y.isApprox(b.y, 1e-12));
    CHECK(a.z.isApprox(b.z, 1e-12));
    VectorXd sa = selection_probabilities(nets, a, groups), sb = selection_probabilities(nets, b, groups);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    CHECK(sa.isApprox(sb, 1e-12));
  }
  // Identical nodes embed identically.
  MatrixXd same(2, node_feature_size(3));
  same.setConstant(0.3);
  const auto e = embed(nets, same, {{0, 1}}, Aggregation::kParallel);
  CHECK(e.x.row(0) == e.x.row(1));
}

TEST_CASE("node selection") {
  Rng rng = make_rng(4, "select");
  SUBCASE("flat head gives a uniform distribution") {
    auto nets = GpgNetworks::make(2, 8, 6, 1);
    zero_output(nets.g);
    const Grouping groups{{0, 1}, {2, 3}};
    const auto e = embed(nets, random_features(rng, 4, 2), groups, Aggregation::kParallel);
    const VectorXd s = selection_probabilities(nets, e, groups);
    CHECK(s.isApprox(VectorXd::Constant(4, 0.25)));
  }
  SUBCASE("softmax example") {
    const VectorXd s = nn::softmax(VectorXd((VectorXd(3) << 2, 1, 0).finished()));
    CHECK(s[0] == doctest::Approx(0.6652).epsilon(1e-4));
    CHECK(s[1] == doctest::Approx(0.2447).epsilon(1e-4));
    CHECK(s[2] == doctest::Approx(0.0900).epsilon(1e-3));
  }
  SUBCASE("H equal to N selects every node") {
    const VectorXd sigma = (VectorXd(4) << 0.97, 0.01, 0.01, 0.01).finished();
    for (auto mode : {PolicyMode::kSample, PolicyMode::kGreedy}) {
      auto nodes = select_nodes(sigma, 4, mode, rng);
      std::sort(nodes.begin(), nodes.end());
      CHECK(nodes == std::vector<int>{0, 1, 2, 3});
    }
    CHECK_THROWS_AS(select_nodes(sigma, 5, PolicyMode::kGreedy, rng), ContractError);
  }
  SUBCASE("greedy takes the most probable with ties to the lower id") {
    const VectorXd sigma = (VectorXd(5) << 0.1, 0.3, 0.1, 0.3, 0.2).finished();
    CHECK(select_nodes(sigma, 2, PolicyMode::kGreedy, rng) == std::vector<int>{1, 3});
    CHECK(select_nodes(sigma, 3, PolicyMode::kGreedy, rng) == std::vector<int>{1, 3, 4});
    CHECK(select_nodes(sigma, 4, PolicyMode::kGreedy, rng) == std::vector<int>{1, 3, 4, 0});
  }
  SUBCASE("sampling draws distinct nodes in proportion") {
    const VectorXd sigma = (VectorXd(3) << 0.6, 0.3, 0.1).finished();
    std::vector<int> first(3, 0), pair_01(1, 0);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
      const auto nodes = select_nodes(sigma, 2, PolicyMode::kSample, rng);
      REQUIRE(nodes.size() == 2);
      CHECK(nodes[0] != nodes[1]);
      ++first[static_cast<std::size_t>(nodes[0])];
      if (nodes[0] == 0 && nodes[1] == 1) ++pair_01[0];
    }
    for (int n = 0; n < 3; ++n) {
      const double p = sigma[n];
      CHECK(std::abs(first[static_cast<std::size_t>(n)] - draws * p) < 4 * std::sqrt(draws * p * (1 - p)));
    }
    const double p01 = 0.6 * 0.3 / 0.4;
    CHECK(std::abs(pair_01[0] - draws * p01) < 4 * std::sqrt(draws * p01 * (1 - p01)));
  }
}

TEST_CASE("scaling head") {
  Rng rng = make_rng(5, "scale");
  auto nets = GpgNetworks::make(1, 8, 6, 2);
  CHECK(nets.q.output_size() == 3);
  const Grouping groups{{0, 1}};
  const auto e = embed(nets, random_features(rng, 2, 1), groups, Aggregation::kParallel);
  const VectorXd q = scaling_probabilities(nets, e, groups, 1);
  CHECK(q.size() == 3);
  CHECK(q.sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(scaling_probabilities(nets, e, groups, 2), ContractError);

  // Flat head: sampled deltas are uniform over -W..W.
  auto env = two_eaps(2);
  GpgOrchestrator orch(2, small_config());
  zero_output(orch.networks().q);
  std::vector<int> counts(5, 0);
  const int draws = 5000;
  for (int i = 0; i < draws; ++i) {
    const auto a = orch.decide(env, PolicyMode::kSample, rng, false);
    REQUIRE(a.steps.size() == 1);
    ++counts[static_cast<std::size_t>(a.steps[0].delta + 2)];
  }
  for (int c : counts) CHECK(std::abs(c - draws / 5.0) < 3 * std::sqrt(draws * 0.2 * 0.8));

  // Greedy decisions are deterministic.
  GpgOrchestrator greedy(2, small_config(3));
  const auto first = greedy.decide(env, PolicyMode::kGreedy, rng, false);
  for (int i = 0; i < 10; ++i) {
    CHECK(greedy.decide(env, PolicyMode::kGreedy, rng, false).steps == first.steps);
  }
}

TEST_CASE("orchestration reward") {
  CHECK(orchestration_reward(0) == 1.0);
  CHECK(orchestration_reward(3) == doctest::Approx(0.0498).epsilon(1e-3));
  for (int k = 0; k < 20; ++k) CHECK(orchestration_reward(k + 1) < orchestration_reward(k));
  CHECK_THROWS_AS(orchestration_reward(-1), ContractError);
  auto env = two_eaps();
  CHECK(orchestration_reward(env) == 1.0);
}

TEST_CASE("joint_log_prob gradients match finite differences") {
  Rng rng = make_rng(6, "gpg-grad");
  for (auto mode : {Aggregation::kParallel, Aggregation::kSequential}) {
    CAPTURE(static_cast<int>(mode));
    auto nets = GpgNetworks::make(2, 6, 5, 7);
    GpgSample s;
    s.features = random_features(rng, 4, 2);
    s.groups = {{0, 1, 2}, {3}};
    s.nodes = {2, 0};
    s.delta_index = {4, 1};
    const double weight = 0.7;
    auto grads = GpgGradients::zeros_like(nets);
    const double logp = joint_log_prob(nets, s, mode, &grads, weight);
    CHECK(logp == doctest::Approx(joint_log_prob(nets, s, mode)));
    CHECK(logp < 0);

    auto f = [&] { return weight * joint_log_prob(nets, s, mode); };
    const double step = 1e-6;
    int checked = 0, redrawn = 0;
    double worst = 0;
    auto all = nets.all();
    while (checked < 150) {
      const auto which = static_cast<std::size_t>(rng() % GpgNetworks::kCount);
      auto& net = *all[which];
      const auto index = static_cast<std::size_t>(rng() % net.parameter_count());
      double& p = nn::parameter_at(net, index);
      const double saved = p, mid = f();
      p = saved + step;
      const double up = f();
      p = saved - step;
      const double down = f();
      p = saved;
      // Unequal one-sided slopes: the probe straddles a relu kink.
      const double right = (up - mid) / step, left = (mid - down) / step;
      if (oracle::relative_error(right, left) > 1e-3 && std::abs(right - left) > 1e-6) {
        ++redrawn;
        continue;
      }
      worst = std::max(worst, oracle::relative_error(nn::gradient_at(grads.nets[which], index),
                                                     (up - down) / (2 * step)));
      ++checked;
    }
    CHECK(redrawn < 50);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("decide and the episode buffer") {
  auto env = two_eaps(3);
  auto config = small_config();
  config.nodes_per_frame = 2;
  config.episode_frames = 3;
  GpgOrchestrator orch(3, config);
  Rng rng = make_rng(7, "episode");
  CHECK_FALSE(orch.awaiting_reward());
  CHECK_THROWS_AS(orch.record_reward(1.0), ContractError);
  for (int t = 0; t < 3; ++t) {
    const auto a = orch.decide(env, PolicyMode::kSample, rng, true);
    REQUIRE(a.steps.size() == 2);
    CHECK(a.steps[0].node != a.steps[1].node);
    for (const auto& s : a.steps) {
      CHECK(s.delta >= -3);
      CHECK(s.delta <= 3);
    }
    CHECK(orch.awaiting_reward());
    if (t < 2) {
      CHECK_THROWS_AS(orch.finish_episode(), ContractError);
      orch.record_reward(0.5);
    }
  }
  CHECK_THROWS_AS(orch.finish_episode(), ContractError);
  orch.record_reward(0.25);
  CHECK(orch.finish_episode() > 0);
  REQUIRE(orch.baseline().size() == 3);
  CHECK(orch.baseline()[0] == doctest::Approx(1.25));
  CHECK(orch.baseline()[2] == doctest::Approx(0.25));
  CHECK(orch.recorded_frames() == 0);

  GpgOrchestrator one(3, small_config());
  CHECK_THROWS_AS(one.decide(two_eaps(2), PolicyMode::kGreedy, rng, false), ContractError);
  CHECK_THROWS_AS(GpgOrchestrator(3, GpgConfig{0}), ContractError);
}

TEST_CASE("finish_episode") {
  auto env = two_eaps(2);
  Rng rng = make_rng(8, "finish");
  SUBCASE("reward-to-go equal to the baseline leaves the parameters unchanged") {
    GpgOrchestrator orch(2, small_config());
    for (int ep = 0; ep < 2; ++ep) {
      orch.decide(env, PolicyMode::kSample, rng, true);
      orch.record_reward(0.8);
      orch.decide(env, PolicyMode::kSample, rng, true);
      orch.record_reward(0.3);
      if (ep == 0) {
        CHECK(orch.finish_episode() > 0);
      } else {
        const auto before = orch.networks().all();
        std::vector<nn::Mlp<double>> saved;
        for (auto* n : before) saved.push_back(*n);
        CHECK(orch.finish_episode() == 0.0);
        const auto after = orch.networks().all();
        for (std::size_t i = 0; i < saved.size(); ++i) CHECK(*after[i] == saved[i]);
      }
    }
    CHECK(orch.baseline()[0] == doctest::Approx(1.1));
    CHECK(orch.baseline()[1] == doctest::Approx(0.3));
  }
  SUBCASE("positive centered return raises the joint action's probability") {
    int raised = 0;
    for (int trial = 0; trial < 10; ++trial) {
      auto config = small_config(static_cast<std::uint64_t>(trial + 1));
      config.lr = 1e-4;
      GpgOrchestrator orch(2, config);
      const auto a = orch.decide(env, PolicyMode::kSample, rng, true);
      GpgSample s;
      s.features = node_features(env);
      s.groups = grouping_of(env);
      s.nodes = {a.steps[0].node};
      s.delta_index = {a.steps[0].delta + 2};
      const double before = joint_log_prob(orch.networks(), s, Aggregation::kParallel);
      orch.record_reward(1.0);
      orch.finish_episode();
      if (joint_log_prob(orch.networks(), s, Aggregation::kParallel) > before) ++raised;
    }
    CHECK(raised == 10);
  }
}

TEST_CASE("checkpoints") {
  const auto dir = std::filesystem::temp_directory_path() / "edgesched_gpg_ckpt";
  std::filesystem::remove_all(dir);
  GpgOrchestrator a(2, small_config(1));
  a.save(dir);
  for (const char* name : GpgNetworks::names()) {
    CHECK(std::filesystem::exists(dir / (std::string(name) + ".bin")));
  }
  GpgOrchestrator b(2, small_config(2));
  b.load(dir);
  const auto na = a.networks().all(), nb = b.networks().all();
  for (std::size_t i = 0; i < GpgNetworks::kCount; ++i) CHECK(*na[i] == *nb[i]);
  GpgOrchestrator wider(3, small_config());
  CHECK_THROWS_AS(wider.load(dir), ValidationError);
}
