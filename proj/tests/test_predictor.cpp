// Copyright 2026 The nashmodes Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nashmodes/predictor.hpp"
#include "nashmodes/scenario.hpp"
#include "oracles.hpp"

using namespace nashmodes;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

JointTrajectory straight_truth(int num_agents, int horizon) {
  JointTrajectory traj;
  for (int t = 0; t < horizon; ++t) {
    JointState s;
    for (int i = 0; i < num_agents; ++i) {
      s.push_back({3.0 * t + i, 2.0 * i - t, 0.0, 0.0});
    }
    traj.states.push_back(s);
  }
  return traj;
}

GmmPrediction random_pred(int num_agents, int num_components, int horizon,
                          std::uint64_t seed) {
  GmmPrediction pred = GmmPrediction::zeros(num_agents, num_components, horizon);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& p : pred.params) p = noise(rng);
  // Keep sigma in a benign range for finite differences.
  for (int i = 0; i < num_agents; ++i) {
    for (int k = 0; k < num_components; ++k) {
      pred.params[pred.log_sigma_index(i, k)] =
          0.2 * pred.params[pred.log_sigma_index(i, k)];
    }
  }
  return pred;
}

}  // namespace

TEST_CASE("weights are a simplex point for any parameters") {
  const GmmPrediction pred = random_pred(2, 4, 5, 3);
  for (int i = 0; i < 2; ++i) {
    double total = 0.0;
    for (double w : pred.weights(i)) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a unit component on the truth scores T log 2 pi") {
  const int T = 5;
  const JointTrajectory truth = straight_truth(1, T);
  GmmPrediction pred = GmmPrediction::zeros(1, 1, T);
  for (int t = 0; t < T; ++t) {
    pred.params[pred.mu_index(0, 0, t, 0)] = truth.states[t][0].x;
    pred.params[pred.mu_index(0, 0, t, 1)] = truth.states[t][0].y;
  }
  // sigma = 1, single component so w = 1 and the weight term vanishes.
  const LossGrad acc = accuracy_loss(pred, truth);
  CHECK(acc.loss == doctest::Approx(T * kLog2Pi).epsilon(1e-12));
}

TEST_CASE("the endpoint rule picks the component on the truth") {
  const int T = 4;
  const JointTrajectory truth = straight_truth(2, T);
  GmmPrediction pred = GmmPrediction::zeros(2, 2, T);
  for (int i = 0; i < 2; ++i) {
    for (int t = 0; t < T; ++t) {
      // Component 1 sits on the truth; component 0 is 100 m away.
      pred.params[pred.mu_index(i, 0, t, 0)] = truth.states[t][i].x + 100.0;
      pred.params[pred.mu_index(i, 0, t, 1)] = truth.states[t][i].y;
      pred.params[pred.mu_index(i, 1, t, 0)] = truth.states[t][i].x;
      pred.params[pred.mu_index(i, 1, t, 1)] = truth.states[t][i].y;
    }
  }
  CHECK(closest_component(pred, truth) == 1);
}

TEST_CASE("accuracy gradient matches finite differences") {
  const JointTrajectory truth = straight_truth(2, 5);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const GmmPrediction pred = random_pred(2, 3, 5, seed);
    const LossGrad acc = accuracy_loss(pred, truth);
    const std::vector<double> numeric = test_oracle::finite_difference(
        [&](const std::vector<double>& p) {
          GmmPrediction probe = pred;
          probe.params = p;
          return accuracy_loss(probe, truth).loss;
        },
        pred.params);
    CHECK(test_oracle::max_relative_error(acc.grad, numeric) < 1e-4);
  }
}

TEST_CASE("classification loss basics and gradient") {
  GmmPrediction pred = GmmPrediction::zeros(1, 4, 2);
  // Uniform weights, K = 4.
  CHECK(classification_loss(pred, 2).loss == doctest::Approx(std::log(4.0)));
  // All weight on the selected component.
  pred.params[pred.logit_index(0, 1)] = 500.0;
  CHECK(classification_loss(pred, 1).loss == doctest::Approx(0.0));
  CHECK_THROWS_AS(classification_loss(pred, 4), std::out_of_range);

  const GmmPrediction rnd = random_pred(2, 4, 3, 9);
  const LossGrad cls = classification_loss(rnd, 2);
  const std::vector<double> numeric = test_oracle::finite_difference(
      [&](const std::vector<double>& p) {
        GmmPrediction probe = rnd;
        probe.params = p;
        return classification_loss(probe, 2).loss;
      },
      rnd.params);
  CHECK(test_oracle::max_relative_error(cls.grad, numeric) < 1e-4);
}

TEST_CASE("joint assembly pairs equal weight ranks") {
  GmmPrediction pred = GmmPrediction::zeros(2, 2, 3);
  // Weights (0.7, 0.3) and (0.6, 0.4).
  pred.params[pred.logit_index(0, 0)] = std::log(0.7);
  pred.params[pred.logit_index(0, 1)] = std::log(0.3);
  pred.params[pred.logit_index(1, 0)] = std::log(0.6);
  pred.params[pred.logit_index(1, 1)] = std::log(0.4);
  const JointAssembly assembly = joint_assembly(pred);
  REQUIRE(assembly.samples.size() == 2);
  CHECK(assembly.samples.weight_logits[0] ==
        doctest::Approx(std::log(0.42)).epsilon(1e-12));
  CHECK(assembly.samples.weight_logits[1] ==
        doctest::Approx(std::log(0.12)).epsilon(1e-12));
  CHECK(assembly.component_of[0] == std::vector<int>{0, 0});
  CHECK(assembly.component_of[1] == std::vector<int>{1, 1});
}

TEST_CASE("joint assembly of a single agent is the identity") {
  const GmmPrediction pred = random_pred(1, 3, 4, 11);
  const JointAssembly assembly = joint_assembly(pred);
  const std::vector<double> w = pred.weights(0);
  for (int k = 0; k < 3; ++k) {
    const int c = assembly.component_of[k][0];
    CHECK(assembly.samples.weight_logits[k] ==
          doctest::Approx(std::log(w[c])).epsilon(1e-12));
    for (int t = 0; t < 4; ++t) {
      CHECK(assembly.samples.trajectories[k].states[t][0].x ==
            pred.mu(0, c, t, 0));
    }
  }
}

TEST_CASE("joint assembly is invariant to component storage order") {
  const GmmPrediction pred = random_pred(2, 3, 4, 13);
  GmmPrediction permuted = pred;
  // Swap components 0 and 2 of agent 1 in storage.
  const int bs = pred.block_size();
  for (int b = 0; b < bs; ++b) {
    std::swap(permuted.params[permuted.block_start(1, 0) + b],
              permuted.params[permuted.block_start(1, 2) + b]);
  }
  const JointAssembly a = joint_assembly(pred);
  const JointAssembly b = joint_assembly(permuted);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.samples.weight_logits[k] ==
          doctest::Approx(b.samples.weight_logits[k]).epsilon(1e-12));
    CHECK(trajectory_distance(a.samples.trajectories[k],
                              b.samples.trajectories[k]) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("gamma zero reduces the total loss to accuracy plus classification") {
  const JointTrajectory truth = straight_truth(2, 4);
  const GmmPrediction pred = random_pred(2, 3, 4, 17);
  TrainConfig config;
  config.alpha = 0.7;
  config.beta = 1.3;
  config.gamma = 0.0;
  const TotalLoss tl = total_loss(pred, truth, {}, config);
  const double expected = config.alpha * accuracy_loss(pred, truth).loss +
                          config.beta *
                              classification_loss(pred, closest_component(
                                                            pred, truth))
                                  .loss;
  CHECK(tl.loss == doctest::Approx(expected).epsilon(1e-12));
  CHECK(tl.q.empty());
}

TEST_CASE("total loss gradient matches finite differences on a scene") {
  const ScenarioParams params;
  const Scenario scenario = generate_scenario(Archetype::kYield, params, 5);
  SolveOptions opts;
  opts.warn_on_nonconvergence = false;
  const SoftEquilibrium eq = solve_soft_equilibrium(scenario.game, opts);
  const auto enumerated =
      enumerate_all_trajectories(scenario.game, scenario.initial_state, eq);

  TrainConfig config;
  config.gamma = 10.0;
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    // 2 agents, K = 4, T = 5 per the acceptance sizing; horizon follows the
    // game so the snap is well defined.
    GmmPrediction pred =
        random_pred(2, 4, scenario.game.horizon, seed);
    // Place means near distinct game modes so the snap is stable under the
    // probe step.
    for (int k = 0; k < 4; ++k) {
      const JointTrajectory& base = enumerated[k * 37].trajectory;
      for (int i = 0; i < 2; ++i) {
        for (int t = 0; t < scenario.game.horizon; ++t) {
          pred.params[pred.mu_index(i, k, t, 0)] += base.states[t][i].x;
          pred.params[pred.mu_index(i, k, t, 1)] += base.states[t][i].y;
        }
      }
    }
    const TotalLoss tl = total_loss(pred, scenario.ground_truth, enumerated, config);
    const std::vector<double> numeric = test_oracle::finite_difference(
        [&](const std::vector<double>& p) {
          GmmPrediction probe = pred;
          probe.params = p;
          return total_loss(probe, scenario.ground_truth, enumerated, config)
              .loss;
        },
        pred.params);
    CHECK(test_oracle::max_relative_error(tl.grad, numeric) < 1e-3);
  }
}

TEST_CASE("training covers one mode without coverage and two with it") {
  const ScenarioParams params;
  const Scenario scenario = generate_scenario(Archetype::kYield, params, 1);
  SolveOptions opts;
  opts.warn_on_nonconvergence = false;
  const SoftEquilibrium eq = solve_soft_equilibrium(scenario.game, opts);

  TrainConfig config;
  config.seed = 1;
  config.gamma = 0.0;
  const TrainResult plain = train_toy_predictor(
      scenario.game, eq, scenario.initial_state, scenario.ground_truth, 4,
      config);
  CHECK(plain.n_modes == 1);

  config.gamma = 10.0;
  const TrainResult covered = train_toy_predictor(
      scenario.game, eq, scenario.initial_state, scenario.ground_truth, 4,
      config);
  CHECK(covered.n_modes >= 2);

  // The mean parameters never see the coverage gradient, so accuracy holds.
  CHECK(covered.min_ade <= 1.2 * plain.min_ade + 1e-9);
}

TEST_CASE("training rejects bad configurations") {
  const TabularGame game = test_oracle::chicken_game();
  SolveOptions opts;
  opts.warn_on_nonconvergence = false;
  const SoftEquilibrium eq = solve_soft_equilibrium(game, opts);
  const JointTrajectory truth = rollout(eq, game, 0, 5);
  TrainConfig config;
  CHECK_THROWS_AS(
      train_toy_predictor(game, eq, 0, truth, 0, config),
      std::invalid_argument);
  config.alpha = -1.0;
  CHECK_THROWS_AS(
      train_toy_predictor(game, eq, 0, truth, 2, config),
      std::invalid_argument);
}
