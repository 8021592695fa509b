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

#ifndef NASHMODES_PREDICTOR_HPP_
#define NASHMODES_PREDICTOR_HPP_

#include <cstdint>
#include <vector>

#include "nashmodes/game.hpp"
#include "nashmodes/modes.hpp"
#include "nashmodes/types.hpp"

namespace nashmodes {

// A per-agent Gaussian mixture over planar trajectories, optimized directly by
// gradient descent. Every parameter lives in one flat vector so that finite
// difference checks can treat the model as a plain function of R^n.
//
// Layout: agent-major, then component-major. The block for (agent i,
// component k) is
//   [mu_x(0), mu_y(0), ..., mu_x(T-1), mu_y(T-1), log_sigma, logit]
// where sigma is the shared isotropic standard deviation of the component and
// the weights of agent i are the softmax of its K logits.
struct GmmPrediction {
  int num_agents = 0;
  int num_components = 0;
  int horizon = 0;
  std::vector<double> params;

  static GmmPrediction zeros(int num_agents, int num_components, int horizon);

  int block_size() const { return 2 * horizon + 2; }
  int param_count() const {
    return num_agents * num_components * block_size();
  }

  int block_start(int agent, int component) const {
    return (agent * num_components + component) * block_size();
  }
  int mu_index(int agent, int component, int t, int dim) const {
    return block_start(agent, component) + 2 * t + dim;
  }
  int log_sigma_index(int agent, int component) const {
    return block_start(agent, component) + 2 * horizon;
  }
  int logit_index(int agent, int component) const {
    return block_start(agent, component) + 2 * horizon + 1;
  }

  double mu(int agent, int component, int t, int dim) const {
    return params[mu_index(agent, component, t, dim)];
  }
  double log_sigma(int agent, int component) const {
    return params[log_sigma_index(agent, component)];
  }
  double logit(int agent, int component) const {
    return params[logit_index(agent, component)];
  }

  // Softmax of agent's component logits; sums to 1 up to rounding.
  std::vector<double> weights(int agent) const;

  // The mean trajectory of one component tuple (component[i] for agent i).
  JointTrajectory component_trajectory(const std::vector<int>& component) const;
};

struct TrainConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 10.0;
  double learning_rate = 0.05;
  int steps = 300;
  std::uint64_t seed = 0;
  double rho = 1.0;
  double bandwidth = 10.0;       // meters, mode clustering
  int mean_shift_iterations = 10;
  double dt = 0.5;               // seconds between trajectory samples
  double init_noise = 0.5;       // meters, stddev of mean initialization jitter
  // Coverage reporting: a game mode is an enumerated trajectory above this
  // probability, and it counts as covered when the joint samples within
  // `bandwidth` of it together hold at least `covered_mass` of the weight.
  double mode_prob_threshold = 0.2;
  double covered_mass = 0.1;
  // Lower bound on the component standard deviation in meters. Without it the
  // sigmas collapse and the effective mean step lr / (2 sigma^2) exceeds 1,
  // which makes plain gradient descent oscillate.
  double sigma_floor = 0.5;
  // Per-parameter cap on |learning_rate * gradient| so that large loss
  // coefficients (gamma = 100) cannot overshoot the logits each step.
  double max_step = 0.25;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as GmmPrediction::params
};

// Component whose mean endpoints, averaged over agents, are closest to the
// ground-truth endpoints. Ties go to the lower index.
int closest_component(const GmmPrediction& pred, const JointTrajectory& truth);

// Negative mean (over agents) cumulative log-likelihood of the ground truth
// under the endpoint-selected component:
//   -(1/I) sum_i sum_t (log w_khat^i + log N(o_t^i; mu_khat,t^i, sigma^2 I)).
// The component choice is held fixed for the gradient.
LossGrad accuracy_loss(const GmmPrediction& pred, const JointTrajectory& truth);

// Negative mean (over agents) log-weight of the selected component.
LossGrad classification_loss(const GmmPrediction& pred, int k_hat);

// Joint samples built by ranking each agent's components by weight
// (descending, ties to the lower index) and pairing equal ranks. Joint sample
// k has logit sum_i log w^i of the rank-k components; `component_of[k][i]` is
// the original component index backing that pick. Sample advantages are left
// at zero for the caller to fill.
struct JointAssembly {
  SampleSet samples;
  std::vector<std::vector<int>> component_of;  // [rank][agent]
};
JointAssembly joint_assembly(const GmmPrediction& pred);

struct TotalLoss {
  double loss = 0.0;
  double accuracy = 0.0;
  double classification = 0.0;
  double coverage = 0.0;
  std::vector<double> grad;
  // Coverage diagnostics; empty when gamma == 0.
  Histogram q;
  Histogram q_star;
  std::vector<int> labels;            // mode label per joint sample
  std::vector<double> sample_scores;  // advantage per joint sample
  int k_hat = 0;
};

// alpha * accuracy + beta * classification + gamma * coverage, with analytic
// gradients for all parameters. Joint samples are scored by the cumulative
// advantage of the nearest enumerated game trajectory (constant between
// snaps), clustered into modes, and compared against the ideal histogram; the
// empirical histogram sums the joint prediction weight mass per mode so the
// coverage gradient reaches the component logits. Mode assignment and the
// snap are held fixed within the step. With gamma == 0 the coverage pipeline
// is skipped entirely.
TotalLoss total_loss(const GmmPrediction& pred, const JointTrajectory& truth,
                     const std::vector<ScoredTrajectory>& enumerated,
                     const TrainConfig& config);

struct TrainResult {
  GmmPrediction pred;
  std::vector<double> loss_curve;  // steps + 1 entries
  double min_ade = 0.0;  // minimum over joint samples of mean displacement
  double coverage_kl = 0.0;
  int n_modes = 0;  // game modes covered per TrainConfig's coverage reporting
  Histogram final_q;
  Histogram final_q_star;
  std::vector<int> final_labels;
  std::vector<double> final_weights;  // joint sample weights
};

// Gradient descent on total_loss for one scene. Component means initialize on
// the top enumerated trajectories (round robin, jittered by seed) so every
// mode is structurally reachable and gamma only redistributes weight.
TrainResult train_toy_predictor(const TabularGame& game,
                                const AdvantageSource& src, int initial_state,
                                const JointTrajectory& ground_truth,
                                int num_components, const TrainConfig& config);

// Joint-minimum average displacement error against the ground truth.
double min_ade(const GmmPrediction& pred, const JointTrajectory& truth);

}  // namespace nashmodes

#endif  // NASHMODES_PREDICTOR_HPP_
