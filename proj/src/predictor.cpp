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

#include "nashmodes/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace nashmodes {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_pred(const GmmPrediction& pred) {
  if (pred.num_agents < 1 || pred.num_components < 1 || pred.horizon < 1) {
    throw std::invalid_argument("predictor: empty model");
  }
  if (static_cast<int>(pred.params.size()) != pred.param_count()) {
    throw std::invalid_argument("predictor: parameter vector has wrong size");
  }
}

void check_truth(const GmmPrediction& pred, const JointTrajectory& truth) {
  if (truth.horizon() != pred.horizon) {
    throw std::invalid_argument("predictor: ground-truth horizon mismatch");
  }
  if (truth.num_agents() != pred.num_agents) {
    throw std::invalid_argument("predictor: ground-truth agent count mismatch");
  }
}

// Agents' components ordered by descending weight, ties to the lower index.
std::vector<int> weight_rank(const std::vector<double>& w) {
  std::vector<int> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w[a] > w[b]; });
  return order;
}

}  // namespace

GmmPrediction GmmPrediction::zeros(int num_agents, int num_components,
                                   int horizon) {
  if (num_agents < 1 || num_components < 1 || horizon < 1) {
    throw std::invalid_argument("GmmPrediction: dimensions must be positive");
  }
  GmmPrediction pred;
  pred.num_agents = num_agents;
  pred.num_components = num_components;
  pred.horizon = horizon;
  pred.params.assign(pred.param_count(), 0.0);
  return pred;
}

std::vector<double> GmmPrediction::weights(int agent) const {
  std::vector<double> logits(num_components);
  for (int k = 0; k < num_components; ++k) logits[k] = logit(agent, k);
  return softmax(logits);
}

JointTrajectory GmmPrediction::component_trajectory(
    const std::vector<int>& component) const {
  if (static_cast<int>(component.size()) != num_agents) {
    throw std::invalid_argument("component_trajectory: wrong tuple size");
  }
  JointTrajectory traj;
  traj.states.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    traj.states[t].resize(num_agents);
    for (int i = 0; i < num_agents; ++i) {
      traj.states[t][i].x = mu(i, component[i], t, 0);
      traj.states[t][i].y = mu(i, component[i], t, 1);
    }
  }
  return traj;
}

int closest_component(const GmmPrediction& pred, const JointTrajectory& truth) {
  check_pred(pred);
  check_truth(pred, truth);
  const int last = pred.horizon - 1;
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < pred.num_components; ++k) {
    double sum = 0.0;
    for (int i = 0; i < pred.num_agents; ++i) {
      const double dx = pred.mu(i, k, last, 0) - truth.states[last][i].x;
      const double dy = pred.mu(i, k, last, 1) - truth.states[last][i].y;
      sum += std::hypot(dx, dy);
    }
    if (sum < best_dist) {
      best_dist = sum;
      best = k;
    }
  }
  return best;
}

LossGrad accuracy_loss(const GmmPrediction& pred,
                       const JointTrajectory& truth) {
  check_pred(pred);
  check_truth(pred, truth);
  const int k_hat = closest_component(pred, truth);
  const int I = pred.num_agents;
  const int T = pred.horizon;
  const double inv_i = 1.0 / I;

  LossGrad out;
  out.grad.assign(pred.param_count(), 0.0);
  for (int i = 0; i < I; ++i) {
    const std::vector<double> w = pred.weights(i);
    const double sigma = std::exp(pred.log_sigma(i, k_hat));
    const double var = sigma * sigma;
    double sq_sum = 0.0;
    for (int t = 0; t < T; ++t) {
      const double dx = pred.mu(i, k_hat, t, 0) - truth.states[t][i].x;
      const double dy = pred.mu(i, k_hat, t, 1) - truth.states[t][i].y;
      const double sq = dx * dx + dy * dy;
      sq_sum += sq;
      // log f = -log(2 pi) - 2 log sigma - sq / (2 var)
      out.loss -=
          inv_i * (std::log(w[k_hat]) - kLog2Pi -
                   2.0 * pred.log_sigma(i, k_hat) - sq / (2.0 * var));
      out.grad[pred.mu_index(i, k_hat, t, 0)] = inv_i * dx / var;
      out.grad[pred.mu_index(i, k_hat, t, 1)] = inv_i * dy / var;
    }
    out.grad[pred.log_sigma_index(i, k_hat)] =
        inv_i * (2.0 * T - sq_sum / var);
    for (int k = 0; k < pred.num_components; ++k) {
      const double indicator = k == k_hat ? 1.0 : 0.0;
      out.grad[pred.logit_index(i, k)] =
          -inv_i * T * (indicator - w[k]);
    }
  }
  return out;
}

LossGrad classification_loss(const GmmPrediction& pred, int k_hat) {
  check_pred(pred);
  if (k_hat < 0 || k_hat >= pred.num_components) {
    throw std::out_of_range("classification_loss: component out of range");
  }
  const double inv_i = 1.0 / pred.num_agents;
  LossGrad out;
  out.grad.assign(pred.param_count(), 0.0);
  for (int i = 0; i < pred.num_agents; ++i) {
    const std::vector<double> w = pred.weights(i);
    out.loss -= inv_i * std::log(w[k_hat]);
    for (int k = 0; k < pred.num_components; ++k) {
      const double indicator = k == k_hat ? 1.0 : 0.0;
      out.grad[pred.logit_index(i, k)] = -inv_i * (indicator - w[k]);
    }
  }
  return out;
}

JointAssembly joint_assembly(const GmmPrediction& pred) {
  check_pred(pred);
  JointAssembly out;
  std::vector<std::vector<int>> ranks(pred.num_agents);
  std::vector<std::vector<double>> weights(pred.num_agents);
  for (int i = 0; i < pred.num_agents; ++i) {
    weights[i] = pred.weights(i);
    ranks[i] = weight_rank(weights[i]);
  }
  for (int k = 0; k < pred.num_components; ++k) {
    std::vector<int> tuple(pred.num_agents);
    double logit = 0.0;
    for (int i = 0; i < pred.num_agents; ++i) {
      tuple[i] = ranks[i][k];
      logit += std::log(weights[i][tuple[i]]);
    }
    out.samples.trajectories.push_back(pred.component_trajectory(tuple));
    out.samples.weight_logits.push_back(logit);
    out.samples.advantages.push_back(0.0);
    out.component_of.push_back(tuple);
  }
  return out;
}

TotalLoss total_loss(const GmmPrediction& pred, const JointTrajectory& truth,
                     const std::vector<ScoredTrajectory>& enumerated,
                     const TrainConfig& config) {
  check_pred(pred);
  if (config.alpha < 0.0 || config.beta < 0.0 || config.gamma < 0.0) {
    throw std::invalid_argument("total_loss: negative loss coefficient");
  }
  TotalLoss out;
  out.grad.assign(pred.param_count(), 0.0);

  const LossGrad acc = accuracy_loss(pred, truth);
  out.k_hat = closest_component(pred, truth);
  const LossGrad cls = classification_loss(pred, out.k_hat);
  out.accuracy = acc.loss;
  out.classification = cls.loss;
  for (int p = 0; p < pred.param_count(); ++p) {
    out.grad[p] = config.alpha * acc.grad[p] + config.beta * cls.grad[p];
  }
  out.loss = config.alpha * acc.loss + config.beta * cls.loss;
  if (config.gamma == 0.0) return out;

  if (enumerated.empty()) {
    throw std::invalid_argument("total_loss: no enumerated trajectories");
  }
  JointAssembly assembly = joint_assembly(pred);
  for (int k = 0; k < pred.num_components; ++k) {
    // Score the sample by the nearest game trajectory, constant between snaps.
    double best_dist = std::numeric_limits<double>::infinity();
    double score = 0.0;
    for (const ScoredTrajectory& cand : enumerated) {
      const double d = trajectory_distance(assembly.samples.trajectories[k],
                                           cand.trajectory);
      if (d < best_dist) {
        best_dist = d;
        score = cand.log_prob;
      }
    }
    assembly.samples.advantages[k] = score;
  }
  const ModeSet modes = mean_shift_modes(assembly.samples, config.bandwidth,
                                         config.mean_shift_iterations);
  out.labels = modes.labels;
  out.sample_scores = assembly.samples.advantages;
  out.q_star = ideal_histogram(assembly.samples.advantages, modes.labels,
                               modes.num_modes(), config.rho);
  const CoverageLoss cov = coverage_mass_kl_and_grad(
      assembly.samples.weight_logits, modes.labels, out.q_star);
  out.q = cov.q;
  out.coverage = cov.loss;
  out.loss += config.gamma * cov.loss;

  // Chain through the joint logits into the per-agent component logits:
  // d joint_logit_k / d logit^i_c = [c == tuple_k[i]] - w^i_c.
  for (int i = 0; i < pred.num_agents; ++i) {
    const std::vector<double> w = pred.weights(i);
    for (int k = 0; k < pred.num_components; ++k) {
      const double gk = config.gamma * cov.grad_scores[k];
      for (int c = 0; c < pred.num_components; ++c) {
        const double indicator = c == assembly.component_of[k][i] ? 1.0 : 0.0;
        out.grad[pred.logit_index(i, c)] += gk * (indicator - w[c]);
      }
    }
  }
  return out;
}

double min_ade(const GmmPrediction& pred, const JointTrajectory& truth) {
  check_pred(pred);
  check_truth(pred, truth);
  const JointAssembly assembly = joint_assembly(pred);
  double best = std::numeric_limits<double>::infinity();
  for (const JointTrajectory& sample : assembly.samples.trajectories) {
    double sum = 0.0;
    for (int t = 0; t < pred.horizon; ++t) {
      for (int i = 0; i < pred.num_agents; ++i) {
        sum += std::sqrt(squared_dist(sample.states[t][i],
                                      truth.states[t][i]));
      }
    }
    best = std::min(best, sum / (pred.horizon * pred.num_agents));
  }
  return best;
}

TrainResult train_toy_predictor(const TabularGame& game,
                                const AdvantageSource& src, int initial_state,
                                const JointTrajectory& ground_truth,
                                int num_components, const TrainConfig& config) {
  if (num_components < 1) {
    throw std::invalid_argument("train: num_components < 1");
  }
  std::vector<ScoredTrajectory> enumerated =
      enumerate_all_trajectories(game, initial_state, src);
  std::stable_sort(enumerated.begin(), enumerated.end(),
                   [](const ScoredTrajectory& a, const ScoredTrajectory& b) {
                     return a.log_prob > b.log_prob;
                   });

  // Means start on the top game trajectories so every mode is reachable.
  TrainResult result;
  result.pred =
      GmmPrediction::zeros(game.num_agents, num_components, game.horizon);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> jitter(0.0, config.init_noise);
  for (int k = 0; k < num_components; ++k) {
    const JointTrajectory& base =
        enumerated[k % enumerated.size()].trajectory;
    for (int i = 0; i < game.num_agents; ++i) {
      for (int t = 0; t < game.horizon; ++t) {
        result.pred.params[result.pred.mu_index(i, k, t, 0)] =
            base.states[t][i].x + jitter(rng);
        result.pred.params[result.pred.mu_index(i, k, t, 1)] =
            base.states[t][i].y + jitter(rng);
      }
    }
  }

  result.loss_curve.reserve(config.steps + 1);
  for (int step = 0; step < config.steps; ++step) {
    const TotalLoss tl =
        total_loss(result.pred, ground_truth, enumerated, config);
    if (!std::isfinite(tl.loss)) {
      throw std::runtime_error("train: loss diverged to " +
                               std::to_string(tl.loss) + " at step " +
                               std::to_string(step));
    }
    result.loss_curve.push_back(tl.loss);
    for (int p = 0; p < result.pred.param_count(); ++p) {
      double delta = config.learning_rate * tl.grad[p];
      if (config.max_step > 0.0) {
        delta = std::clamp(delta, -config.max_step, config.max_step);
      }
      result.pred.params[p] -= delta;
    }
    if (config.sigma_floor > 0.0) {
      const double floor = std::log(config.sigma_floor);
      for (int i = 0; i < game.num_agents; ++i) {
        for (int k = 0; k < num_components; ++k) {
          double& ls = result.pred.params[result.pred.log_sigma_index(i, k)];
          ls = std::max(ls, floor);
        }
      }
    }
  }

  // Final diagnostics; the coverage pipeline runs here even for gamma == 0 so
  // the metrics are comparable across the sweep.
  JointAssembly assembly = joint_assembly(result.pred);
  for (int k = 0; k < num_components; ++k) {
    double best_dist = std::numeric_limits<double>::infinity();
    double score = 0.0;
    for (const ScoredTrajectory& cand : enumerated) {
      const double d = trajectory_distance(assembly.samples.trajectories[k],
                                           cand.trajectory);
      if (d < best_dist) {
        best_dist = d;
        score = cand.log_prob;
      }
    }
    assembly.samples.advantages[k] = score;
  }
  const ModeSet modes = mean_shift_modes(assembly.samples, config.bandwidth,
                                         config.mean_shift_iterations);
  result.final_labels = modes.labels;
  result.final_q_star = ideal_histogram(
      assembly.samples.advantages, modes.labels, modes.num_modes(), config.rho);
  result.final_q = empirical_histogram(assembly.samples, modes.labels,
                                       modes.num_modes(),
                                       ScoreSource::kPredictorWeight);
  result.coverage_kl = kl_divergence(result.final_q, result.final_q_star);
  result.final_weights = softmax(assembly.samples.weight_logits);
  // Covered-game-mode count: enumerated trajectories above the probability
  // threshold are the scene's modes, and a mode is covered when the joint
  // samples within the clustering bandwidth of it carry enough weight.
  result.n_modes = 0;
  for (const ScoredTrajectory& cand : enumerated) {
    if (std::exp(cand.log_prob) <= config.mode_prob_threshold) break;
    double mass = 0.0;
    for (int k = 0; k < num_components; ++k) {
      if (trajectory_distance(assembly.samples.trajectories[k],
                              cand.trajectory) < config.bandwidth) {
        mass += result.final_weights[k];
      }
    }
    if (mass >= config.covered_mass) ++result.n_modes;
  }
  result.min_ade = min_ade(result.pred, ground_truth);
  const TotalLoss final_tl =
      total_loss(result.pred, ground_truth, enumerated, config);
  result.loss_curve.push_back(final_tl.loss);
  return result;
}

}  // namespace nashmodes
