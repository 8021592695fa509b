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

#include "nashmodes/irl.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nashmodes {

namespace {

void check_dims(const AdvantageModel::Dims& dims) {
  if (dims.horizon < 1 || dims.num_agents < 1 || dims.num_states < 1 ||
      static_cast<int>(dims.num_controls.size()) != dims.num_agents) {
    throw std::invalid_argument("AdvantageModel: invalid dimensions");
  }
  for (int nu : dims.num_controls) {
    if (nu < 1) throw std::invalid_argument("AdvantageModel: empty control set");
  }
}

}  // namespace

AdvantageModel AdvantageModel::tabular(const Dims& dims) {
  check_dims(dims);
  AdvantageModel m;
  m.dims_ = dims;
  m.control_offsets_.resize(dims.num_agents);
  int total = 0;
  for (int i = 0; i < dims.num_agents; ++i) {
    m.control_offsets_[i] = total;
    total += dims.num_states * dims.num_controls[i];
  }
  m.controls_total_ = total;
  m.params_.assign(static_cast<size_t>(dims.horizon) * total, 0.0);
  m.refresh();
  return m;
}

AdvantageModel AdvantageModel::linear(const Dims& dims, FeatureMap features,
                                      int feature_dim) {
  check_dims(dims);
  if (!features || feature_dim < 1) {
    throw std::invalid_argument("AdvantageModel: invalid feature map");
  }
  AdvantageModel m;
  m.dims_ = dims;
  m.features_ = std::move(features);
  m.control_offsets_.resize(dims.num_agents);
  int total = 0;
  for (int i = 0; i < dims.num_agents; ++i) {
    m.control_offsets_[i] = total;
    total += dims.num_states * dims.num_controls[i];
  }
  m.controls_total_ = total;
  m.params_.assign(feature_dim, 0.0);
  m.refresh();
  return m;
}

int AdvantageModel::tabular_index(int t, int agent, int state,
                                  int control) const {
  return t * controls_total_ + control_offsets_[agent] +
         state * dims_.num_controls[agent] + control;
}

void AdvantageModel::refresh() {
  const size_t q_size = static_cast<size_t>(dims_.horizon) * controls_total_;
  q_cache_.resize(q_size);
  value_cache_.assign(
      static_cast<size_t>(dims_.horizon) * dims_.num_agents * dims_.num_states,
      0.0);
  for (int t = 0; t < dims_.horizon; ++t) {
    for (int i = 0; i < dims_.num_agents; ++i) {
      const int nu = dims_.num_controls[i];
      for (int x = 0; x < dims_.num_states; ++x) {
        std::vector<double> row(nu);
        for (int u = 0; u < nu; ++u) {
          const int idx = tabular_index(t, i, x, u);
          double q;
          if (is_tabular()) {
            q = params_[idx];
          } else {
            const std::vector<double> phi = features_(t, i, x, u);
            if (phi.size() != params_.size()) {
              throw std::invalid_argument(
                  "AdvantageModel: feature vector size mismatch");
            }
            q = std::inner_product(phi.begin(), phi.end(), params_.begin(), 0.0);
          }
          q_cache_[idx] = q;
          row[u] = q;
        }
        value_cache_[(static_cast<size_t>(t) * dims_.num_agents + i) *
                         dims_.num_states +
                     x] = log_sum_exp(row);
      }
    }
  }
}

void AdvantageModel::set_params(const std::vector<double>& params) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("AdvantageModel: wrong parameter count");
  }
  params_ = params;
  refresh();
}

double AdvantageModel::q_value(int t, int agent, int state, int control) const {
  return q_cache_.at(tabular_index(t, agent, state, control));
}

double AdvantageModel::value(int t, int agent, int state) const {
  return value_cache_.at(
      (static_cast<size_t>(t) * dims_.num_agents + agent) * dims_.num_states +
      state);
}

double AdvantageModel::advantage(int t, int agent, int state,
                                 int control) const {
  return q_value(t, agent, state, control) - value(t, agent, state);
}

double AdvantageModel::policy(int t, int agent, int state, int control) const {
  return std::exp(advantage(t, agent, state, control));
}

void AdvantageModel::accumulate_q_gradient(int t, int agent, int state,
                                           int control, double coeff,
                                           std::vector<double>& grad) const {
  if (is_tabular()) {
    grad[tabular_index(t, agent, state, control)] += coeff;
  } else {
    const std::vector<double> phi = features_(t, agent, state, control);
    for (size_t d = 0; d < phi.size(); ++d) grad[d] += coeff * phi[d];
  }
}

double irl_loss(const AdvantageModel& model, const TrajectoryDataset& data) {
  if (data.trajectories.empty()) {
    throw std::invalid_argument("irl_loss: empty dataset");
  }
  const int T = model.horizon();
  const int I = model.num_agents();
  double total = 0.0;
  for (const JointTrajectory& traj : data.trajectories) {
    total += cumulative_advantage(model, traj);
  }
  return -total / (static_cast<double>(T) * I * data.trajectories.size());
}

std::vector<double> irl_gradient(const AdvantageModel& model,
                                 const TrajectoryDataset& data) {
  if (data.trajectories.empty()) {
    throw std::invalid_argument("irl_gradient: empty dataset");
  }
  const int T = model.horizon();
  const int I = model.num_agents();
  const double scale =
      1.0 / (static_cast<double>(T) * I * data.trajectories.size());
  std::vector<double> grad(model.params().size(), 0.0);
  for (const JointTrajectory& traj : data.trajectories) {
    for (int t = 0; t < T; ++t) {
      const int x = traj.state_ids[t];
      for (int i = 0; i < I; ++i) {
        const int taken = traj.controls[t][i];
        // d(-A)/dQ = policy - one-hot at the taken control.
        for (int u = 0; u < model.dims().num_controls[i]; ++u) {
          const double coeff =
              (model.policy(t, i, x, u) - (u == taken ? 1.0 : 0.0)) * scale;
          model.accumulate_q_gradient(t, i, x, u, coeff, grad);
        }
      }
    }
  }
  return grad;
}

FitResult fit_advantage_model(const TrajectoryDataset& data,
                              const AdvantageModel::Dims& dims,
                              const FitConfig& config) {
  if (data.trajectories.empty()) {
    throw std::invalid_argument("fit_advantage_model: empty dataset");
  }
  AdvantageModel model = AdvantageModel::tabular(dims);
  if (config.init_scale > 0.0) {
    std::mt19937_64 rng(config.init_seed);
    std::normal_distribution<double> noise(0.0, config.init_scale);
    std::vector<double> params = model.params();
    for (double& p : params) p = noise(rng);
    model.set_params(params);
  }

  // The loss only touches the data through visit counts, so aggregate once
  // and run every descent step on the counts. This matches irl_loss and
  // irl_gradient exactly.
  std::vector<double> action_counts(model.params().size(), 0.0);
  for (const JointTrajectory& traj : data.trajectories) {
    if (traj.horizon() != dims.horizon ||
        static_cast<int>(traj.state_ids.size()) != dims.horizon) {
      throw std::invalid_argument(
          "fit_advantage_model: trajectory does not match the dimensions");
    }
    for (int t = 0; t < dims.horizon; ++t) {
      for (int i = 0; i < dims.num_agents; ++i) {
        action_counts[model.tabular_index(t, i, traj.state_ids[t],
                                          traj.controls[t][i])] += 1.0;
      }
    }
  }
  const double scale = 1.0 / (static_cast<double>(dims.horizon) *
                              dims.num_agents * data.trajectories.size());

  FitResult result{std::move(model), {}};
  std::vector<double> grad(action_counts.size(), 0.0);
  for (int step = 0; step <= config.steps; ++step) {
    double loss = 0.0;
    for (int t = 0; t < dims.horizon; ++t) {
      for (int i = 0; i < dims.num_agents; ++i) {
        const int nu = dims.num_controls[i];
        for (int x = 0; x < dims.num_states; ++x) {
          double state_visits = 0.0;
          for (int u = 0; u < nu; ++u) {
            state_visits +=
                action_counts[result.model.tabular_index(t, i, x, u)];
          }
          if (state_visits == 0.0) continue;
          for (int u = 0; u < nu; ++u) {
            const int idx = result.model.tabular_index(t, i, x, u);
            loss -= scale * action_counts[idx] *
                    result.model.advantage(t, i, x, u);
            grad[idx] = scale * (state_visits *
                                     result.model.policy(t, i, x, u) -
                                 action_counts[idx]);
          }
        }
      }
    }
    if (!std::isfinite(loss)) {
      throw std::runtime_error("fit_advantage_model: non-finite loss at step " +
                               std::to_string(step));
    }
    result.loss_curve.push_back(loss);
    if (step == config.steps) break;
    std::vector<double> params = result.model.params();
    for (size_t k = 0; k < params.size(); ++k) {
      params[k] -= config.learning_rate * grad[k];
    }
    result.model.set_params(params);
  }
  return result;
}

double verify_partition_unity(const AdvantageSource& src,
                              const TabularGame& game, int initial_state,
                              std::int64_t cap) {
  const std::vector<ScoredTrajectory> all =
      enumerate_all_trajectories(game, initial_state, src, cap);
  double sum = 0.0;
  for (const ScoredTrajectory& s : all) sum += std::exp(s.log_prob);
  return sum;
}

CrossEntropyCheck verify_cross_entropy_equivalence(
    const AdvantageSource& model, const SoftEquilibrium& true_eq,
    const TabularGame& game, int initial_state, int n_samples,
    std::uint64_t seed, std::int64_t cap) {
  if (n_samples < 2) {
    throw std::invalid_argument("verify_cross_entropy_equivalence: n < 2");
  }
  // Exact H(p, q_theta) over the enumerable trajectory space.
  const std::vector<ScoredTrajectory> all =
      enumerate_all_trajectories(game, initial_state, true_eq, cap);
  double rhs = 0.0;
  for (const ScoredTrajectory& s : all) {
    const double p = std::exp(s.log_prob);
    if (p > 0.0) rhs -= p * cumulative_advantage(model, s.trajectory);
  }

  // Monte-Carlo estimate of the same quantity from rollouts of the true
  // policy; equals T*I*irl_loss on the sampled dataset.
  double mean = 0.0;
  double m2 = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const JointTrajectory traj = rollout(true_eq, game, initial_state, seed + s);
    const double v = -cumulative_advantage(model, traj);
    const double delta = v - mean;
    mean += delta / (s + 1);
    m2 += delta * (v - mean);
  }
  const double variance = m2 / (n_samples - 1);
  CrossEntropyCheck check;
  check.lhs = mean;
  check.rhs = rhs;
  check.stderr_ = std::sqrt(variance / n_samples);
  return check;
}

}  // namespace nashmodes
