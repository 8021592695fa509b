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

#ifndef NASHMODES_IRL_HPP_
#define NASHMODES_IRL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nashmodes/game.hpp"
#include "nashmodes/types.hpp"

namespace nashmodes {

// Parametric advantage model. The parameters define Q; V = logsumexp_u Q and
// A = Q - V are derived, so exp(A) is a normalized policy for every parameter
// setting, not just at optima.
//
// Tabular representation: one parameter per (t, agent, state, control) entry.
// Linear representation: Q(t, i, x, u) = theta . features(t, i, x, u).
class AdvantageModel final : public AdvantageSource {
 public:
  struct Dims {
    int horizon = 0;
    int num_agents = 0;
    int num_states = 0;
    std::vector<int> num_controls;  // per agent
  };

  using FeatureMap =
      std::function<std::vector<double>(int t, int agent, int state, int control)>;

  static AdvantageModel tabular(const Dims& dims);
  static AdvantageModel linear(const Dims& dims, FeatureMap features,
                               int feature_dim);

  int horizon() const override { return dims_.horizon; }
  int num_agents() const override { return dims_.num_agents; }
  const Dims& dims() const { return dims_; }

  double advantage(int t, int agent, int state, int control) const override;
  double q_value(int t, int agent, int state, int control) const;
  double value(int t, int agent, int state) const;
  double policy(int t, int agent, int state, int control) const;

  const std::vector<double>& params() const { return params_; }
  void set_params(const std::vector<double>& params);

  bool is_tabular() const { return features_ == nullptr; }
  // Index of the tabular parameter backing Q(t, agent, state, control).
  int tabular_index(int t, int agent, int state, int control) const;

  // Accumulates d q_value(t,agent,state,control) / d params into grad,
  // scaled by `coeff`.
  void accumulate_q_gradient(int t, int agent, int state, int control,
                             double coeff, std::vector<double>& grad) const;

 private:
  AdvantageModel() = default;
  void refresh();  // recompute the value cache from params

  Dims dims_;
  std::vector<double> params_;
  FeatureMap features_;
  // Cached Q and V tables; rebuilt by set_params.
  std::vector<double> q_cache_;       // [t][i][x][u] flattened
  std::vector<double> value_cache_;   // [t][i][x] flattened
  std::vector<int> control_offsets_;  // per agent, offset into the u axis
  int controls_total_ = 0;
};

struct TrajectoryDataset {
  std::vector<JointTrajectory> trajectories;
  std::string game_id;
  std::uint64_t seed = 0;
};

// Mean over trajectories of -(1/(T*I)) sum_t sum_i A(x_t, u_t^i).
double irl_loss(const AdvantageModel& model, const TrajectoryDataset& data);

// Analytic gradient of irl_loss w.r.t. the model parameters. For the tabular
// representation this is (policy - empirical one-hot) / (T*I*N) per visited
// entry.
std::vector<double> irl_gradient(const AdvantageModel& model,
                                 const TrajectoryDataset& data);

struct FitConfig {
  double learning_rate = 0.1;
  int steps = 200;
  std::uint64_t init_seed = 0;
  double init_scale = 0.0;  // stddev of the random initialization
};

struct FitResult {
  AdvantageModel model;
  std::vector<double> loss_curve;
};

// Plain fixed-step gradient descent on irl_loss over a tabular model.
FitResult fit_advantage_model(const TrajectoryDataset& data,
                              const AdvantageModel::Dims& dims,
                              const FitConfig& config);

// Sum over all enumerable trajectories of exp(A(tau)). Lemma: the result is 1
// for any structurally normalized advantage source.
double verify_partition_unity(const AdvantageSource& src,
                              const TabularGame& game, int initial_state,
                              std::int64_t cap = kDefaultEnumerationCap);

struct CrossEntropyCheck {
  double lhs = 0.0;     // T*I*irl_loss on rollouts from the true policy
  double rhs = 0.0;     // exact H(p, q_theta) by enumeration
  double stderr_ = 0.0;  // Monte-Carlo standard error of lhs
};

// Checks that the sampled imitation loss matches the exact cross entropy
// between the true trajectory distribution and the model's.
CrossEntropyCheck verify_cross_entropy_equivalence(
    const AdvantageSource& model, const SoftEquilibrium& true_eq,
    const TabularGame& game, int initial_state, int n_samples,
    std::uint64_t seed, std::int64_t cap = kDefaultEnumerationCap);

}  // namespace nashmodes

#endif  // NASHMODES_IRL_HPP_
