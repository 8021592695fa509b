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

#include "nashmodes/game.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>

namespace nashmodes {

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

int TabularGame::num_joint_controls() const {
  int n = 1;
  for (int i = 0; i < num_agents; ++i) n *= num_controls(i);
  return n;
}

int TabularGame::flat_control(const JointControl& u) const {
  if (static_cast<int>(u.size()) != num_agents) {
    throw std::invalid_argument("flat_control: wrong joint control size");
  }
  int flat = 0;
  int stride = 1;
  for (int i = 0; i < num_agents; ++i) {
    if (u[i] < 0 || u[i] >= num_controls(i)) {
      throw std::invalid_argument("flat_control: control index out of range");
    }
    flat += u[i] * stride;
    stride *= num_controls(i);
  }
  return flat;
}

JointControl TabularGame::decode_control(int flat) const {
  JointControl u(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    u[i] = flat % num_controls(i);
    flat /= num_controls(i);
  }
  return u;
}

void TabularGame::validate() const {
  if (num_agents < 1) throw std::invalid_argument("game: num_agents < 1");
  if (horizon < 1) throw std::invalid_argument("game: horizon < 1");
  if (states.empty()) throw std::invalid_argument("game: empty state set");
  if (static_cast<int>(control_names.size()) != num_agents) {
    throw std::invalid_argument("game: control_names size != num_agents");
  }
  for (int i = 0; i < num_agents; ++i) {
    if (control_names[i].empty()) {
      throw std::invalid_argument("game: agent has empty control set");
    }
  }
  const int nx = num_states();
  const int nf = num_joint_controls();
  for (const JointState& s : states) {
    if (static_cast<int>(s.size()) != num_agents) {
      throw std::invalid_argument("game: state with wrong agent count");
    }
    for (const AgentState& a : s) {
      if (!std::isfinite(a.x) || !std::isfinite(a.y) ||
          !std::isfinite(a.speed) || !std::isfinite(a.heading)) {
        throw std::invalid_argument("game: non-finite state coordinate");
      }
    }
  }
  if (static_cast<int>(transitions.size()) != nx) {
    throw std::invalid_argument("game: transitions rows != num states");
  }
  for (const auto& row : transitions) {
    if (static_cast<int>(row.size()) != nf) {
      throw std::invalid_argument("game: transition row has wrong arity");
    }
    for (int next : row) {
      if (next < 0 || next >= nx) {
        throw std::invalid_argument("game: transition leaves the state set");
      }
    }
  }
  if (static_cast<int>(rewards.size()) != num_agents) {
    throw std::invalid_argument("game: rewards outer size != num_agents");
  }
  for (const auto& per_state : rewards) {
    if (static_cast<int>(per_state.size()) != nx) {
      throw std::invalid_argument("game: reward table has wrong state count");
    }
    for (const auto& row : per_state) {
      if (static_cast<int>(row.size()) != nf) {
        throw std::invalid_argument("game: reward row has wrong arity");
      }
      for (double r : row) {
        if (!std::isfinite(r)) {
          throw std::invalid_argument("game: non-finite reward");
        }
      }
    }
  }
}

SoftEquilibrium solve_soft_equilibrium(const TabularGame& game,
                                       const SolveOptions& options) {
  game.validate();
  if (options.inner_iters < 1) {
    throw std::invalid_argument("solve_soft_equilibrium: inner_iters < 1");
  }
  const int T = game.horizon;
  const int I = game.num_agents;
  const int nx = game.num_states();
  const int nf = game.num_joint_controls();

  // Joint controls decoded once.
  std::vector<JointControl> decoded(nf);
  for (int f = 0; f < nf; ++f) decoded[f] = game.decode_control(f);

  SoftEquilibrium eq;
  eq.horizon_ = T;
  eq.num_agents_ = I;
  eq.q_values.resize(T);
  eq.values.resize(T);
  eq.policies.resize(T);
  eq.advantages.resize(T);

  // values_next[i][x] is V^i at t+1 (zero beyond the horizon).
  std::vector<std::vector<double>> values_next(I, std::vector<double>(nx, 0.0));

  double final_residual = 0.0;
  for (int t = T - 1; t >= 0; --t) {
    std::vector<std::vector<std::vector<double>>> q(I);
    std::vector<std::vector<std::vector<double>>> pi(I);
    for (int i = 0; i < I; ++i) {
      const int nu = game.num_controls(i);
      q[i].assign(nx, std::vector<double>(nu, 0.0));
      pi[i].assign(nx, std::vector<double>(nu, 1.0 / nu));
    }
    std::vector<std::vector<double>> v(I, std::vector<double>(nx, 0.0));

    double residual = 0.0;
    for (int round = 0; round < options.inner_iters; ++round) {
      // Expected action values under the previous round's policies.
      std::vector<std::vector<std::vector<double>>> q_new(I);
      for (int i = 0; i < I; ++i) {
        q_new[i].assign(nx, std::vector<double>(game.num_controls(i), 0.0));
      }
      for (int x = 0; x < nx; ++x) {
        for (int f = 0; f < nf; ++f) {
          const JointControl& u = decoded[f];
          const int next = game.transitions[x][f];
          for (int i = 0; i < I; ++i) {
            double prob = 1.0;
            for (int j = 0; j < I; ++j) {
              if (j != i) prob *= pi[j][x][u[j]];
            }
            q_new[i][x][u[i]] +=
                prob * (game.rewards[i][x][f] + values_next[i][next]);
          }
        }
      }
      residual = 0.0;
      for (int i = 0; i < I; ++i) {
        const int nu = game.num_controls(i);
        for (int x = 0; x < nx; ++x) {
          for (int u = 0; u < nu; ++u) {
            q[i][x][u] = (round == 0)
                             ? q_new[i][x][u]
                             : (1.0 - options.damping) * q[i][x][u] +
                                   options.damping * q_new[i][x][u];
          }
          const double value = log_sum_exp(q[i][x]);
          v[i][x] = value;
          for (int u = 0; u < nu; ++u) {
            const double p = std::exp(q[i][x][u] - value);
            residual = std::max(residual, std::abs(p - pi[i][x][u]));
            pi[i][x][u] = p;
          }
        }
      }
      // The per-round change bounds the remaining distance to the fixed point
      // by residual * (1 - damping) / damping, so stopping three decades below
      // the tolerance leaves the stored tables converged well past it.
      if (round > 0 && residual <= options.tolerance * 1e-3) break;
    }
    final_residual = std::max(final_residual, residual);

    eq.q_values[t] = q;
    eq.values[t] = v;
    eq.policies[t] = pi;
    eq.advantages[t].resize(I);
    for (int i = 0; i < I; ++i) {
      const int nu = game.num_controls(i);
      eq.advantages[t][i].assign(nx, std::vector<double>(nu, 0.0));
      for (int x = 0; x < nx; ++x) {
        for (int u = 0; u < nu; ++u) {
          eq.advantages[t][i][x][u] = q[i][x][u] - v[i][x];
        }
      }
    }
    values_next = v;
  }

  eq.residual = final_residual;
  eq.converged = final_residual <= options.tolerance;
  if (!eq.converged && options.warn_on_nonconvergence) {
    std::cerr << "warning: soft equilibrium inner iteration residual "
              << final_residual << " exceeds tolerance " << options.tolerance
              << "\n";
  }
  return eq;
}

std::pair<double, double> advantage_and_policy(const SoftEquilibrium& eq, int t,
                                               int agent, int state,
                                               int control) {
  if (t < 0 || t >= eq.horizon_ || agent < 0 || agent >= eq.num_agents_) {
    throw std::out_of_range("advantage_and_policy: index out of range");
  }
  const auto& per_agent = eq.advantages[t][agent];
  if (state < 0 || state >= static_cast<int>(per_agent.size()) || control < 0 ||
      control >= static_cast<int>(per_agent[state].size())) {
    throw std::out_of_range("advantage_and_policy: index out of range");
  }
  const double a = per_agent[state][control];
  return {a, std::exp(a)};
}

namespace {

void check_dynamics(const TabularGame& game, const JointTrajectory& traj) {
  if (traj.horizon() != game.horizon ||
      static_cast<int>(traj.state_ids.size()) != game.horizon ||
      static_cast<int>(traj.controls.size()) != game.horizon) {
    throw std::invalid_argument(
        "trajectory length does not match the game horizon");
  }
  for (int t = 0; t + 1 < game.horizon; ++t) {
    const int f = game.flat_control(traj.controls[t]);
    if (game.transitions[traj.state_ids[t]][f] != traj.state_ids[t + 1]) {
      throw std::invalid_argument(
          "trajectory is inconsistent with the game dynamics at step " +
          std::to_string(t));
    }
  }
}

}  // namespace

double trajectory_log_prob(const AdvantageSource& src, const TabularGame& game,
                           const JointTrajectory& traj) {
  check_dynamics(game, traj);
  return cumulative_advantage(src, traj);
}

double cumulative_advantage(const AdvantageSource& src,
                            const JointTrajectory& traj) {
  if (traj.horizon() != src.horizon()) {
    throw std::invalid_argument(
        "cumulative_advantage: trajectory length does not match the horizon");
  }
  double total = 0.0;
  for (int t = 0; t < traj.horizon(); ++t) {
    for (int i = 0; i < src.num_agents(); ++i) {
      total += src.advantage(t, i, traj.state_ids[t], traj.controls[t][i]);
    }
  }
  return total;
}

JointTrajectory rollout(const SoftEquilibrium& eq, const TabularGame& game,
                        int initial_state, std::uint64_t seed) {
  if (initial_state < 0 || initial_state >= game.num_states()) {
    throw std::invalid_argument("rollout: initial state out of range");
  }
  std::mt19937_64 rng(seed);
  // Inverse-CDF sampling on a fixed control order; std::discrete_distribution
  // is implementation-defined and would break cross-platform determinism.
  auto sample = [&rng](const std::vector<double>& probs) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = unit(rng);
    double acc = 0.0;
    for (size_t u = 0; u < probs.size(); ++u) {
      acc += probs[u];
      if (r < acc) return static_cast<int>(u);
    }
    return static_cast<int>(probs.size()) - 1;
  };

  JointTrajectory traj;
  int state = initial_state;
  for (int t = 0; t < game.horizon; ++t) {
    JointControl u(game.num_agents);
    for (int i = 0; i < game.num_agents; ++i) {
      u[i] = sample(eq.policies[t][i][state]);
    }
    traj.states.push_back(game.states[state]);
    traj.controls.push_back(u);
    traj.state_ids.push_back(state);
    state = game.transitions[state][game.flat_control(u)];
  }
  return traj;
}

std::vector<ScoredTrajectory> enumerate_all_trajectories(
    const TabularGame& game, int initial_state, const AdvantageSource& src,
    std::int64_t cap) {
  game.validate();
  if (initial_state < 0 || initial_state >= game.num_states()) {
    throw std::invalid_argument("enumerate: initial state out of range");
  }
  const int nf = game.num_joint_controls();
  double total = std::pow(static_cast<double>(nf), game.horizon);
  if (total > static_cast<double>(cap)) {
    throw std::invalid_argument(
        "enumeration would produce " + std::to_string(total) +
        " trajectories, exceeding the cap of " + std::to_string(cap));
  }

  std::vector<ScoredTrajectory> out;
  out.reserve(static_cast<size_t>(total));
  JointTrajectory traj;

  // Depth-first expansion of all joint control sequences.
  std::function<void(int, int, double)> expand = [&](int t, int state,
                                                     double log_prob) {
    if (t == game.horizon) {
      out.push_back({traj, log_prob});
      return;
    }
    for (int f = 0; f < nf; ++f) {
      const JointControl u = game.decode_control(f);
      double lp = log_prob;
      for (int i = 0; i < game.num_agents; ++i) {
        lp += src.advantage(t, i, state, u[i]);
      }
      traj.states.push_back(game.states[state]);
      traj.controls.push_back(u);
      traj.state_ids.push_back(state);
      expand(t + 1, game.transitions[state][f], lp);
      traj.states.pop_back();
      traj.controls.pop_back();
      traj.state_ids.pop_back();
    }
  };
  expand(0, initial_state, 0.0);
  return out;
}

}  // namespace nashmodes
