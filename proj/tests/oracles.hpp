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
//
// Independent reference implementations used only by the tests. They favor
// the most literal possible formulation over speed and share no code with the
// library beyond the data types.

#ifndef NASHMODES_TESTS_ORACLES_HPP_
#define NASHMODES_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "nashmodes/game.hpp"
#include "nashmodes/modes.hpp"
#include "nashmodes/types.hpp"

namespace nashmodes::test_oracle {

// Policies [t][agent][state][control] solved by literal heavily damped
// fixed-point iteration, independent of the library solver.
struct OraclePolicies {
  std::vector<std::vector<std::vector<std::vector<double>>>> pi;
  std::vector<std::vector<std::vector<double>>> value;  // [t][agent][state]
};

inline OraclePolicies solve_reference(const TabularGame& game) {
  const int T = game.horizon;
  const int I = game.num_agents;
  const int nx = game.num_states();
  const int nf = game.num_joint_controls();

  OraclePolicies out;
  out.pi.resize(T);
  out.value.resize(T + 1);
  out.value[T].assign(I, std::vector<double>(nx, 0.0));

  for (int t = T - 1; t >= 0; --t) {
    std::vector<std::vector<std::vector<double>>> pi(I);
    for (int i = 0; i < I; ++i) {
      pi[i].assign(nx, std::vector<double>(game.num_controls(i),
                                           1.0 / game.num_controls(i)));
    }
    std::vector<std::vector<std::vector<double>>> q(I);
    std::vector<std::vector<double>> v(I, std::vector<double>(nx, 0.0));
    const double lambda = 0.05;
    for (int round = 0; round < 20000; ++round) {
      for (int i = 0; i < I; ++i) {
        std::vector<std::vector<double>> qi(
            nx, std::vector<double>(game.num_controls(i), 0.0));
        for (int x = 0; x < nx; ++x) {
          for (int f = 0; f < nf; ++f) {
            const JointControl u = game.decode_control(f);
            double others = 1.0;
            for (int j = 0; j < I; ++j) {
              if (j != i) others *= pi[j][x][u[j]];
            }
            qi[x][u[i]] += others * (game.rewards[i][x][f] +
                                     out.value[t + 1][i][game.transitions[x][f]]);
          }
        }
        if (round == 0) {
          q[i] = qi;
        } else {
          for (int x = 0; x < nx; ++x) {
            for (int u = 0; u < game.num_controls(i); ++u) {
              q[i][x][u] = (1.0 - lambda) * q[i][x][u] + lambda * qi[x][u];
            }
          }
        }
        for (int x = 0; x < nx; ++x) {
          double m = q[i][x][0];
          for (double qq : q[i][x]) m = std::max(m, qq);
          double z = 0.0;
          for (double qq : q[i][x]) z += std::exp(qq - m);
          v[i][x] = m + std::log(z);
          for (int u = 0; u < game.num_controls(i); ++u) {
            pi[i][x][u] = std::exp(q[i][x][u] - v[i][x]);
          }
        }
      }
    }
    out.pi[t] = pi;
    out.value[t] = v;
  }
  out.value.resize(T);  // keep only the in-horizon values
  return out;
}

// Sum over all joint control sequences of the product of policy
// probabilities; 1 for any normalized policy set.
inline double total_probability(const TabularGame& game,
                                const OraclePolicies& oracle,
                                int initial_state) {
  const int nf = game.num_joint_controls();
  double total = 0.0;
  std::function<void(int, int, double)> walk = [&](int t, int x, double p) {
    if (t == game.horizon) {
      total += p;
      return;
    }
    for (int f = 0; f < nf; ++f) {
      const JointControl u = game.decode_control(f);
      double step = 1.0;
      for (int i = 0; i < game.num_agents; ++i) step *= oracle.pi[t][i][x][u[i]];
      walk(t + 1, game.transitions[x][f], p * step);
    }
  };
  walk(0, initial_state, 1.0);
  return total;
}

// Restricted mean shift solved by running each pointer chain all the way to
// its fixed point, however many hops that takes.
inline std::vector<int> mean_shift_fixed_points(
    const std::vector<std::vector<double>>& dist,
    const std::vector<double>& scores, double bandwidth) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> anchor(n);
  for (int s = 0; s < n; ++s) {
    int a = s;
    while (true) {
      int best = a;
      for (int j = 0; j < n; ++j) {
        if (dist[a][j] < bandwidth && scores[j] > scores[best]) best = j;
      }
      if (best == a) break;
      a = best;
    }
    anchor[s] = a;
  }
  return anchor;
}

// Central finite differences of f at params.
inline std::vector<double> finite_difference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> params, double step = 1e-5) {
  std::vector<double> grad(params.size());
  for (size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + step;
    const double hi = f(params);
    params[p] = saved - step;
    const double lo = f(params);
    params[p] = saved;
    grad[p] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

inline double max_relative_error(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t p = 0; p < a.size(); ++p) {
    const double scale = std::max({std::abs(a[p]), std::abs(b[p]), 1e-8});
    worst = std::max(worst, std::abs(a[p] - b[p]) / scale);
  }
  return worst;
}

// Quadratic-time farthest point sampling, recomputing every min-distance from
// scratch at each pick.
inline std::vector<int> fps_reference(const SampleSet& samples, int count) {
  const int n = samples.size();
  std::vector<int> order(n);
  for (int s = 0; s < n; ++s) order[s] = s;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return samples.weight_logits[a] > samples.weight_logits[b];
  });
  std::vector<int> picked{order.front()};
  while (static_cast<int>(picked.size()) < std::min(count, n)) {
    int best = -1;
    double best_d = -1.0;
    for (int s = 0; s < n; ++s) {
      if (std::find(picked.begin(), picked.end(), s) != picked.end()) continue;
      double d = std::numeric_limits<double>::infinity();
      for (int p : picked) {
        d = std::min(d, trajectory_distance(samples.trajectories[s],
                                            samples.trajectories[p]));
      }
      if (d > best_d) {
        best_d = d;
        best = s;
      }
    }
    picked.push_back(best);
  }
  return picked;
}

// The 3-position, 2-step crossing game used as a fixed oracle fixture.
inline TabularGame chicken_game() {
  TabularGame game;
  game.id = "chicken";
  game.num_agents = 2;
  game.horizon = 2;
  game.control_names = {{"wait", "go"}, {"wait", "go"}};
  const int nx = 9;
  game.states.resize(nx);
  game.transitions.assign(nx, std::vector<int>(4, 0));
  game.rewards.assign(2, std::vector<std::vector<double>>(
                             nx, std::vector<double>(4, 0.0)));
  for (int p1 = 0; p1 <= 2; ++p1) {
    for (int p2 = 0; p2 <= 2; ++p2) {
      const int x = p1 * 3 + p2;
      game.states[x] = {{12.0 * p1, 0.0, 0.0, 0.0},
                        {0.0, 12.0 * p2, 0.0, 0.0}};
      for (int f = 0; f < 4; ++f) {
        const int u1 = f % 2;
        const int u2 = f / 2;
        const int n1 = std::min(p1 + u1, 2);
        const int n2 = std::min(p2 + u2, 2);
        game.transitions[x][f] = n1 * 3 + n2;
        const bool conflict = n1 == 1 && n2 == 1;
        game.rewards[0][x][f] = conflict ? -5.0 : (u1 ? 1.0 : 0.0);
        game.rewards[1][x][f] = conflict ? -5.0 : (u2 ? 1.0 : 0.0);
      }
    }
  }
  return game;
}

// Uniformly random small game: random ring-ish transitions and rewards in
// [-2, 2]. Deterministic given the seed.
inline TabularGame random_game(std::uint64_t seed, int num_agents = 2,
                               int num_states = 4, int horizon = 3,
                               int num_controls = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> reward(-2.0, 2.0);
  std::uniform_int_distribution<int> next_state(0, num_states - 1);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);

  TabularGame game;
  game.id = "random-" + std::to_string(seed);
  game.num_agents = num_agents;
  game.horizon = horizon;
  game.control_names.assign(
      num_agents, std::vector<std::string>(num_controls, "u"));
  for (auto& names : game.control_names) {
    for (size_t u = 0; u < names.size(); ++u) names[u] += std::to_string(u);
  }
  int nf = 1;
  for (int i = 0; i < num_agents; ++i) nf *= num_controls;
  game.states.resize(num_states);
  for (JointState& s : game.states) {
    s.resize(num_agents);
    for (AgentState& a : s) {
      a.x = coord(rng);
      a.y = coord(rng);
    }
  }
  game.transitions.assign(num_states, std::vector<int>(nf, 0));
  game.rewards.assign(num_agents, std::vector<std::vector<double>>(
                                      num_states, std::vector<double>(nf, 0.0)));
  for (int x = 0; x < num_states; ++x) {
    for (int f = 0; f < nf; ++f) {
      game.transitions[x][f] = next_state(rng);
      for (int i = 0; i < num_agents; ++i) {
        game.rewards[i][x][f] = reward(rng);
      }
    }
  }
  return game;
}

}  // namespace nashmodes::test_oracle

#endif  // NASHMODES_TESTS_ORACLES_HPP_
