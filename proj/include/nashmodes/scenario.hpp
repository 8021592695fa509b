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

#ifndef NASHMODES_SCENARIO_HPP_
#define NASHMODES_SCENARIO_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nashmodes/game.hpp"
#include "nashmodes/types.hpp"

namespace nashmodes {

// Interaction archetypes for the synthetic crossing micro-scenes.
enum class Archetype { kYield, kFollow, kLowTtc };

std::string archetype_name(Archetype archetype);
// Throws std::runtime_error naming the tag if it is unknown.
Archetype parse_archetype(const std::string& name);

struct ScenarioParams {
  int horizon = 4;          // control steps; brute-force verification needs <= 8
  double cell_size = 12.0;  // meters per grid cell
  double dt = 0.5;          // seconds per step
  double go_reward = 4.0;   // progress reward per advancing step
  double reward_jitter = 0.05;  // relative go-reward jitter drawn from the seed
  // Yield calibration: the conflict penalty is bisected until the first-step
  // go probability at the symmetric start state hits this target, which puts
  // exactly two trajectories above 0.2.
  double target_branch_prob = 0.42;
  int bisect_iters = 20;
  double conflict_lo = 4.0;
  double conflict_hi = 25.0;
};

struct Scenario {
  std::string id;
  Archetype archetype = Archetype::kYield;
  TabularGame game;
  int initial_state = 0;
  JointTrajectory ground_truth;
  std::uint64_t seed = 0;
  double dt = 0.5;
  // Lane centerlines in meters, for rendering only.
  std::vector<std::vector<std::array<double, 2>>> map_polylines;
};

// Deterministic given (archetype, params, seed). The yield archetype is
// calibrated and then verified by exact enumeration: exactly two joint
// trajectories carry probability > 0.2 and their endpoints are more than 10 m
// apart; failure to verify throws std::runtime_error. The ground truth is one
// rollout at the scenario seed.
Scenario generate_scenario(Archetype archetype, const ScenarioParams& params,
                           std::uint64_t seed);

// Lossless JSON round trip ("schema_version": 1).
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace nashmodes

#endif  // NASHMODES_SCENARIO_HPP_
