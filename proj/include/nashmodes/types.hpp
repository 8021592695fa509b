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

#ifndef NASHMODES_TYPES_HPP_
#define NASHMODES_TYPES_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nashmodes {

// Planar kinematic record for one agent at one timestep. Positions are in
// meters, speed in m/s, heading in radians.
struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double heading = 0.0;
};

// Joint state of all agents at one timestep.
using JointState = std::vector<AgentState>;

// One control index per agent, each into that agent's finite control set.
using JointControl = std::vector<int>;

// A length-T sequence of joint states and joint controls.
//
// Trajectories produced by a TabularGame additionally carry the game state id
// at every timestep in `state_ids` (size T). Trajectories that come from a
// continuous predictor leave `state_ids` empty; only the kinematic `states`
// are meaningful for those.
struct JointTrajectory {
  std::vector<JointState> states;    // size T
  std::vector<JointControl> controls;  // size T
  std::vector<int> state_ids;          // size T, or empty for continuous paths

  int horizon() const { return static_cast<int>(states.size()); }
  int num_agents() const {
    return states.empty() ? 0 : static_cast<int>(states.front().size());
  }
};

inline double squared_dist(const AgentState& a, const AgentState& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Average over agents of the Euclidean distance between final positions.
inline double trajectory_distance(const JointTrajectory& a,
                                  const JointTrajectory& b) {
  if (a.num_agents() != b.num_agents()) {
    throw std::invalid_argument("trajectory_distance: agent count mismatch (" +
                                std::to_string(a.num_agents()) + " vs " +
                                std::to_string(b.num_agents()) + ")");
  }
  if (a.states.empty() || b.states.empty()) {
    throw std::invalid_argument("trajectory_distance: empty trajectory");
  }
  const JointState& ea = a.states.back();
  const JointState& eb = b.states.back();
  double sum = 0.0;
  for (size_t i = 0; i < ea.size(); ++i) {
    sum += std::sqrt(squared_dist(ea[i], eb[i]));
  }
  return sum / static_cast<double>(ea.size());
}

}  // namespace nashmodes

#endif  // NASHMODES_TYPES_HPP_
