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

#ifndef NASHMODES_DIVERSITY_HPP_
#define NASHMODES_DIVERSITY_HPP_

#include <array>
#include <utility>
#include <vector>

#include "nashmodes/modes.hpp"
#include "nashmodes/types.hpp"

namespace nashmodes {

inline constexpr double kDefaultProximityRadius = 2.0;  // meters
inline constexpr double kDefaultTtcThreshold = 3.0;     // seconds
inline constexpr double kFollowMinDuration = 1.0;       // seconds

enum class LabelCategory { kUtilityBin, kYieldCount, kFollowCount, kTtcCount };

// Discrete interaction label: a bin index within a declared one-hot width.
struct SemanticLabel {
  LabelCategory category;
  int bin = 0;
  int width = 1;
};

// Directed yield relations between agents; edge (i, j) means i yields to j.
struct YieldGraph {
  int num_agents = 0;
  std::vector<std::pair<int, int>> edges;
};

// Shannon entropy (nats) of the weight mass bucketed by label bin.
// Weights must be non-negative and not all zero.
double semantic_entropy(const std::vector<SemanticLabel>& labels,
                        const std::vector<double>& weights);

// Boltzmann probability exp(advantage) clamped to [0,1], binned into 10
// uniform intervals.
SemanticLabel label_utility_bin(double cumulative_advantage);

struct PairInteraction {
  bool yield_ij = false;  // i yields to j
  bool yield_ji = false;
  bool follow = false;
};

// Detects yield/follow between two agents' paths sampled at `dt` seconds.
// "Intersect" at time t means one agent's position comes within
// `proximity_radius` of the other agent's swept path so far. A closed
// intersection window shorter than one second is a yield (the later arrival
// at the conflict point yields); a window of at least one second is a follow.
PairInteraction label_yield_follow(const std::vector<std::array<double, 2>>& path_i,
                                   const std::vector<std::array<double, 2>>& path_j,
                                   double proximity_radius, double dt);

// Counts the agents involved in any time-to-collision event below the
// threshold; the bin is that count, with width num_agents + 1.
SemanticLabel label_ttc(const JointTrajectory& traj, double dt,
                        double ttc_threshold = kDefaultTtcThreshold);

struct YieldFilterResult {
  YieldGraph graph;
  bool passes = false;
};

// Builds the yield graph from per-ordered-pair yield flags and checks for at
// least k yield interactions.
YieldFilterResult yield_graph_and_filter(
    int num_agents, const std::vector<std::pair<int, int>>& yield_edges, int k);

// Number of distinct mode labels among the selected samples.
int mode_coverage_count(const std::vector<int>& selection,
                        const std::vector<int>& labels);

// Convenience: per-agent planar path of a trajectory.
std::vector<std::array<double, 2>> agent_path(const JointTrajectory& traj,
                                              int agent);

struct EntropyMetrics {
  double h_util = 0.0;
  double h_yield = 0.0;
  double h_follow = 0.0;
  double h_ttc = 0.0;
};

// Entropy of the weight mass over each label family. The utility label uses
// the per-sample advantage; yield and follow labels count pairwise
// interactions within each sample; TTC counts involved agents.
EntropyMetrics semantic_entropies(const SampleSet& samples,
                                  const std::vector<double>& weights, double dt,
                                  double proximity_radius = kDefaultProximityRadius,
                                  double ttc_threshold = kDefaultTtcThreshold);

}  // namespace nashmodes

#endif  // NASHMODES_DIVERSITY_HPP_
