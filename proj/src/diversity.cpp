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

#include "nashmodes/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace nashmodes {

namespace {

using Point = std::array<double, 2>;

double point_dist(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double point_segment_dist(const Point& p, const Point& a, const Point& b) {
  const double abx = b[0] - a[0];
  const double aby = b[1] - a[1];
  const double len2 = abx * abx + aby * aby;
  if (len2 == 0.0) return point_dist(p, a);
  double t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return point_dist(p, {a[0] + t * abx, a[1] + t * aby});
}

// Distance from a point to the polyline formed by path[0..upto].
double point_trace_dist(const Point& p, const std::vector<Point>& path,
                        size_t upto) {
  double best = point_dist(p, path[0]);
  for (size_t s = 0; s + 1 <= upto; ++s) {
    best = std::min(best, point_segment_dist(p, path[s], path[s + 1]));
  }
  return best;
}

// Nearest point on the swept trace to p.
Point point_trace_nearest(const Point& p, const std::vector<Point>& path,
                          size_t upto) {
  Point best = path[0];
  double best_d = point_dist(p, path[0]);
  for (size_t s = 0; s + 1 <= upto; ++s) {
    const Point& a = path[s];
    const Point& b = path[s + 1];
    const double abx = b[0] - a[0];
    const double aby = b[1] - a[1];
    const double len2 = abx * abx + aby * aby;
    double t = len2 == 0.0 ? 0.0
                           : std::clamp(((p[0] - a[0]) * abx +
                                         (p[1] - a[1]) * aby) /
                                            len2,
                                        0.0, 1.0);
    const Point cand{a[0] + t * abx, a[1] + t * aby};
    const double d = point_dist(p, cand);
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  return best;
}

int arrival_time(const std::vector<Point>& path, const Point& target) {
  int best_t = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < path.size(); ++t) {
    const double d = point_dist(path[t], target);
    if (d < best_d) {
      best_d = d;
      best_t = static_cast<int>(t);
    }
  }
  return best_t;
}

}  // namespace

double semantic_entropy(const std::vector<SemanticLabel>& labels,
                        const std::vector<double>& weights) {
  if (labels.size() != weights.size()) {
    throw std::invalid_argument("semantic_entropy: labels/weights mismatch");
  }
  std::map<int, double> mass;
  double total = 0.0;
  for (size_t k = 0; k < labels.size(); ++k) {
    if (weights[k] < 0.0) {
      throw std::invalid_argument("semantic_entropy: negative weight");
    }
    mass[labels[k].bin] += weights[k];
    total += weights[k];
  }
  if (total <= 0.0) {
    throw std::invalid_argument("semantic_entropy: all weights are zero");
  }
  double h = 0.0;
  for (const auto& [bin, w] : mass) {
    const double p = w / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

SemanticLabel label_utility_bin(double cumulative_advantage) {
  const double p = std::clamp(std::exp(cumulative_advantage), 0.0, 1.0);
  const int bin = std::min(static_cast<int>(std::floor(10.0 * p)), 9);
  return {LabelCategory::kUtilityBin, bin, 10};
}

PairInteraction label_yield_follow(const std::vector<Point>& path_i,
                                   const std::vector<Point>& path_j,
                                   double proximity_radius, double dt) {
  if (path_i.size() != path_j.size() || path_i.empty()) {
    throw std::invalid_argument("label_yield_follow: path length mismatch");
  }
  const int T = static_cast<int>(path_i.size());

  std::vector<bool> intersecting(T, false);
  for (int t = 0; t < T; ++t) {
    const double d_ij = point_trace_dist(path_i[t], path_j, t);
    const double d_ji = point_trace_dist(path_j[t], path_i, t);
    intersecting[t] = std::min(d_ij, d_ji) < proximity_radius;
  }

  // First maximal run of intersecting steps.
  int start = -1;
  int end = -1;
  for (int t = 0; t < T; ++t) {
    if (intersecting[t]) {
      start = t;
      end = t;
      while (end + 1 < T && intersecting[end + 1]) ++end;
      break;
    }
  }
  PairInteraction result;
  if (start < 0) return result;

  const double duration = (end - start + 1) * dt;
  if (duration >= kFollowMinDuration) {
    result.follow = true;
    return result;
  }
  // Yield: the window must open after the start and close before the end.
  if (start == 0 || end == T - 1) return result;

  // Conflict point: where the triggering agent met the other's trace.
  const double d_ij = point_trace_dist(path_i[start], path_j, start);
  const double d_ji = point_trace_dist(path_j[start], path_i, start);
  const Point conflict =
      d_ij <= d_ji ? point_trace_nearest(path_i[start], path_j, start)
                   : point_trace_nearest(path_j[start], path_i, start);
  const int arr_i = arrival_time(path_i, conflict);
  const int arr_j = arrival_time(path_j, conflict);
  if (arr_i > arr_j) {
    result.yield_ij = true;
  } else if (arr_j > arr_i) {
    result.yield_ji = true;
  }
  // Equal arrival: a collision, not a yield.
  return result;
}

std::vector<Point> agent_path(const JointTrajectory& traj, int agent) {
  std::vector<Point> path;
  path.reserve(traj.states.size());
  for (const JointState& s : traj.states) {
    path.push_back({s.at(agent).x, s.at(agent).y});
  }
  return path;
}

SemanticLabel label_ttc(const JointTrajectory& traj, double dt,
                        double ttc_threshold) {
  const int T = traj.horizon();
  const int I = traj.num_agents();
  if (T < 1 || I < 1 || dt <= 0.0) {
    throw std::invalid_argument("label_ttc: invalid trajectory or dt");
  }

  // Finite-difference velocities; the last step reuses the previous one.
  std::vector<std::vector<Point>> vel(I, std::vector<Point>(T, {0.0, 0.0}));
  for (int i = 0; i < I; ++i) {
    for (int t = 0; t < T; ++t) {
      const int a = std::min(t, T - 2);
      if (T == 1) break;
      vel[i][t] = {(traj.states[a + 1][i].x - traj.states[a][i].x) / dt,
                   (traj.states[a + 1][i].y - traj.states[a][i].y) / dt};
    }
  }

  std::set<int> involved;
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < I; ++j) {
      if (i == j) continue;
      for (int t = 0; t < T; ++t) {
        const double rx = traj.states[t][j].x - traj.states[t][i].x;
        const double ry = traj.states[t][j].y - traj.states[t][i].y;
        const double gap = std::hypot(rx, ry);
        if (gap == 0.0) {
          involved.insert(i);
          involved.insert(j);
          continue;
        }
        const double vx = vel[j][t][0] - vel[i][t][0];
        const double vy = vel[j][t][1] - vel[i][t][1];
        const double closing = -(rx * vx + ry * vy) / gap;
        if (closing <= 0.0) continue;  // not closing: TTC is infinite
        if (gap / closing < ttc_threshold) {
          involved.insert(i);
          involved.insert(j);
        }
      }
    }
  }
  return {LabelCategory::kTtcCount, static_cast<int>(involved.size()), I + 1};
}

YieldFilterResult yield_graph_and_filter(
    int num_agents, const std::vector<std::pair<int, int>>& yield_edges,
    int k) {
  YieldFilterResult result;
  result.graph.num_agents = num_agents;
  for (const auto& [i, j] : yield_edges) {
    if (i == j) {
      throw std::invalid_argument("yield graph: self-edge");
    }
    result.graph.edges.emplace_back(i, j);
  }
  result.passes = static_cast<int>(result.graph.edges.size()) >= k;
  return result;
}

EntropyMetrics semantic_entropies(const SampleSet& samples,
                                  const std::vector<double>& weights, double dt,
                                  double proximity_radius,
                                  double ttc_threshold) {
  const int n = samples.size();
  if (static_cast<int>(weights.size()) != n || n == 0) {
    throw std::invalid_argument("semantic_entropies: weights/samples mismatch");
  }
  std::vector<SemanticLabel> util, yield, follow, ttc;
  util.reserve(n);
  for (int s = 0; s < n; ++s) {
    const JointTrajectory& traj = samples.trajectories[s];
    const int I = traj.num_agents();
    util.push_back(label_utility_bin(samples.advantages[s]));

    int yield_count = 0;
    int follow_count = 0;
    for (int i = 0; i < I; ++i) {
      for (int j = i + 1; j < I; ++j) {
        const PairInteraction pi = label_yield_follow(
            agent_path(traj, i), agent_path(traj, j), proximity_radius, dt);
        if (pi.yield_ij) ++yield_count;
        if (pi.yield_ji) ++yield_count;
        if (pi.follow) ++follow_count;
      }
    }
    const int pair_width = I * (I - 1) + 1;
    yield.push_back({LabelCategory::kYieldCount, yield_count, pair_width});
    follow.push_back({LabelCategory::kFollowCount, follow_count, pair_width});
    ttc.push_back(label_ttc(traj, dt, ttc_threshold));
  }
  EntropyMetrics m;
  m.h_util = semantic_entropy(util, weights);
  m.h_yield = semantic_entropy(yield, weights);
  m.h_follow = semantic_entropy(follow, weights);
  m.h_ttc = semantic_entropy(ttc, weights);
  return m;
}

int mode_coverage_count(const std::vector<int>& selection,
                        const std::vector<int>& labels) {
  if (selection.empty()) {
    throw std::invalid_argument("mode_coverage_count: empty selection");
  }
  std::set<int> distinct;
  for (int idx : selection) distinct.insert(labels.at(idx));
  return static_cast<int>(distinct.size());
}

}  // namespace nashmodes
