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

#include "nashmodes/sampling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nashmodes {

namespace {

// Sample indices sorted by descending weight logit, ties to the lower index.
std::vector<int> weight_order(const SampleSet& samples) {
  std::vector<int> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return samples.weight_logits[a] > samples.weight_logits[b];
  });
  return order;
}

void nms_into(const SampleSet& samples, const std::vector<int>& pool,
              double threshold, int count, const std::string& tag,
              const std::string& fallback_tag, SelectionResult& result) {
  std::vector<int> ordered;  // pool in weight order
  for (int idx : weight_order(samples)) {
    if (std::find(pool.begin(), pool.end(), idx) != pool.end()) {
      ordered.push_back(idx);
    }
  }
  std::vector<bool> suppressed(samples.size(), false);
  std::vector<bool> taken(samples.size(), false);
  for (int idx : result.indices) taken[idx] = true;

  while (static_cast<int>(result.indices.size()) < count) {
    int pick = -1;
    for (int idx : ordered) {
      if (!taken[idx] && !suppressed[idx]) {
        pick = idx;
        break;
      }
    }
    if (pick < 0) break;
    result.indices.push_back(pick);
    result.tags.push_back(tag);
    taken[pick] = true;
    for (int idx : ordered) {
      if (!taken[idx] &&
          trajectory_distance(samples.trajectories[pick],
                              samples.trajectories[idx]) < threshold) {
        suppressed[idx] = true;
      }
    }
  }
  // Re-admit suppressed samples in weight order.
  for (int idx : ordered) {
    if (static_cast<int>(result.indices.size()) >= count) break;
    if (!taken[idx]) {
      result.indices.push_back(idx);
      result.tags.push_back(fallback_tag);
      taken[idx] = true;
    }
  }
}

}  // namespace

SelectionResult fps(const SampleSet& samples, int count,
                    std::optional<int> prefilter_top) {
  if (count < 1) throw std::invalid_argument("fps: count must be >= 1");
  if (samples.size() == 0) throw std::invalid_argument("fps: empty sample set");

  std::vector<int> pool = weight_order(samples);
  if (prefilter_top && *prefilter_top < static_cast<int>(pool.size())) {
    pool.resize(*prefilter_top);
  }

  SelectionResult result;
  result.indices.push_back(pool.front());
  result.tags.push_back("fps_seed");
  std::vector<double> min_dist(samples.size(),
                               std::numeric_limits<double>::infinity());
  while (static_cast<int>(result.indices.size()) <
         std::min<int>(count, static_cast<int>(pool.size()))) {
    const int last = result.indices.back();
    for (int idx : pool) {
      min_dist[idx] = std::min(
          min_dist[idx], trajectory_distance(samples.trajectories[last],
                                             samples.trajectories[idx]));
    }
    int pick = -1;
    double best = -1.0;
    for (int idx : pool) {
      if (std::find(result.indices.begin(), result.indices.end(), idx) !=
          result.indices.end()) {
        continue;
      }
      if (min_dist[idx] > best) {
        best = min_dist[idx];
        pick = idx;
      }
    }
    if (pick < 0) break;
    result.indices.push_back(pick);
    result.tags.push_back("fps");
  }
  return result;
}

SelectionResult nms(const SampleSet& samples, double threshold, int count) {
  if (count < 1) throw std::invalid_argument("nms: count must be >= 1");
  if (threshold <= 0.0) throw std::invalid_argument("nms: threshold must be > 0");
  if (samples.size() == 0) throw std::invalid_argument("nms: empty sample set");

  std::vector<int> pool(samples.size());
  std::iota(pool.begin(), pool.end(), 0);
  SelectionResult result;
  nms_into(samples, pool, threshold, std::min<int>(count, samples.size()),
           "nms", "nms_fallback", result);
  return result;
}

SelectionResult nes(const SampleSet& samples, const ModeSet& modes, int count,
                    double nms_threshold, NesRank rank) {
  if (count < 1) throw std::invalid_argument("nes: count must be >= 1");
  if (static_cast<int>(modes.labels.size()) != samples.size()) {
    throw std::invalid_argument("nes: label/sample length mismatch");
  }
  const auto& score = rank == NesRank::kAdvantage ? samples.advantages
                                                  : samples.weight_logits;

  SelectionResult result;
  // Phase 1: the best sample of each mode, modes in descending
  // representative-weight order (the ModeSet ordering).
  for (int m = 0; m < modes.num_modes(); ++m) {
    if (static_cast<int>(result.indices.size()) >= count) break;
    int pick = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples.size(); ++s) {
      if (modes.labels[s] == m && score[s] > best) {
        best = score[s];
        pick = s;
      }
    }
    if (pick >= 0) {
      result.indices.push_back(pick);
      result.tags.push_back("nes_mode");
    }
  }

  // Phase 2: metric diversity over the remaining samples.
  if (static_cast<int>(result.indices.size()) <
      std::min<int>(count, samples.size())) {
    std::vector<int> pool;
    for (int s = 0; s < samples.size(); ++s) {
      if (std::find(result.indices.begin(), result.indices.end(), s) ==
          result.indices.end()) {
        pool.push_back(s);
      }
    }
    nms_into(samples, pool, nms_threshold, std::min<int>(count, samples.size()),
             "nes_nms", "nes_nms_fallback", result);
  }
  return result;
}

}  // namespace nashmodes
