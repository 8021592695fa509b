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

#ifndef NASHMODES_SAMPLING_HPP_
#define NASHMODES_SAMPLING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "nashmodes/modes.hpp"

namespace nashmodes {

inline constexpr double kNmsSmallThreshold = 2.5;  // meters
inline constexpr double kNmsLargeThreshold = 10.0;  // meters

// Ordered selection with a provenance tag per pick naming the rule that fired.
struct SelectionResult {
  std::vector<int> indices;
  std::vector<std::string> tags;
};

// Farthest Point Sampling: seed with the highest-weighted sample, then
// greedily add the sample maximizing its minimum endpoint distance to the
// selected set. `prefilter_top` restricts the pool to the top-weighted
// samples first.
SelectionResult fps(const SampleSet& samples, int count,
                    std::optional<int> prefilter_top = std::nullopt);

// Non-Maximum Suppression: repeatedly take the highest-weighted unsuppressed
// sample and suppress everything within `threshold` of it. If the pool runs
// out before `count`, suppressed samples are re-admitted in weight order and
// tagged as fallback picks.
SelectionResult nms(const SampleSet& samples, double threshold, int count);

// Whether NES ranks samples inside a mode by advantage or predictor weight.
enum class NesRank { kAdvantage, kPredictorWeight };

// Non-Equilibrium Suppression: phase 1 picks each mode's best sample in
// descending representative-weight order until all modes are covered; phase 2
// continues with NMS at `nms_threshold` over the remaining samples.
SelectionResult nes(const SampleSet& samples, const ModeSet& modes, int count,
                    double nms_threshold = kNmsSmallThreshold,
                    NesRank rank = NesRank::kAdvantage);

}  // namespace nashmodes

#endif  // NASHMODES_SAMPLING_HPP_
