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

#ifndef NASHMODES_MODES_HPP_
#define NASHMODES_MODES_HPP_

#include <vector>

#include "nashmodes/types.hpp"

namespace nashmodes {

inline constexpr double kDefaultBandwidth = 10.0;  // meters
inline constexpr int kDefaultMeanShiftIterations = 10;

// K candidate joint trajectories with their cumulative-advantage scores and
// predictor weight logits.
struct SampleSet {
  std::vector<JointTrajectory> trajectories;
  std::vector<double> advantages;     // A(tau_k)
  std::vector<double> weight_logits;  // log of unnormalized predictor weight

  int size() const { return static_cast<int>(trajectories.size()); }
};

// M representative trajectories (indices into a SampleSet) plus the label
// assigning every sample to a mode. Modes are ordered by descending
// representative advantage, ties broken toward the lower sample index.
struct ModeSet {
  std::vector<int> representatives;  // sample index per mode
  std::vector<double> scores;        // advantage of each representative
  std::vector<int> labels;           // mode index per sample

  int num_modes() const { return static_cast<int>(representatives.size()); }
};

// Probability vector over modes; entries are strictly positive and sum to 1.
using Histogram = std::vector<double>;

// Restricted-to-samples pointer ascent: each anchor repeatedly jumps to the
// highest-advantage sample within `bandwidth` of it (ties to the lowest
// index). Distinct final anchors become the representatives.
ModeSet mean_shift_modes(const SampleSet& samples, double bandwidth,
                         int iterations = kDefaultMeanShiftIterations);

// Nearest-representative assignment by endpoint distance; ties go to the
// lower mode index.
std::vector<int> classify_modes(const SampleSet& samples,
                                const std::vector<int>& representatives);

// q*: softmax over modes of rho * (max advantage among assigned samples).
Histogram ideal_histogram(const std::vector<double>& sample_scores,
                          const std::vector<int>& labels, int num_modes,
                          double rho);

enum class ScoreSource { kAdvantage, kPredictorWeight };

// q from advantages: softmax over modes of the per-mode sum of advantages;
// modes with no assigned sample keep a logit of 0 so the softmax stays finite.
// q from predictor weights: the normalized sample weights are summed per mode,
// so q_m is the probability mass the predictor assigns to mode m and an empty
// mode has mass 0.
Histogram empirical_histogram(const SampleSet& samples,
                              const std::vector<int>& labels, int num_modes,
                              ScoreSource source = ScoreSource::kAdvantage);

struct CoverageLoss {
  double loss = 0.0;
  Histogram q;
  // d loss / d sample_score_k, with q* held constant.
  std::vector<double> grad_scores;
};

// KL(q || q*) where q = softmax of per-mode score sums; q* is treated as a
// constant. The analytic gradient flows through the sums and the softmax.
CoverageLoss coverage_kl_and_grad(const std::vector<double>& sample_scores,
                                  const std::vector<int>& labels,
                                  const Histogram& q_star);

// KL(q || q*) where q_m is the summed softmax mass of the samples labeled m,
// i.e. the predictor-weight form of the empirical histogram. Gradients are
// with respect to the sample logits; every mode must hold at least one sample.
CoverageLoss coverage_mass_kl_and_grad(const std::vector<double>& sample_logits,
                                       const std::vector<int>& labels,
                                       const Histogram& q_star);

// Softmax of a logit vector (max-subtracted).
Histogram softmax(const std::vector<double>& logits);

// KL(q || q_star) with tiny-mass terms guarded to contribute 0.
double kl_divergence(const Histogram& q, const Histogram& q_star);

}  // namespace nashmodes

#endif  // NASHMODES_MODES_HPP_
