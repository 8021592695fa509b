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

#include "nashmodes/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nashmodes {

Histogram softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  Histogram out(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double kl_divergence(const Histogram& q, const Histogram& q_star) {
  if (q.size() != q_star.size()) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  double kl = 0.0;
  for (size_t m = 0; m < q.size(); ++m) {
    if (q[m] < 1e-300) continue;
    kl += q[m] * (std::log(q[m]) - std::log(q_star[m]));
  }
  return kl;
}

ModeSet mean_shift_modes(const SampleSet& samples, double bandwidth,
                         int iterations) {
  const int k = samples.size();
  if (k == 0) throw std::invalid_argument("mean_shift_modes: empty sample set");
  if (bandwidth <= 0.0) {
    throw std::invalid_argument("mean_shift_modes: bandwidth must be > 0");
  }
  if (iterations < 1) {
    throw std::invalid_argument("mean_shift_modes: iterations must be >= 1");
  }

  // Pairwise endpoint distances.
  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      dist[a][b] = dist[b][a] =
          trajectory_distance(samples.trajectories[a], samples.trajectories[b]);
    }
  }

  std::vector<int> anchor(k);
  std::iota(anchor.begin(), anchor.end(), 0);
  for (int it = 0; it < iterations; ++it) {
    for (int s = 0; s < k; ++s) {
      const int a = anchor[s];
      int best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        if (dist[a][j] < bandwidth && samples.advantages[j] > best_score) {
          best = j;
          best_score = samples.advantages[j];
        }
      }
      anchor[s] = best;  // the anchor itself is always in range
    }
  }

  ModeSet modes;
  // Representatives ordered by descending advantage, ties to the lower index.
  std::vector<int> reps;
  for (int s = 0; s < k; ++s) {
    if (std::find(reps.begin(), reps.end(), anchor[s]) == reps.end()) {
      reps.push_back(anchor[s]);
    }
  }
  std::sort(reps.begin(), reps.end(), [&](int a, int b) {
    if (samples.advantages[a] != samples.advantages[b]) {
      return samples.advantages[a] > samples.advantages[b];
    }
    return a < b;
  });
  std::vector<int> mode_of(k, -1);
  for (size_t m = 0; m < reps.size(); ++m) mode_of[reps[m]] = static_cast<int>(m);

  modes.representatives = reps;
  modes.scores.reserve(reps.size());
  for (int r : reps) modes.scores.push_back(samples.advantages[r]);
  modes.labels.resize(k);
  for (int s = 0; s < k; ++s) modes.labels[s] = mode_of[anchor[s]];
  return modes;
}

std::vector<int> classify_modes(const SampleSet& samples,
                                const std::vector<int>& representatives) {
  if (representatives.empty()) {
    throw std::invalid_argument("classify_modes: no representatives");
  }
  std::vector<int> labels(samples.size());
  for (int s = 0; s < samples.size(); ++s) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < representatives.size(); ++m) {
      const double d = trajectory_distance(
          samples.trajectories[s], samples.trajectories[representatives[m]]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(m);
      }
    }
    labels[s] = best;
  }
  return labels;
}

Histogram ideal_histogram(const std::vector<double>& sample_scores,
                          const std::vector<int>& labels, int num_modes,
                          double rho) {
  if (num_modes < 1) throw std::invalid_argument("ideal_histogram: no modes");
  if (sample_scores.size() != labels.size()) {
    throw std::invalid_argument("ideal_histogram: scores/labels size mismatch");
  }
  std::vector<double> logits(num_modes,
                             -std::numeric_limits<double>::infinity());
  for (size_t s = 0; s < labels.size(); ++s) {
    const int m = labels[s];
    if (m < 0 || m >= num_modes) {
      throw std::invalid_argument("ideal_histogram: label out of range");
    }
    logits[m] = std::max(logits[m], sample_scores[s]);
  }
  for (double l : logits) {
    if (!std::isfinite(l)) {
      throw std::invalid_argument("ideal_histogram: mode with no samples");
    }
  }
  for (double& l : logits) l *= rho;
  return softmax(logits);
}

Histogram empirical_histogram(const SampleSet& samples,
                              const std::vector<int>& labels, int num_modes,
                              ScoreSource source) {
  if (num_modes < 1) {
    throw std::invalid_argument("empirical_histogram: no modes");
  }
  if (static_cast<int>(labels.size()) != samples.size()) {
    throw std::invalid_argument("empirical_histogram: labels size mismatch");
  }
  if (source == ScoreSource::kPredictorWeight) {
    const Histogram w = softmax(samples.weight_logits);
    Histogram q(num_modes, 0.0);
    for (int s = 0; s < samples.size(); ++s) {
      const int m = labels[s];
      if (m < 0 || m >= num_modes) {
        throw std::invalid_argument("empirical_histogram: label out of range");
      }
      q[m] += w[s];
    }
    return q;
  }
  std::vector<double> logits(num_modes, 0.0);
  for (int s = 0; s < samples.size(); ++s) {
    const int m = labels[s];
    if (m < 0 || m >= num_modes) {
      throw std::invalid_argument("empirical_histogram: label out of range");
    }
    logits[m] += samples.advantages[s];
  }
  return softmax(logits);
}

CoverageLoss coverage_kl_and_grad(const std::vector<double>& sample_scores,
                                  const std::vector<int>& labels,
                                  const Histogram& q_star) {
  if (sample_scores.size() != labels.size()) {
    throw std::invalid_argument("coverage_kl: scores/labels size mismatch");
  }
  const int num_modes = static_cast<int>(q_star.size());
  std::vector<double> logits(num_modes, 0.0);
  for (size_t s = 0; s < labels.size(); ++s) {
    const int m = labels[s];
    if (m < 0 || m >= num_modes) {
      throw std::invalid_argument("coverage_kl: label out of range");
    }
    logits[m] += sample_scores[s];
  }

  CoverageLoss result;
  result.q = softmax(logits);
  result.loss = kl_divergence(result.q, q_star);

  // d KL / d logit_m = q_m * (log(q_m / q*_m) - KL); each sample score feeds
  // exactly one logit.
  std::vector<double> dlogit(num_modes, 0.0);
  for (int m = 0; m < num_modes; ++m) {
    dlogit[m] =
        result.q[m] * (std::log(result.q[m]) - std::log(q_star[m]) - result.loss);
  }
  result.grad_scores.resize(sample_scores.size());
  for (size_t s = 0; s < labels.size(); ++s) {
    result.grad_scores[s] = dlogit[labels[s]];
  }
  return result;
}

CoverageLoss coverage_mass_kl_and_grad(const std::vector<double>& sample_logits,
                                       const std::vector<int>& labels,
                                       const Histogram& q_star) {
  if (sample_logits.size() != labels.size()) {
    throw std::invalid_argument("coverage_mass_kl: logits/labels size mismatch");
  }
  const int num_modes = static_cast<int>(q_star.size());
  const Histogram w = softmax(sample_logits);
  Histogram q(num_modes, 0.0);
  for (size_t s = 0; s < labels.size(); ++s) {
    const int m = labels[s];
    if (m < 0 || m >= num_modes) {
      throw std::invalid_argument("coverage_mass_kl: label out of range");
    }
    q[m] += w[s];
  }
  for (double mass : q) {
    if (mass <= 0.0) {
      throw std::invalid_argument("coverage_mass_kl: mode with no samples");
    }
  }

  CoverageLoss result;
  result.q = q;
  result.loss = kl_divergence(q, q_star);
  // d KL / d logit_k = w_k * (log(q_m(k) / q*_m(k)) - KL), chaining the
  // per-mode mass sums through the sample softmax.
  result.grad_scores.resize(sample_logits.size());
  for (size_t s = 0; s < labels.size(); ++s) {
    const int m = labels[s];
    result.grad_scores[s] =
        w[s] * (std::log(q[m]) - std::log(q_star[m]) - result.loss);
  }
  return result;
}

}  // namespace nashmodes
