// Copyright 2026  The govern-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Majority-vote and ensemble statistics: exact binomial tails, Beta
// sampling, Monte-Carlo comparison of single/mean/vote-based teacher
// aggregation, and the synthetic teacher corpus generator.
//
// Every simulation draws trial k from CounterRng(seed, k) and reduces
// fixed-size blocks pairwise in index order, so results are bit-identical
// for any thread count.

#ifndef GOVERN_MONTECARLO_HPP_
#define GOVERN_MONTECARLO_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "govern/core.hpp"
#include "govern/random.hpp"

namespace govern {

class BetaSpec {
 public:
  BetaSpec(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double mean() const noexcept { return alpha_ / (alpha_ + beta_); }
  double variance() const noexcept {
    const double s = alpha_ + beta_;
    return alpha_ * beta_ / (s * s * (s + 1.0));
  }

 private:
  double alpha_;
  double beta_;
};

/// Marsaglia-Tsang gamma draw with unit scale. Shapes below one are
/// boosted by one and corrected with U^(1/shape).
double gamma_sample(double shape, CounterRng& rng);

/// Ratio of two gamma draws, clamped to [0,1].
Score beta_sample(const BetaSpec& spec, CounterRng& rng);

/// Probability that a strict majority of n independent voters, each right
/// with probability p, is right. n must be odd.
double condorcet_exact(double p, int n);

/// Monte-Carlo estimate of condorcet_exact.
double condorcet_mc(double p, int n, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the average of n independent draws from `spec`.
Moments beta_mean_ensemble_moments(const BetaSpec& spec, int n);

enum class SimStrategy { SingleTeacher, MeanEnsemble, GovernEnsemble };

std::string_view to_string(SimStrategy s) noexcept;

struct SimResult {
  SimStrategy strategy;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  std::uint64_t trials = 0;
};

inline constexpr std::size_t kHistogramBins = 100;
using Histogram = std::array<std::uint64_t, kHistogramBins>;

/// Bin index of x in 100 uniform bins over [0,1]; 1.0 lands in the last bin.
std::size_t histogram_bin(double x) noexcept;

/// Draws the student and every teacher independently per trial and
/// records the first teacher, the teacher mean, and the GOVERN target
/// (with the student draw as the reference score). Results come back in
/// SimStrategy order. If `histograms` is given it receives one histogram
/// per strategy in the same order.
std::vector<SimResult> run_ensemble_sim(const BetaSpec& student, std::span<const BetaSpec> teachers,
                                        std::uint64_t trials, std::uint64_t seed, unsigned threads = 1,
                                        std::vector<Histogram>* histograms = nullptr);

/// Sample mean/variance of `trials` single draws from `spec`.
Moments beta_sample_moments(const BetaSpec& spec, std::uint64_t trials, std::uint64_t seed,
                            unsigned threads = 1, Histogram* histogram = nullptr);

/// Mean/variance of the fraction of n Bernoulli(p) voters that are right.
Moments bernoulli_mean_ensemble_sim(double p, int n, std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads = 1);

struct TeacherQuality {
  /// Probability that the teacher sees the opposite label.
  double flip_rate = 0.0;
  /// Score distribution when the teacher sees a positive.
  BetaSpec positive{20.0, 2.0};
  /// Score distribution when the teacher sees a negative.
  BetaSpec negative{2.0, 20.0};
};

struct SynthConfig {
  std::size_t n_questions = 100;
  std::size_t paragraphs_per_question = 10;
  std::size_t feature_dim = 8;
  std::vector<TeacherQuality> teachers;
  std::uint64_t seed = 0;
  /// Slope of the hidden logit in units of its standard deviation.
  double label_sharpness = 3.0;
  /// Offset of the hidden logit; negative values make positives rarer.
  double label_offset = 0.0;
};

/// Corpus whose labels come from a hidden linear scorer over standard
/// normal features (sigmoid, then Bernoulli) and whose teacher scores
/// depend on the label only through each teacher's flip rate and Beta
/// sharpness.
Dataset synthesize_dataset(const SynthConfig& config);

}  // namespace govern

#endif  // GOVERN_MONTECARLO_HPP_
