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

// Teacher combiners. Each one maps (student score, teacher scores[, label])
// to the per-sample regression target the student is distilled onto.

#ifndef GOVERN_ENSEMBLE_HPP_
#define GOVERN_ENSEMBLE_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "govern/core.hpp"

namespace govern {

/// Direction a distance loss between student and teacher pushes the
/// student: Up when the teacher is above it. Exact comparison; equal
/// scores give Flat.
Orientation orientation(Score student, Score teacher) noexcept;

/// Sign of the summed orientations. Throws on an empty input.
Orientation vote(std::span<const Orientation> orientations);

/// Unsupervised gradient-orientation vote. Teachers whose orientation
/// opposes the vote are dropped and the rest averaged; on a tied vote all
/// teachers are kept, which is the plain mean.
EnsembleTarget govern_target(Score student, std::span<const Score> teachers);

EnsembleTarget mean_target(std::span<const Score> teachers);

struct LRWeights {
  Eigen::VectorXd coefficients;
  double bias = 0.0;
};

struct LRFitConfig {
  double learning_rate = 0.5;
  std::size_t max_iterations = 5000;
  /// Stop once every gradient component is below this in magnitude.
  double tolerance = 1e-9;
};

/// Logistic regression of dev labels on teacher scores, zero-initialized,
/// full-batch gradient descent on mean cross-entropy.
LRWeights lr_fit(const Dataset& dev, const LRFitConfig& config = {});

/// sigmoid(bias + coefficients . teachers). `weights` holds the coefficients.
EnsembleTarget lr_target(const LRWeights& weights, std::span<const Score> teachers);

/// Lower/upper clamp applied to predictions before taking logs.
inline constexpr double kCrossEntropyClamp = 1e-7;

double ce_loss(Score prediction, Label label) noexcept;

/// Supervised variant: keep teachers whose orientation agrees strictly
/// with the label, weight survivors by cross-entropy confidence.
///
/// Raw confidence weights sum to 1 - 1/K for K survivors; they are
/// renormalized to sum to one (raw values stay in `raw_weights`). A single
/// survivor gets weight one. No survivor marks the sample skipped.
EnsembleTarget govern_ca_target(Score student, std::span<const Score> teachers, Label label);

/// Confidence-aware weighting over every teacher, no orientation gating.
/// Same renormalization and singleton rule as govern_ca_target.
EnsembleTarget camkd_target(std::span<const Score> teachers, Label label);

/// A strategy together with whatever it needs beyond the sample itself.
struct Combiner {
  Strategy strategy = Strategy::Mean;
  std::optional<LRWeights> lr_weights;

  bool needs_student() const noexcept {
    return strategy == Strategy::Govern || strategy == Strategy::GovernCA;
  }
  bool needs_labels() const noexcept {
    return strategy == Strategy::GovernCA || strategy == Strategy::CAMKD;
  }
};

/// Throws `Error` naming the first offending record when `data` cannot be
/// combined with `combiner` (missing labels, missing or mis-sized LR weights).
void check_combiner(const Combiner& combiner, const Dataset& data);

/// Dispatches to the strategy's combiner for one record.
EnsembleTarget combine(const Combiner& combiner, Score student, const SampleRecord& record);

// LR weight file: "GOVERN-LRW v1", then the teacher count, then one
// coefficient per line followed by the bias.
void write_lr_weights(std::ostream& out, const LRWeights& weights);
LRWeights read_lr_weights(std::istream& in);
void save_lr_weights(const std::filesystem::path& path, const LRWeights& weights);
LRWeights load_lr_weights(const std::filesystem::path& path);

}  // namespace govern

#endif  // GOVERN_ENSEMBLE_HPP_
