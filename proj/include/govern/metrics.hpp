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

// Offline ranking metrics: precision/recall curves at pair and question
// granularity, recall at a precision floor, step-interpolated PR-AUC, and
// the side-by-side GSB delta.

#ifndef GOVERN_METRICS_HPP_
#define GOVERN_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "govern/core.hpp"

namespace govern {

struct ScoredPair {
  std::string question_id;
  std::string paragraph_id;
  Score score;
  Label label;
};

struct PRPoint {
  double threshold;
  double precision;
  double recall;

  bool operator==(const PRPoint&) const = default;
};

/// Points ordered by strictly decreasing threshold; recall nondecreasing.
using PRCurve = std::vector<PRPoint>;

struct Confusion {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;

  bool operator==(const Confusion&) const = default;
};

/// Pairs with score >= threshold are predicted positive, one point per
/// distinct score. Throws if no pair is positive.
PRCurve qp_pr_curve(std::span<const ScoredPair> pairs);

/// Question-level curve. Each question is represented by its top-scored
/// paragraph (ties go to the smallest paragraph_id). A question whose pick
/// clears the threshold is a true or false positive by the pick's label; a
/// question whose pick falls below it is a false negative if it has any
/// positive paragraph. Thresholds are the distinct pick scores.
PRCurve q_pr_curve(std::span<const ScoredPair> pairs);

/// Question-level counts at one arbitrary threshold.
Confusion q_confusion_at(std::span<const ScoredPair> pairs, double threshold);

/// Highest recall among points with precision >= floor; 0 if none.
double recall_at_precision(const PRCurve& curve, double precision_floor);

/// Sum of (R_k - R_{k-1}) * P_k with R_0 = 0 (average precision).
double pr_auc(const PRCurve& curve);

struct GSBCounts {
  long good = 0;
  long same = 0;
  long bad = 0;
};

/// (good - bad) / (good + same + bad).
double gsb_delta(const GSBCounts& counts);

/// Pairs a dataset's labeled records with externally produced scores.
std::vector<ScoredPair> make_scored_pairs(const Dataset& data, std::span<const double> scores);

}  // namespace govern

#endif  // GOVERN_METRICS_HPP_
