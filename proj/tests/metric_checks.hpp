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


// Random small PR instances compared against the brute-force recount.

#ifndef GOVERN_TESTS_METRIC_CHECKS_HPP_
#define GOVERN_TESTS_METRIC_CHECKS_HPP_

#include <random>
#include <string>
#include <vector>

#include "ensemble_properties.hpp"
#include "govern/metrics.hpp"
#include "oracles.hpp"

namespace govern::props {

/// 1..20 pairs over 1..5 questions. Scores come from a coarse grid half
/// the time so threshold and argmax ties are common. At least one
/// positive pair is always present.
inline std::vector<ScoredPair> random_pairs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 20);
  std::uniform_int_distribution<int> questions(1, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  const int q = questions(rng);
  const bool coarse = unit(rng) < 0.5;
  const double positive_rate = unit(rng);
  std::vector<ScoredPair> pairs;
  for (int i = 0; i < n; ++i) {
    const double s = coarse ? std::floor(unit(rng) * 5.0) / 4.0 : unit(rng);
    const Label y = unit(rng) < positive_rate ? Label::Positive : Label::Negative;
    pairs.push_back({"q" + std::to_string(std::uniform_int_distribution<int>(0, q - 1)(rng)),
                     "p" + std::to_string(i), Score(std::min(s, 1.0)), y});
  }
  pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)].label = Label::Positive;
  // Shuffle paragraph ids so ties are not always broken in insertion order.
  std::vector<std::string> ids;
  for (const auto& p : pairs) ids.push_back(p.paragraph_id);
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].paragraph_id = ids[i];
  return pairs;
}

inline std::string describe(const std::vector<ScoredPair>& pairs) {
  std::string s;
  for (const auto& p : pairs) {
    s += "(" + p.question_id + "," + p.paragraph_id + "," + format_real(p.score.value()) + "," +
         (is_positive(p.label) ? "+" : "-") + ")";
  }
  return s;
}

inline Report metric_oracle_agreement(std::uint64_t seed, std::size_t cases) {
  Report r{"PR curves, AUC and R@P match brute-force recount"};
  std::mt19937_64 rng(seed);
  const double floors[] = {0.0, 0.25, 0.5, 0.9, 1.0};
  for (; r.cases < cases; ++r.cases) {
    const auto pairs = random_pairs(rng);
    const PRCurve qp = qp_pr_curve(pairs);
    const PRCurve q = q_pr_curve(pairs);
    const PRCurve oqp = oracle::qp_curve(pairs);
    const PRCurve oq = oracle::q_curve(pairs);
    bool ok = qp == oqp && q == oq;
    ok = ok && pr_auc(qp) == oracle::step_area(oqp) && pr_auc(q) == oracle::step_area(oq);
    for (double f : floors) {
      ok = ok && recall_at_precision(qp, f) == oracle::max_recall_at(oqp, f);
      ok = ok && recall_at_precision(q, f) == oracle::max_recall_at(oq, f);
    }
    for (const auto& point : oq) {
      const Confusion c = q_confusion_at(pairs, point.threshold);
      const double p = c.true_positive + c.false_positive
                           ? double(c.true_positive) / double(c.true_positive + c.false_positive)
                           : 0.0;
      ok = ok && p == point.precision;
    }
    if (!ok) r.fail(describe(pairs));
  }
  return r;
}

}  // namespace govern::props

#endif  // GOVERN_TESTS_METRIC_CHECKS_HPP_
