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

#include "govern/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace govern {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct QuestionPick {
  double score;
  bool positive;
  bool has_positive;
};

std::vector<QuestionPick> pick_per_question(std::span<const ScoredPair> pairs) {
  struct Best {
    const ScoredPair* pick = nullptr;
    bool has_positive = false;
  };
  std::map<std::string, Best> by_question;
  for (const auto& p : pairs) {
    auto& best = by_question[p.question_id];
    best.has_positive = best.has_positive || is_positive(p.label);
    if (!best.pick || p.score > best.pick->score ||
        (p.score == best.pick->score && p.paragraph_id < best.pick->paragraph_id)) {
      best.pick = &p;
    }
  }
  std::vector<QuestionPick> out;
  out.reserve(by_question.size());
  for (const auto& [id, best] : by_question) {
    out.push_back({best.pick->score.value(), is_positive(best.pick->label), best.has_positive});
  }
  return out;
}

}  // namespace

PRCurve qp_pr_curve(std::span<const ScoredPair> pairs) {
  const std::size_t positives = static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const ScoredPair& p) { return is_positive(p.label); }));
  if (positives == 0) throw Error("PR curve needs at least one positive pair");

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pairs[a].score > pairs[b].score; });

  PRCurve curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = pairs[order[i]].score.value();
    for (; i < order.size() && pairs[order[i]].score.value() == t; ++i) {
      if (is_positive(pairs[order[i]].label)) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.push_back({t, ratio(tp, tp + fp), ratio(tp, positives)});
  }
  return curve;
}

PRCurve q_pr_curve(std::span<const ScoredPair> pairs) {
  auto picks = pick_per_question(pairs);
  const std::size_t answerable = static_cast<std::size_t>(
      std::count_if(picks.begin(), picks.end(), [](const QuestionPick& q) { return q.has_positive; }));
  if (answerable == 0) throw Error("PR curve needs at least one question with a positive answer");

  std::sort(picks.begin(), picks.end(),
            [](const QuestionPick& a, const QuestionPick& b) { return a.score > b.score; });
  PRCurve curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t above_answerable = 0;
  for (std::size_t i = 0; i < picks.size();) {
    const double t = picks[i].score;
    for (; i < picks.size() && picks[i].score == t; ++i) {
      if (picks[i].positive) {
        ++tp;
      } else {
        ++fp;
      }
      if (picks[i].has_positive) ++above_answerable;
    }
    const std::size_t fn = answerable - above_answerable;
    curve.push_back({t, ratio(tp, tp + fp), ratio(tp, tp + fn)});
  }
  return curve;
}

Confusion q_confusion_at(std::span<const ScoredPair> pairs, double threshold) {
  Confusion c;
  for (const auto& q : pick_per_question(pairs)) {
    if (q.score >= threshold) {
      ++(q.positive ? c.true_positive : c.false_positive);
    } else if (q.has_positive) {
      ++c.false_negative;
    }
  }
  return c;
}

double recall_at_precision(const PRCurve& curve, double precision_floor) {
  double best = 0.0;
  for (const auto& p : curve) {
    if (p.precision >= precision_floor) best = std::max(best, p.recall);
  }
  return best;
}

double pr_auc(const PRCurve& curve) {
  double area = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : curve) {
    area += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return area;
}

double gsb_delta(const GSBCounts& counts) {
  if (counts.good < 0 || counts.same < 0 || counts.bad < 0) throw Error("GSB counts must be nonnegative");
  const long total = counts.good + counts.same + counts.bad;
  if (total == 0) throw Error("GSB total is zero");
  return static_cast<double>(counts.good - counts.bad) / static_cast<double>(total);
}

std::vector<ScoredPair> make_scored_pairs(const Dataset& data, std::span<const double> scores) {
  if (scores.size() != data.size()) throw Error("score count does not match dataset size");
  std::vector<ScoredPair> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data[i];
    if (!r.label) {
      throw Error("metrics need labels; record " + std::to_string(i + 1) + " (" + r.question_id + ", " +
                  r.paragraph_id + ") is unlabeled");
    }
    out.push_back({r.question_id, r.paragraph_id, Score(scores[i]), *r.label});
  }
  return out;
}

}  // namespace govern
