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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "govern/metrics.hpp"
#include "metric_checks.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace govern {
namespace {

ScoredPair pair(const std::string& q, const std::string& p, double s, bool positive) {
  return {q, p, Score(s), positive ? Label::Positive : Label::Negative};
}

const std::vector<ScoredPair> kThreePairs = {
    pair("q1", "a", 0.9, true), pair("q2", "a", 0.8, false), pair("q3", "a", 0.7, true)};

TEST(QPCurve, HandEnumeration) {
  const PRCurve c = qp_pr_curve(kThreePairs);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (PRPoint{0.9, 1.0, 0.5}));
  EXPECT_EQ(c[1], (PRPoint{0.8, 0.5, 0.5}));
  EXPECT_EQ(c[2], (PRPoint{0.7, 2.0 / 3.0, 1.0}));
  EXPECT_EQ(c, oracle::qp_curve(kThreePairs));
}

TEST(QPCurve, AllPositive) {
  const std::vector<ScoredPair> pairs = {pair("q", "a", 0.3, true), pair("q", "b", 0.6, true),
                                         pair("q", "c", 0.9, true)};
  const PRCurve c = qp_pr_curve(pairs);
  for (const auto& p : c) EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(c.back().recall, 1.0);
}

TEST(QPCurve, AllScoresEqual) {
  const std::vector<ScoredPair> pairs = {pair("q", "a", 0.4, true), pair("q", "b", 0.4, false),
                                         pair("q", "c", 0.4, false), pair("r", "a", 0.4, true)};
  const PRCurve c = qp_pr_curve(pairs);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].precision, 0.5);
  EXPECT_EQ(c[0].recall, 1.0);
}

TEST(QPCurve, NoPositiveIsError) {
  const std::vector<ScoredPair> pairs = {pair("q", "a", 0.4, false)};
  EXPECT_THROW(qp_pr_curve(pairs), Error);
}

TEST(QCurve, SelectedNegativeThenMissed) {
  const std::vector<ScoredPair> pairs = {pair("q1", "a", 0.9, false), pair("q1", "b", 0.7, true)};
  const Confusion at_09 = q_confusion_at(pairs, 0.9);
  EXPECT_EQ(at_09, (Confusion{0, 1, 0}));
  const Confusion at_095 = q_confusion_at(pairs, 0.95);
  EXPECT_EQ(at_095, (Confusion{0, 0, 1}));
  const PRCurve c = q_pr_curve(pairs);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (PRPoint{0.9, 0.0, 0.0}));
}

TEST(QCurve, SinglePair) {
  const std::vector<ScoredPair> pairs = {pair("q1", "a", 0.8, true)};
  EXPECT_EQ(q_pr_curve(pairs), (PRCurve{{0.8, 1.0, 1.0}}));
}

TEST(QCurve, TwoQuestionsAtThreshold) {
  const std::vector<ScoredPair> pairs = {pair("q1", "a", 0.9, true), pair("q1", "b", 0.2, false),
                                         pair("q2", "a", 0.6, true), pair("q2", "b", 0.1, false)};
  const Confusion c = q_confusion_at(pairs, 0.7);
  EXPECT_EQ(c, (Confusion{1, 0, 1}));
  const PRCurve curve = q_pr_curve(pairs);
  EXPECT_EQ(curve[0], (PRPoint{0.9, 1.0, 0.5}));
}

TEST(QCurve, ArgmaxTieTakesSmallestParagraphId) {
  const std::vector<ScoredPair> pairs = {pair("q1", "b", 0.5, true), pair("q1", "a", 0.5, false)};
  EXPECT_EQ(q_pr_curve(pairs), (PRCurve{{0.5, 0.0, 0.0}}));
  const std::vector<ScoredPair> swapped = {pair("q1", "a", 0.5, true), pair("q1", "b", 0.5, false)};
  EXPECT_EQ(q_pr_curve(swapped), (PRCurve{{0.5, 1.0, 1.0}}));
}

TEST(QCurve, UnanswerableQuestionsOnlyAddFalsePositives) {
  const std::vector<ScoredPair> pairs = {pair("q1", "a", 0.9, true), pair("q2", "a", 0.95, false)};
  const PRCurve c = q_pr_curve(pairs);
  EXPECT_EQ(c[0], (PRPoint{0.95, 0.0, 0.0}));
  EXPECT_EQ(c[1], (PRPoint{0.9, 0.5, 1.0}));
  const std::vector<ScoredPair> none = {pair("q2", "a", 0.95, false)};
  EXPECT_THROW(q_pr_curve(none), Error);
}

TEST(RecallAtPrecision, Examples) {
  const PRCurve c = qp_pr_curve(kThreePairs);
  EXPECT_EQ(recall_at_precision(c, 0.9), 0.5);
  EXPECT_EQ(recall_at_precision(c, 0.0), 1.0);
  const PRCurve weak = {{0.9, 0.8, 0.5}, {0.1, 0.5, 1.0}};
  EXPECT_EQ(recall_at_precision(weak, 1.0), 0.0);
}

TEST(PRAUC, Examples) {
  const std::vector<ScoredPair> perfect = {pair("q", "a", 0.9, true), pair("q", "b", 0.8, true),
                                           pair("q", "c", 0.3, false), pair("q", "d", 0.1, false)};
  EXPECT_EQ(pr_auc(qp_pr_curve(perfect)), 1.0);
  EXPECT_NEAR(pr_auc(qp_pr_curve(kThreePairs)), 0.5 + 0.5 * 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(pr_auc(qp_pr_curve(kThreePairs)), 0.8333, 1e-4);
  EXPECT_EQ(pr_auc(PRCurve{{0.5, 0.4, 1.0}}), 0.4);
}

TEST(GSB, PublishedCountsAndErrors) {
  EXPECT_EQ(gsb_delta({27, 364, 9}), 0.045);
  EXPECT_EQ(gsb_delta({39, 353, 8}), 0.0775);
  EXPECT_EQ(gsb_delta({0, 10, 0}), 0.0);
  EXPECT_EQ(gsb_delta({5, 0, 0}), 1.0);
  EXPECT_EQ(gsb_delta({0, 0, 5}), -1.0);
  EXPECT_THROW(gsb_delta({0, 0, 0}), Error);
  EXPECT_THROW(gsb_delta({-1, 3, 0}), Error);
}

TEST(MetricsOracle, BruteForceRecount) {
  const auto r = props::metric_oracle_agreement(41, 2000);
  EXPECT_TRUE(r.ok()) << r.failures << " failures, first: " << r.first_failure;
}

TEST(MetricsProperty, MonotoneTransformKeepsCurveShape) {
  std::mt19937_64 rng(42);
  for (int c = 0; c < 500; ++c) {
    const auto pairs = props::random_pairs(rng);
    auto mapped = pairs;
    for (auto& p : mapped) p.score = Score(std::sqrt(p.score.value()) * 0.5 + 0.25);
    for (auto curve_fn : {&qp_pr_curve, &q_pr_curve}) {
      const PRCurve a = curve_fn(pairs);
      const PRCurve b = curve_fn(mapped);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].precision, b[i].precision);
        EXPECT_EQ(a[i].recall, b[i].recall);
      }
      EXPECT_EQ(pr_auc(a), pr_auc(b));
      EXPECT_EQ(recall_at_precision(a, 0.9), recall_at_precision(b, 0.9));
    }
  }
}

TEST(MetricsProperty, PermutationInvariantAndBounded) {
  std::mt19937_64 rng(43);
  for (int c = 0; c < 500; ++c) {
    const auto pairs = props::random_pairs(rng);
    auto shuffled = pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(qp_pr_curve(pairs), qp_pr_curve(shuffled));
    EXPECT_EQ(q_pr_curve(pairs), q_pr_curve(shuffled));
    for (const PRCurve& curve : {qp_pr_curve(pairs), q_pr_curve(pairs)}) {
      for (std::size_t i = 1; i < curve.size(); ++i) {
        EXPECT_GT(curve[i - 1].threshold, curve[i].threshold);
        EXPECT_LE(curve[i - 1].recall, curve[i].recall);
      }
      const double auc = pr_auc(curve);
      EXPECT_GE(auc, 0.0);
      EXPECT_LE(auc, 1.0);
      const double rap = recall_at_precision(curve, 0.9);
      EXPECT_GE(rap, 0.0);
      EXPECT_LE(rap, 1.0);
    }
  }
  std::uniform_int_distribution<long> count(0, 1000);
  for (int c = 0; c < 1000; ++c) {
    const GSBCounts g{count(rng), count(rng), count(rng) + 1};
    const double d = gsb_delta(g);
    EXPECT_GE(d, -1.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(ScoredPairs, FromDataset) {
  std::vector<SampleRecord> records = {{"q", "a", {0.0}, Label::Positive, {Score(0.5)}},
                                       {"q", "b", {0.0}, std::nullopt, {Score(0.5)}}};
  const Dataset d(records);
  const std::vector<double> scores = {0.1, 0.2};
  testing::expect_error_containing([&] { make_scored_pairs(d, scores); }, "record 2");
  const std::vector<double> short_scores = {0.1};
  EXPECT_THROW(make_scored_pairs(d, short_scores), Error);
}

}  // namespace
}  // namespace govern
