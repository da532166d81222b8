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

#include "govern/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "govern/ensemble.hpp"
#include "govern/parallel.hpp"

namespace govern {

namespace {

constexpr std::uint64_t kBlockTrials = 4096;

// Running mean and sum of squared deviations for one block of trials.
struct Accumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  static Accumulator merge(const Accumulator& a, const Accumulator& b) noexcept {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    Accumulator out;
    out.count = a.count + b.count;
    const double n = static_cast<double>(out.count);
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * static_cast<double>(b.count) / n;
    out.m2 = a.m2 + b.m2 + delta * delta * static_cast<double>(a.count) * static_cast<double>(b.count) / n;
    return out;
  }
};

// Pairwise tree over blocks in index order; the shape depends only on the
// number of blocks.
Accumulator reduce_pairwise(std::vector<Accumulator> blocks) {
  if (blocks.empty()) return {};
  while (blocks.size() > 1) {
    std::vector<Accumulator> next;
    next.reserve((blocks.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < blocks.size(); i += 2) {
      next.push_back(Accumulator::merge(blocks[i], blocks[i + 1]));
    }
    if (blocks.size() % 2) next.push_back(blocks.back());
    blocks = std::move(next);
  }
  return blocks.front();
}

Moments to_moments(const Accumulator& acc) {
  return {acc.mean, acc.count > 1 ? acc.m2 / static_cast<double>(acc.count - 1) : 0.0};
}

std::size_t block_count(std::uint64_t trials) {
  return static_cast<std::size_t>((trials + kBlockTrials - 1) / kBlockTrials);
}

void check_vote_args(double p, int n) {
  if (n < 1 || n % 2 == 0) throw Error("voter count must be a positive odd integer, got " + std::to_string(n));
  if (!(p > 0.0 && p < 1.0)) throw Error("voter accuracy must lie in (0,1)");
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

std::string padded(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

BetaSpec::BetaSpec(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0 && beta > 0.0 && std::isfinite(alpha) && std::isfinite(beta))) {
    throw Error("Beta parameters must be positive and finite");
  }
}

double gamma_sample(double shape, CounterRng& rng) {
  if (shape < 1.0) {
    const double g = gamma_sample(shape + 1.0, rng);
    return g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Score beta_sample(const BetaSpec& spec, CounterRng& rng) {
  const double a = gamma_sample(spec.alpha(), rng);
  const double b = gamma_sample(spec.beta(), rng);
  const double sum = a + b;
  // Both draws can underflow to zero for tiny shapes.
  if (!(sum > 0.0)) return Score(rng.uniform() < spec.mean() ? 1.0 : 0.0);
  return Score(std::clamp(a / sum, 0.0, 1.0));
}

double condorcet_exact(double p, int n) {
  check_vote_args(p, n);
  if (n > 1001) throw Error("condorcet_exact supports at most 1001 voters");
  const int first = (n + 1) / 2;
  double total = 0.0;
  if (n <= 50) {
    // Every C(n, m) and intermediate product is an exact integer in double.
    double coeff = 1.0;
    for (int k = 0; k < first; ++k) coeff = coeff * (n - k) / (k + 1);
    for (int m = first; m <= n; ++m) {
      total += coeff * std::pow(p, m) * std::pow(1.0 - p, n - m);
      coeff = coeff * (n - m) / (m + 1);
    }
    return total;
  }
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(n + 1.0);
  for (int m = first; m <= n; ++m) {
    const double log_coeff = log_n_fact - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
    total += std::exp(log_coeff + m * log_p + (n - m) * log_q);
  }
  return total;
}

double condorcet_mc(double p, int n, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  check_vote_args(p, n);
  if (trials == 0) throw Error("trials must be positive");
  const int majority = (n + 1) / 2;
  std::vector<std::uint64_t> wins(block_count(trials), 0);
  parallel_for(wins.size(), threads, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(trials, begin + kBlockTrials);
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(seed, t);
      int right = 0;
      for (int v = 0; v < n; ++v) right += rng.uniform() < p ? 1 : 0;
      if (right >= majority) ++wins[b];
    }
  });
  std::uint64_t total = 0;
  for (auto w : wins) total += w;
  return static_cast<double>(total) / static_cast<double>(trials);
}

Moments beta_mean_ensemble_moments(const BetaSpec& spec, int n) {
  if (n < 1) throw Error("ensemble size must be positive");
  return {spec.mean(), spec.variance() / n};
}

std::string_view to_string(SimStrategy s) noexcept {
  switch (s) {
    case SimStrategy::SingleTeacher: return "single_teacher";
    case SimStrategy::MeanEnsemble: return "mean_ensemble";
    case SimStrategy::GovernEnsemble: return "govern_ensemble";
  }
  return "unknown";
}

std::size_t histogram_bin(double x) noexcept {
  const auto bin = static_cast<std::size_t>(std::clamp(x, 0.0, 1.0) * kHistogramBins);
  return std::min(bin, kHistogramBins - 1);
}

std::vector<SimResult> run_ensemble_sim(const BetaSpec& student, std::span<const BetaSpec> teachers,
                                        std::uint64_t trials, std::uint64_t seed, unsigned threads,
                                        std::vector<Histogram>* histograms) {
  if (teachers.empty()) throw Error("teacher list is empty");
  if (trials < 2) throw Error("need at least two trials");
  constexpr std::size_t kStrategies = 3;
  const std::size_t blocks = block_count(trials);
  std::vector<std::array<Accumulator, kStrategies>> acc(blocks);
  std::vector<std::array<Histogram, kStrategies>> hist(histograms ? blocks : 0);

  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(trials, begin + kBlockTrials);
    std::vector<Score> draws;
    draws.reserve(teachers.size());
    std::array<Histogram, kStrategies> local{};
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(seed, t);
      const Score s = beta_sample(student, rng);
      draws.clear();
      for (const auto& spec : teachers) draws.push_back(beta_sample(spec, rng));
      const std::array<double, kStrategies> values{
          draws.front().value(), mean_target(draws).target.value(), govern_target(s, draws).target.value()};
      for (std::size_t k = 0; k < kStrategies; ++k) {
        acc[b][k].add(values[k]);
        if (histograms) ++local[k][histogram_bin(values[k])];
      }
    }
    if (histograms) hist[b] = local;
  });

  std::vector<SimResult> out;
  for (std::size_t k = 0; k < kStrategies; ++k) {
    std::vector<Accumulator> column(blocks);
    for (std::size_t b = 0; b < blocks; ++b) column[b] = acc[b][k];
    const Moments m = to_moments(reduce_pairwise(std::move(column)));
    out.push_back({static_cast<SimStrategy>(k), m.mean, m.variance, trials});
  }
  if (histograms) {
    histograms->assign(kStrategies, Histogram{});
    for (const auto& block : hist) {
      for (std::size_t k = 0; k < kStrategies; ++k) {
        for (std::size_t i = 0; i < kHistogramBins; ++i) (*histograms)[k][i] += block[k][i];
      }
    }
  }
  return out;
}

Moments beta_sample_moments(const BetaSpec& spec, std::uint64_t trials, std::uint64_t seed,
                            unsigned threads, Histogram* histogram) {
  if (trials == 0) throw Error("trials must be positive");
  const std::size_t blocks = block_count(trials);
  std::vector<Accumulator> acc(blocks);
  std::vector<Histogram> hist(histogram ? blocks : 0);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(trials, begin + kBlockTrials);
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(seed, t);
      const double x = beta_sample(spec, rng).value();
      acc[b].add(x);
      if (histogram) ++hist[b][histogram_bin(x)];
    }
  });
  if (histogram) {
    histogram->fill(0);
    for (const auto& h : hist) {
      for (std::size_t i = 0; i < kHistogramBins; ++i) (*histogram)[i] += h[i];
    }
  }
  return to_moments(reduce_pairwise(std::move(acc)));
}

Moments bernoulli_mean_ensemble_sim(double p, int n, std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads) {
  if (!(p > 0.0 && p < 1.0)) throw Error("voter accuracy must lie in (0,1)");
  if (n < 1) throw Error("ensemble size must be positive");
  if (trials == 0) throw Error("trials must be positive");
  const std::size_t blocks = block_count(trials);
  std::vector<Accumulator> acc(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::uint64_t begin = b * kBlockTrials;
    const std::uint64_t end = std::min(trials, begin + kBlockTrials);
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(seed, t);
      int right = 0;
      for (int v = 0; v < n; ++v) right += rng.uniform() < p ? 1 : 0;
      acc[b].add(static_cast<double>(right) / n);
    }
  });
  return to_moments(reduce_pairwise(std::move(acc)));
}

Dataset synthesize_dataset(const SynthConfig& config) {
  if (config.n_questions == 0 || config.paragraphs_per_question == 0 || config.feature_dim == 0) {
    throw Error("question, paragraph and feature counts must be positive");
  }
  if (config.teachers.empty()) throw Error("at least one teacher is required");
  for (const auto& t : config.teachers) {
    if (!(t.flip_rate >= 0.0 && t.flip_rate <= 0.5)) throw Error("flip rate must lie in [0, 0.5]");
  }
  if (!std::isfinite(config.label_sharpness) || !std::isfinite(config.label_offset)) {
    throw Error("label parameters must be finite");
  }

  const std::size_t dim = config.feature_dim;
  std::vector<double> hidden(dim);
  {
    CounterRng rng(config.seed, 0);
    double norm = 0.0;
    for (auto& w : hidden) {
      w = rng.normal();
      norm += w * w;
    }
    norm = std::sqrt(norm);
    for (auto& w : hidden) w /= norm;
  }

  const std::size_t total = config.n_questions * config.paragraphs_per_question;
  const std::size_t q_width = std::to_string(config.n_questions - 1).size();
  const std::size_t p_width = std::to_string(config.paragraphs_per_question - 1).size();
  std::vector<SampleRecord> records(total);
  for (std::size_t k = 0; k < total; ++k) {
    CounterRng rng(config.seed, k + 1);
    auto& r = records[k];
    r.question_id = "q" + padded(k / config.paragraphs_per_question, q_width);
    r.paragraph_id = "p" + padded(k % config.paragraphs_per_question, p_width);
    r.features.resize(dim);
    double logit = config.label_offset;
    for (std::size_t d = 0; d < dim; ++d) {
      r.features[d] = rng.normal();
      logit += config.label_sharpness * hidden[d] * r.features[d];
    }
    const bool positive = rng.uniform() < sigmoid(logit);
    r.label = positive ? Label::Positive : Label::Negative;
    r.teacher_scores.reserve(config.teachers.size());
    for (const auto& t : config.teachers) {
      const bool flipped = rng.uniform() < t.flip_rate;
      r.teacher_scores.push_back(beta_sample(positive != flipped ? t.positive : t.negative, rng));
    }
  }
  return Dataset(std::move(records));
}

}  // namespace govern
