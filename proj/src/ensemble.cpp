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

#include "govern/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace govern {

namespace {

void require_teachers(std::span<const Score> teachers) {
  if (teachers.empty()) throw Error("teacher score vector is empty");
}

double clamp_unit(double x) noexcept { return std::clamp(x, 0.0, 1.0); }

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Average of the teachers with a nonzero 0/1 weight, summed in index order.
double masked_mean(std::span<const Score> teachers, const std::vector<double>& mask) {
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    if (mask[i] != 0.0) {
      sum += teachers[i].value();
      count += 1.0;
    }
  }
  return sum / count;
}

// Shared body of the two confidence-weighted combiners. `selected` is the
// 0/1 gate; every gated-out teacher keeps weight zero.
EnsembleTarget confidence_weighted(std::span<const Score> teachers, Label label,
                                   const std::vector<double>& selected, Strategy strategy) {
  const std::size_t n = teachers.size();
  EnsembleTarget out;
  out.strategy = strategy;
  out.weights.assign(n, 0.0);
  out.raw_weights.assign(n, 0.0);

  double k = 0.0;
  double exp_sum = 0.0;
  std::vector<double> exp_loss(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (selected[i] == 0.0) continue;
    k += 1.0;
    exp_loss[i] = std::exp(ce_loss(teachers[i], label));
    exp_sum += exp_loss[i];
  }
  if (k == 1.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (selected[i] != 0.0) {
        out.weights[i] = 1.0;
        out.target = teachers[i];
      }
    }
    return out;
  }

  double raw_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (selected[i] == 0.0) continue;
    out.raw_weights[i] = (1.0 / k) * (1.0 - exp_loss[i] / exp_sum);
    raw_total += out.raw_weights[i];
  }
  double target = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.weights[i] = out.raw_weights[i] / raw_total;
    target += out.weights[i] * teachers[i].value();
  }
  out.target = Score(clamp_unit(target));
  return out;
}

}  // namespace

Orientation orientation(Score student, Score teacher) noexcept {
  if (teacher.value() > student.value()) return Orientation::Up;
  if (teacher.value() < student.value()) return Orientation::Down;
  return Orientation::Flat;
}

Orientation vote(std::span<const Orientation> orientations) {
  if (orientations.empty()) throw Error("cannot vote on an empty orientation vector");
  long sum = 0;
  for (Orientation o : orientations) sum += to_int(o);
  if (sum > 0) return Orientation::Up;
  if (sum < 0) return Orientation::Down;
  return Orientation::Flat;
}

EnsembleTarget govern_target(Score student, std::span<const Score> teachers) {
  require_teachers(teachers);
  std::vector<Orientation> grads;
  grads.reserve(teachers.size());
  for (Score t : teachers) grads.push_back(orientation(student, t));
  const int chi = to_int(vote(grads));

  EnsembleTarget out;
  out.strategy = Strategy::Govern;
  out.weights.resize(teachers.size());
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    out.weights[i] = chi * to_int(grads[i]) >= 0 ? 1.0 : 0.0;
  }
  out.target = Score(clamp_unit(masked_mean(teachers, out.weights)));
  return out;
}

EnsembleTarget mean_target(std::span<const Score> teachers) {
  require_teachers(teachers);
  EnsembleTarget out;
  out.strategy = Strategy::Mean;
  out.weights.assign(teachers.size(), 1.0);
  out.target = Score(clamp_unit(masked_mean(teachers, out.weights)));
  return out;
}

LRWeights lr_fit(const Dataset& dev, const LRFitConfig& config) {
  if (auto bad = dev.first_unlabeled()) {
    throw Error("lr_fit: record " + std::to_string(*bad + 1) + " (" + dev[*bad].question_id +
                ", " + dev[*bad].paragraph_id + ") is unlabeled");
  }
  const auto rows = static_cast<Eigen::Index>(dev.size());
  const auto cols = static_cast<Eigen::Index>(dev.teacher_count());
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& rec = dev[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols; ++c) {
      x(r, c) = rec.teacher_scores[static_cast<std::size_t>(c)].value();
    }
    y(r) = is_positive(*rec.label) ? 1.0 : 0.0;
  }
  const double positives = y.sum();
  if (positives == 0.0 || positives == static_cast<double>(rows)) {
    throw Error("single-class dev set");
  }

  LRWeights w{Eigen::VectorXd::Zero(cols), 0.0};
  const double inv_n = 1.0 / static_cast<double>(rows);
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    Eigen::VectorXd residual = ((x * w.coefficients).array() + w.bias).unaryExpr(&sigmoid).matrix() - y;
    Eigen::VectorXd grad_c = x.transpose() * residual * inv_n;
    const double grad_b = residual.sum() * inv_n;
    if (std::max(grad_c.cwiseAbs().maxCoeff(), std::abs(grad_b)) < config.tolerance) break;
    w.coefficients -= config.learning_rate * grad_c;
    w.bias -= config.learning_rate * grad_b;
  }
  return w;
}

EnsembleTarget lr_target(const LRWeights& weights, std::span<const Score> teachers) {
  if (static_cast<std::size_t>(weights.coefficients.size()) != teachers.size()) {
    throw Error("LR weights cover " + std::to_string(weights.coefficients.size()) +
                " teachers, sample has " + std::to_string(teachers.size()));
  }
  double z = weights.bias;
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    z += weights.coefficients(static_cast<Eigen::Index>(i)) * teachers[i].value();
  }
  EnsembleTarget out;
  out.strategy = Strategy::LRWeighted;
  out.weights.assign(weights.coefficients.data(),
                     weights.coefficients.data() + weights.coefficients.size());
  out.target = Score(sigmoid(z));
  return out;
}

double ce_loss(Score prediction, Label label) noexcept {
  const double p = std::clamp(prediction.value(), kCrossEntropyClamp, 1.0 - kCrossEntropyClamp);
  return is_positive(label) ? -std::log(p) : -std::log(1.0 - p);
}

EnsembleTarget govern_ca_target(Score student, std::span<const Score> teachers, Label label) {
  require_teachers(teachers);
  const int y = to_int(label);
  std::vector<double> selected(teachers.size());
  bool any = false;
  for (std::size_t i = 0; i < teachers.size(); ++i) {
    selected[i] = y * to_int(orientation(student, teachers[i])) > 0 ? 1.0 : 0.0;
    any = any || selected[i] != 0.0;
  }
  if (!any) {
    EnsembleTarget out;
    out.strategy = Strategy::GovernCA;
    out.weights.assign(teachers.size(), 0.0);
    out.raw_weights.assign(teachers.size(), 0.0);
    out.target = student;
    out.skipped = true;
    return out;
  }
  return confidence_weighted(teachers, label, selected, Strategy::GovernCA);
}

EnsembleTarget camkd_target(std::span<const Score> teachers, Label label) {
  require_teachers(teachers);
  return confidence_weighted(teachers, label, std::vector<double>(teachers.size(), 1.0),
                             Strategy::CAMKD);
}

void check_combiner(const Combiner& combiner, const Dataset& data) {
  if (combiner.needs_labels()) {
    if (auto bad = data.first_unlabeled()) {
      throw Error(std::string(to_string(combiner.strategy)) + " needs labels; record " +
                  std::to_string(*bad + 1) + " (" + data[*bad].question_id + ", " +
                  data[*bad].paragraph_id + ") is unlabeled");
    }
  }
  if (combiner.strategy == Strategy::LRWeighted) {
    if (!combiner.lr_weights) throw Error("lr strategy needs LR weights");
    if (static_cast<std::size_t>(combiner.lr_weights->coefficients.size()) != data.teacher_count()) {
      throw Error("LR weights cover " + std::to_string(combiner.lr_weights->coefficients.size()) +
                  " teachers, dataset has " + std::to_string(data.teacher_count()));
    }
  }
}

EnsembleTarget combine(const Combiner& combiner, Score student, const SampleRecord& record) {
  const std::span<const Score> teachers(record.teacher_scores);
  switch (combiner.strategy) {
    case Strategy::Mean: return mean_target(teachers);
    case Strategy::Govern: return govern_target(student, teachers);
    case Strategy::LRWeighted:
      if (!combiner.lr_weights) throw Error("lr strategy needs LR weights");
      return lr_target(*combiner.lr_weights, teachers);
    case Strategy::GovernCA:
    case Strategy::CAMKD:
      if (!record.label) {
        throw Error(std::string(to_string(combiner.strategy)) + " needs a label for (" +
                    record.question_id + ", " + record.paragraph_id + ")");
      }
      return combiner.strategy == Strategy::GovernCA
                 ? govern_ca_target(student, teachers, *record.label)
                 : camkd_target(teachers, *record.label);
  }
  throw Error("unknown strategy");
}

void write_lr_weights(std::ostream& out, const LRWeights& weights) {
  out << "GOVERN-LRW v1\n" << weights.coefficients.size() << '\n';
  for (Eigen::Index i = 0; i < weights.coefficients.size(); ++i) {
    out << format_real17(weights.coefficients(i)) << '\n';
  }
  out << format_real17(weights.bias) << '\n';
}

LRWeights read_lr_weights(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty LR weight file");
  if (line != "GOVERN-LRW v1") {
    if (line.rfind("GOVERN-LRW ", 0) == 0) throw Error("unsupported version: " + line);
    throw Error("not an LR weight file");
  }
  if (!std::getline(in, line)) throw Error("missing teacher count");
  const double count = parse_real(line, "teacher count");
  if (count < 1 || count != std::floor(count)) throw Error("invalid teacher count: " + line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(parse_real(line, "LR weight"));
  }
  if (values.size() != static_cast<std::size_t>(count) + 1) throw Error("parameter count mismatch");
  LRWeights w;
  w.coefficients = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                     static_cast<Eigen::Index>(values.size() - 1));
  w.bias = values.back();
  return w;
}

void save_lr_weights(const std::filesystem::path& path, const LRWeights& weights) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write LR weights: " + path.string());
  write_lr_weights(out, weights);
}

LRWeights load_lr_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open LR weights: " + path.string());
  return read_lr_weights(in);
}

}  // namespace govern
