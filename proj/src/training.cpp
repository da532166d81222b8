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

#include "govern/training.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include "govern/metrics.hpp"
#include "govern/parallel.hpp"
#include "govern/random.hpp"

namespace govern {

namespace {

// Shuffle streams live at counters >= 1; counter 0 belongs to init_model.
constexpr std::uint64_t kShuffleStream = 1;

Eigen::MatrixXd feature_matrix(const Dataset& data) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.feature_dim()), static_cast<Eigen::Index>(data.size()));
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto& f = data[j].features;
    x.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  }
  return x;
}

// Target for record `index` given the student's current score on it;
// nullopt marks a skipped sample.
using TargetFn = std::function<std::optional<double>(std::size_t index, double student)>;

TrainingResult run_training(StudentModel model, const Dataset& data, const TrainConfig& config,
                            LossKind loss, const TargetFn& target_of, const Dataset* dev) {
  config.validate();
  if (model.input_dim() != static_cast<Eigen::Index>(data.feature_dim())) {
    throw Error("model expects " + std::to_string(model.input_dim()) + " features, dataset has " +
                std::to_string(data.feature_dim()));
  }
  if (dev && dev->feature_dim() != data.feature_dim()) throw Error("dev set feature dimension differs");

  const Eigen::MatrixXd features = feature_matrix(data);
  const std::size_t n = data.size();
  AdamState adam = AdamState::zeros(model.parameters().size());

  TrainingResult result{model, {}, 0};
  std::optional<double> best_dev;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    CounterRng shuffle_rng(config.seed, kShuffleStream + epoch);
    const auto order = permutation(n, shuffle_rng);
    double loss_sum = 0.0;
    std::size_t skipped = 0;

    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      const auto batch = static_cast<Eigen::Index>(end - begin);
      Eigen::MatrixXd xb(features.rows(), batch);
      for (Eigen::Index j = 0; j < batch; ++j) xb.col(j) = features.col(static_cast<Eigen::Index>(order[begin + j]));

      const Eigen::RowVectorXd student = forward_batch(model, xb);
      std::vector<std::optional<double>> targets(static_cast<std::size_t>(batch));
      parallel_for(targets.size(), config.threads, [&](std::size_t j) {
        targets[j] = target_of(order[begin + j], student(static_cast<Eigen::Index>(j)));
      });

      std::vector<Eigen::Index> kept;
      for (std::size_t j = 0; j < targets.size(); ++j) {
        if (targets[j]) kept.push_back(static_cast<Eigen::Index>(j));
      }
      skipped += targets.size() - kept.size();

      Eigen::VectorXd gradient = Eigen::VectorXd::Zero(model.parameters().size());
      if (!kept.empty()) {
        Eigen::MatrixXd xk(xb.rows(), static_cast<Eigen::Index>(kept.size()));
        Eigen::VectorXd tk(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) {
          xk.col(static_cast<Eigen::Index>(k)) = xb.col(kept[k]);
          tk(static_cast<Eigen::Index>(k)) = *targets[static_cast<std::size_t>(kept[k])];
        }
        // Skipped samples count in the batch mean with zero loss.
        const double share = static_cast<double>(kept.size()) / static_cast<double>(batch);
        auto lg = loss_and_gradient(model, xk, tk, loss);
        gradient = lg.gradient * share;
        loss_sum += lg.loss * static_cast<double>(kept.size());
      }
      adam_step(model, gradient, adam, config);
    }

    EpochLog entry{epoch, loss_sum / static_cast<double>(n), std::nullopt, skipped};
    if (dev) {
      entry.dev_prauc = evaluate_prauc(model, *dev);
      if (!best_dev || *entry.dev_prauc > *best_dev) {
        best_dev = entry.dev_prauc;
        result.model = model;
        result.selected_epoch = epoch;
      }
    }
    result.log.push_back(entry);
  }
  if (!dev) {
    result.model = std::move(model);
    result.selected_epoch = config.epochs;
  }
  return result;
}

}  // namespace

TrainingResult distill(StudentModel model, const Dataset& data, const Combiner& combiner,
                       const TrainConfig& config, const Dataset* dev) {
  check_combiner(combiner, data);
  const LossKind loss = config.loss.value_or(LossKind::MSE);
  return run_training(
      std::move(model), data, config, loss,
      [&](std::size_t index, double student) -> std::optional<double> {
        const auto t = combine(combiner, Score(student), data[index]);
        if (t.skipped) return std::nullopt;
        return t.target.value();
      },
      dev);
}

TrainingResult train_supervised(StudentModel model, const Dataset& data, const TrainConfig& config,
                                const Dataset* dev) {
  if (auto bad = data.first_unlabeled()) {
    throw Error("supervised training needs labels; record " + std::to_string(*bad + 1) + " (" +
                data[*bad].question_id + ", " + data[*bad].paragraph_id + ") is unlabeled");
  }
  const LossKind loss = config.loss.value_or(LossKind::CrossEntropy);
  return run_training(
      std::move(model), data, config, loss,
      [&](std::size_t index, double) -> std::optional<double> {
        return is_positive(*data[index].label) ? 1.0 : 0.0;
      },
      dev);
}

std::vector<double> predict(const StudentModel& model, const Dataset& data) {
  const Eigen::RowVectorXd out = forward_batch(model, feature_matrix(data));
  return {out.data(), out.data() + out.size()};
}

double evaluate_prauc(const StudentModel& model, const Dataset& data) {
  const auto scores = predict(model, data);
  const auto pairs = make_scored_pairs(data, scores);
  return pr_auc(qp_pr_curve(pairs));
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  for (const auto& e : log) {
    out << e.epoch << ',' << format_real(e.mean_loss) << ','
        << (e.dev_prauc ? format_real(*e.dev_prauc) : std::string("nan")) << ',' << e.skipped << '\n';
  }
}

}  // namespace govern
