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

#ifndef GOVERN_TRAINING_HPP_
#define GOVERN_TRAINING_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "govern/ensemble.hpp"
#include "govern/student.hpp"

namespace govern {

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<double> dev_prauc;
  std::size_t skipped = 0;
};

struct TrainingResult {
  StudentModel model;
  std::vector<EpochLog> log;
  /// Epoch (1-based) whose parameters were returned.
  std::size_t selected_epoch = 0;
};

/// Regresses the student onto combiner targets with MSE.
///
/// Every epoch visits the records in a seeded permutation. Targets are
/// formed per batch from the live student outputs, before that batch's
/// update; skipped samples add zero loss but still count toward the batch
/// mean. With a labeled `dev` set the epoch with the best pair-level
/// PR-AUC is returned (earliest on ties); otherwise the last epoch.
TrainingResult distill(StudentModel model, const Dataset& data, const Combiner& combiner,
                       const TrainConfig& config, const Dataset* dev = nullptr);

/// Cross-entropy training on labels, same loop and determinism contract.
TrainingResult train_supervised(StudentModel model, const Dataset& data, const TrainConfig& config,
                                const Dataset* dev = nullptr);

/// Student scores for every record of `data`.
std::vector<double> predict(const StudentModel& model, const Dataset& data);

/// Pair-level PR-AUC of the student on a labeled set.
double evaluate_prauc(const StudentModel& model, const Dataset& data);

/// One CSV line per epoch: epoch,mean_loss,dev_prauc,skipped_sample_count.
/// A missing dev score is written as "nan".
void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);

}  // namespace govern

#endif  // GOVERN_TRAINING_HPP_
