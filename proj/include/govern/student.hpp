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

// Feed-forward student scorer: tanh hidden layers, one sigmoid output.
//
// All parameters live in one flat vector. Layer l contributes its weight
// matrix (out x in, row-major) followed by its bias vector, so the layout
// is exactly the model-file layout.

#ifndef GOVERN_STUDENT_HPP_
#define GOVERN_STUDENT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "govern/core.hpp"

namespace govern {

enum class LossKind { MSE, CrossEntropy };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view name);

/// Parameter count for a layer-size list, validating it on the way.
std::size_t parameter_count(std::span<const int> layer_sizes);

template <typename Scalar>
class Mlp {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using WeightMap = Eigen::Map<const RowMajorMatrix>;
  using BiasMap = Eigen::Map<const Vector>;

  Mlp(std::vector<int> layer_sizes, Vector parameters)
      : sizes_(std::move(layer_sizes)), params_(std::move(parameters)) {
    const std::size_t expected = parameter_count(sizes_);
    if (static_cast<std::size_t>(params_.size()) != expected) {
      throw Error("parameter count mismatch: expected " + std::to_string(expected) + ", got " +
                  std::to_string(params_.size()));
    }
    offsets_.reserve(sizes_.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      offsets_.push_back(off);
      off += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
    }
  }

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  std::size_t layer_count() const noexcept { return sizes_.size() - 1; }
  Eigen::Index input_dim() const noexcept { return sizes_.front(); }

  const Vector& parameters() const noexcept { return params_; }
  Vector& parameters() noexcept { return params_; }

  WeightMap weights(std::size_t layer) const {
    return WeightMap(params_.data() + offsets_[layer], sizes_[layer + 1], sizes_[layer]);
  }
  BiasMap bias(std::size_t layer) const {
    return BiasMap(params_.data() + offsets_[layer] +
                       static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1],
                   sizes_[layer + 1]);
  }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  template <typename NewScalar>
  Mlp<NewScalar> cast() const {
    return Mlp<NewScalar>(sizes_, params_.template cast<NewScalar>());
  }

  bool operator==(const Mlp& other) const {
    return sizes_ == other.sizes_ && params_ == other.params_;
  }

 private:
  std::vector<int> sizes_;
  Vector params_;
  std::vector<std::size_t> offsets_;
};

using StudentModel = Mlp<double>;

namespace detail {

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <typename Scalar>
void check_batch(const Mlp<Scalar>& model, Eigen::Index rows) {
  if (rows != model.input_dim()) {
    throw Error("feature dimension mismatch: model expects " + std::to_string(model.input_dim()) +
                ", got " + std::to_string(rows));
  }
}

}  // namespace detail

/// Output pre-activations for a batch stored one sample per column.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> forward_logits(const Mlp<Scalar>& model,
                                                        const Eigen::MatrixBase<Derived>& inputs) {
  detail::check_batch(model, inputs.rows());
  typename Mlp<Scalar>::Matrix act = inputs.template cast<Scalar>();
  const std::size_t last = model.layer_count() - 1;
  for (std::size_t l = 0; l < last; ++l) {
    act = ((model.weights(l) * act).colwise() + model.bias(l)).array().tanh().matrix();
  }
  return (model.weights(last) * act).colwise() + model.bias(last);
}

/// Sigmoid outputs for a batch stored one sample per column. Saturated
/// outputs are pinned to the nearest representable value inside (0,1).
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> forward_batch(const Mlp<Scalar>& model,
                                                       const Eigen::MatrixBase<Derived>& inputs) {
  const Scalar lo = std::numeric_limits<Scalar>::min();
  const Scalar hi = Scalar(1) - std::numeric_limits<Scalar>::epsilon() / Scalar(2);
  return forward_logits(model, inputs).unaryExpr(
      [lo, hi](Scalar z) { return std::clamp(detail::sigmoid(z), lo, hi); });
}

Score forward(const StudentModel& model, std::span<const double> features);

template <typename Scalar>
struct LossAndGradient {
  Scalar loss;
  typename Mlp<Scalar>::Vector gradient;
};

/// Mean loss over the batch (one sample per column of `inputs`) and its
/// gradient with respect to every parameter, by reverse-mode
/// differentiation. Targets are treated as constants.
template <typename Scalar, typename Derived>
LossAndGradient<Scalar> loss_and_gradient(const Mlp<Scalar>& model,
                                          const Eigen::MatrixBase<Derived>& inputs,
                                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& targets,
                                          LossKind kind) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  using RowMajorMatrix = typename Mlp<Scalar>::RowMajorMatrix;
  detail::check_batch(model, inputs.rows());
  const Eigen::Index batch = inputs.cols();
  if (batch == 0) throw Error("empty batch");
  if (targets.size() != batch) throw Error("target count does not match batch size");

  const std::size_t layers = model.layer_count();
  std::vector<Matrix> acts;
  acts.reserve(layers);
  acts.push_back(inputs.template cast<Scalar>());
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    acts.push_back(((model.weights(l) * acts.back()).colwise() + model.bias(l)).array().tanh().matrix());
  }
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> logits =
      (model.weights(layers - 1) * acts.back()).colwise() + model.bias(layers - 1);

  const Scalar inv_batch = Scalar(1) / Scalar(batch);
  Scalar loss(0);
  Matrix delta(1, batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const Scalar z = logits(j);
    const Scalar p = detail::sigmoid(z);
    const Scalar t = targets(j);
    if (kind == LossKind::MSE) {
      loss += (p - t) * (p - t);
      delta(0, j) = Scalar(2) * (p - t) * p * (Scalar(1) - p) * inv_batch;
    } else {
      loss += detail::softplus(z) - t * z;
      delta(0, j) = (p - t) * inv_batch;
    }
  }
  loss *= inv_batch;

  typename Mlp<Scalar>::Vector grad(model.parameters().size());
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::Index out = model.layer_sizes()[l + 1];
    const Eigen::Index in = model.layer_sizes()[l];
    const std::size_t off = model.weight_offset(l);
    Eigen::Map<RowMajorMatrix>(grad.data() + off, out, in) = delta * acts[l].transpose();
    grad.segment(static_cast<Eigen::Index>(off) + out * in, out) = delta.rowwise().sum();
    if (l > 0) {
      delta = ((model.weights(l).transpose() * delta).array() *
               (Scalar(1) - acts[l].array().square()))
                  .matrix();
    }
  }
  return {loss, std::move(grad)};
}

/// Glorot-uniform weights, zero biases. Deterministic per seed on every
/// platform (uses its own uniform mapping, not std distributions).
StudentModel init_model(std::span<const int> layer_sizes, std::uint64_t seed);

struct TrainConfig {
  double learning_rate = 3e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 10;
  std::size_t warmup_steps = 100;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.99;
  double adam_epsilon = 1e-8;
  /// Unset: MSE for distillation, cross-entropy for supervised training.
  std::optional<LossKind> loss;
  /// Worker cap for per-sample work inside a batch. Never changes results.
  unsigned threads = 1;

  void validate() const;
};

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t step = 0;

  static AdamState zeros(Eigen::Index size) {
    return {Eigen::VectorXd::Zero(size), Eigen::VectorXd::Zero(size), 0};
  }
};

/// Learning rate after linear warmup: lr * min(1, step / warmup_steps).
double warmup_learning_rate(const TrainConfig& config, std::uint64_t step) noexcept;

/// One bias-corrected Adam update in place. Advances `state.step` first,
/// so the first call uses step 1.
void adam_step(StudentModel& model, const Eigen::VectorXd& gradient, AdamState& state,
               const TrainConfig& config);

// Model file: "GOVERN-MODEL v1", the layer sizes, then one parameter per
// line with 17 significant digits.
void write_model(std::ostream& out, const StudentModel& model);
StudentModel read_model(std::istream& in);
void save_model(const StudentModel& model, const std::filesystem::path& path);
StudentModel load_model(const std::filesystem::path& path);

}  // namespace govern

#endif  // GOVERN_STUDENT_HPP_
