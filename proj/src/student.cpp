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

#include "govern/student.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "govern/random.hpp"

namespace govern {

std::string_view to_string(LossKind kind) noexcept {
  return kind == LossKind::MSE ? "mse" : "cross-entropy";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "mse") return LossKind::MSE;
  if (name == "cross-entropy" || name == "ce") return LossKind::CrossEntropy;
  throw UsageError("unknown loss: " + std::string(name));
}

std::size_t parameter_count(std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2) throw Error("a model needs at least an input and an output layer");
  if (layer_sizes.back() != 1) throw Error("output layer must have size 1");
  std::size_t count = 0;
  for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
    if (layer_sizes[l] <= 0) {
      throw Error("layer " + std::to_string(l) + " has non-positive size " +
                  std::to_string(layer_sizes[l]));
    }
    if (l > 0) {
      count += static_cast<std::size_t>(layer_sizes[l - 1]) * layer_sizes[l] + layer_sizes[l];
    }
  }
  return count;
}

Score forward(const StudentModel& model, std::span<const double> features) {
  const Eigen::Map<const Eigen::VectorXd> x(features.data(), static_cast<Eigen::Index>(features.size()));
  return Score(forward_batch(model, x)(0));
}

StudentModel init_model(std::span<const int> layer_sizes, std::uint64_t seed) {
  Eigen::VectorXd params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count(layer_sizes)));
  CounterRng rng(seed, 0);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(in) * out; ++k) {
      params(off + k) = (2.0 * rng.uniform() - 1.0) * limit;
    }
    off += static_cast<Eigen::Index>(in) * out + out;
  }
  return StudentModel(std::vector<int>(layer_sizes.begin(), layer_sizes.end()), std::move(params));
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw UsageError("learning rate must be positive");
  if (batch_size == 0) throw UsageError("batch size must be positive");
  if (epochs == 0) throw UsageError("epochs must be positive");
  if (!(adam_beta1 > 0 && adam_beta1 < 1)) throw UsageError("adam beta1 must lie in (0,1)");
  if (!(adam_beta2 > 0 && adam_beta2 < 1)) throw UsageError("adam beta2 must lie in (0,1)");
  if (!(adam_epsilon > 0)) throw UsageError("adam epsilon must be positive");
}

double warmup_learning_rate(const TrainConfig& config, std::uint64_t step) noexcept {
  if (config.warmup_steps == 0 || step >= config.warmup_steps) return config.learning_rate;
  return config.learning_rate * static_cast<double>(step) / static_cast<double>(config.warmup_steps);
}

void adam_step(StudentModel& model, const Eigen::VectorXd& gradient, AdamState& state,
               const TrainConfig& config) {
  auto& params = model.parameters();
  if (gradient.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw Error("adam_step: shape mismatch");
  }
  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  state.first_moment = b1 * state.first_moment + (1.0 - b1) * gradient;
  state.second_moment = b2 * state.second_moment + (1.0 - b2) * gradient.cwiseProduct(gradient);
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);
  const double lr = warmup_learning_rate(config, state.step);
  params.array() -= lr * (state.first_moment.array() / correction1) /
                    ((state.second_moment.array() / correction2).sqrt() + config.adam_epsilon);
}

void write_model(std::ostream& out, const StudentModel& model) {
  out << "GOVERN-MODEL v1\n";
  const auto& sizes = model.layer_sizes();
  for (std::size_t i = 0; i < sizes.size(); ++i) out << (i ? " " : "") << sizes[i];
  out << '\n';
  for (double p : model.parameters()) out << format_real17(p) << '\n';
}

StudentModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty model file");
  if (line != "GOVERN-MODEL v1") {
    if (line.rfind("GOVERN-MODEL ", 0) == 0) throw Error("unsupported version: " + line);
    throw Error("not a model file");
  }
  if (!std::getline(in, line)) throw Error("missing architecture header");
  std::vector<int> sizes;
  {
    std::istringstream header(line);
    std::string token;
    while (header >> token) {
      const double v = parse_real(token, "architecture header");
      if (v != std::floor(v) || v < 1 || v > 1e9) throw Error("bad layer size: " + token);
      sizes.push_back(static_cast<int>(v));
    }
  }
  const std::size_t expected = parameter_count(sizes);
  std::vector<double> values;
  values.reserve(expected);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(parse_real(line, "model parameter"));
  }
  if (values.size() != expected) {
    throw Error("parameter count mismatch: header implies " + std::to_string(expected) + ", file has " +
                std::to_string(values.size()));
  }
  return StudentModel(std::move(sizes),
                      Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

void save_model(const StudentModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model: " + path.string());
  write_model(out, model);
  if (!out) throw Error("write failed: " + path.string());
}

StudentModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model: " + path.string());
  try {
    return read_model(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace govern
