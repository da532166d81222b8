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


// Random (model, batch) pairs checked against finite differences.

#ifndef GOVERN_TESTS_GRADIENT_CHECKS_HPP_
#define GOVERN_TESTS_GRADIENT_CHECKS_HPP_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "govern/student.hpp"
#include "oracles.hpp"

namespace govern::props {

struct GradientCase {
  StudentModel model;
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;
};

/// Up to three hidden layers of width 1..6, batch 1..8, parameters at
/// twice the Glorot scale so tanh units leave their linear range.
inline GradientCase random_gradient_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(1, 6);
  std::uniform_int_distribution<int> depth(0, 3);
  std::uniform_int_distribution<int> batch(1, 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> sizes{width(rng)};
  for (int h = depth(rng); h > 0; --h) sizes.push_back(width(rng));
  sizes.push_back(1);
  StudentModel model = init_model(sizes, rng());
  model.parameters() *= 2.0;
  for (Eigen::Index i = 0; i < model.parameters().size(); ++i) model.parameters()(i) += 0.1 * normal(rng);
  const int n = batch(rng);
  Eigen::MatrixXd x(sizes.front(), n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  Eigen::VectorXd t(n);
  for (int j = 0; j < n; ++j) t(j) = unit(rng);
  return {std::move(model), std::move(x), std::move(t)};
}

struct GradientReport {
  std::size_t cases = 0;
  double worst_error = 0.0;
};

inline GradientReport check_gradients(std::uint64_t seed, std::size_t cases, LossKind kind) {
  std::mt19937_64 rng(seed);
  GradientReport report;
  for (; report.cases < cases; ++report.cases) {
    const GradientCase c = random_gradient_case(rng);
    const auto analytic = loss_and_gradient(c.model, c.inputs, c.targets, kind);
    const Eigen::VectorXd numeric = oracle::finite_difference_gradient(c.model, c.inputs, c.targets, kind);
    report.worst_error = std::max(report.worst_error, oracle::gradient_error(analytic.gradient, numeric));
  }
  return report;
}

}  // namespace govern::props

#endif  // GOVERN_TESTS_GRADIENT_CHECKS_HPP_
