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
#include <sstream>

#include "gradient_checks.hpp"
#include "govern/random.hpp"
#include "govern/student.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace govern {
namespace {

const std::vector<int> kSizes = {8, 16, 1};

TEST(InitModel, DeterministicPerSeed) {
  const StudentModel a = init_model(kSizes, 7);
  const StudentModel b = init_model(kSizes, 7);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_NE(a.parameters(), init_model(kSizes, 8).parameters());
}

TEST(InitModel, ParameterCountAndLayout) {
  const StudentModel m = init_model(kSizes, 7);
  EXPECT_EQ(m.parameters().size(), 8 * 16 + 16 + 16 * 1 + 1);
  EXPECT_EQ(parameter_count(kSizes), 161u);
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / (kSizes[l] + kSizes[l + 1]));
    EXPECT_LE(m.weights(l).cwiseAbs().maxCoeff(), limit);
    EXPECT_TRUE(m.bias(l).isZero(0.0));
  }
  // The second layer's weights start right after the first layer's biases.
  EXPECT_EQ(m.weight_offset(1), 8u * 16u + 16u);
  EXPECT_EQ(m.weights(1)(0, 3), m.parameters()(8 * 16 + 16 + 3));
  EXPECT_EQ(m.weights(0)(2, 5), m.parameters()(2 * 8 + 5));
}

TEST(InitModel, InvalidSizes) {
  EXPECT_THROW(init_model(std::vector<int>{8, 0, 1}, 7), Error);
  EXPECT_THROW(init_model(std::vector<int>{8, 2}, 7), Error);
  EXPECT_THROW(init_model(std::vector<int>{1}, 7), Error);
}

TEST(Forward, ZeroParametersGiveHalf) {
  StudentModel m = init_model(kSizes, 1);
  m.parameters().setZero();
  const std::vector<double> x = {1, -2, 3, 0.5, 9, -7, 0, 1};
  EXPECT_EQ(forward(m, x).value(), 0.5);
}

TEST(Forward, DeterministicAndDimensionChecked) {
  const StudentModel m = init_model(kSizes, 7);
  const std::vector<double> x = {0.1, 0.2, -0.3, 0.4, 1.5, -0.6, 0.7, 0.8};
  EXPECT_EQ(forward(m, x).value(), forward(m, x).value());
  const std::vector<double> short_x = {0.1, 0.2};
  EXPECT_THROW(forward(m, short_x), Error);
}

TEST(Forward, OutputsStrictlyInsideUnitInterval) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  StudentModel m = init_model(kSizes, 9);
  m.parameters() *= 20.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(8);
    for (double& v : x) v = normal(rng) * (i % 2 ? 100.0 : 1.0);
    const double y = forward(m, x).value();
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 1.0);
  }
}

TEST(Forward, BatchMatchesSingle) {
  const StudentModel m = init_model(kSizes, 3);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 5);
  const auto batch = forward_batch(m, x);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const std::vector<double> col(x.col(j).data(), x.col(j).data() + 8);
    EXPECT_NEAR(forward(m, col).value(), batch(j), 1e-15);
  }
}

TEST(LossAndGradient, ZeroAtExactTargets) {
  const StudentModel m = init_model(kSizes, 3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 6);
  const Eigen::VectorXd t = forward_batch(m, x).transpose();
  const auto lg = loss_and_gradient(m, x, t, LossKind::MSE);
  EXPECT_EQ(lg.loss, 0.0);
  EXPECT_TRUE(lg.gradient.isZero(0.0));
}

TEST(LossAndGradient, ClosedFormSingleUnit) {
  const double w = 0.7;
  const double b = -0.2;
  const double x = 1.3;
  const double t = 0.9;
  const StudentModel m(std::vector<int>{1, 1}, Eigen::Vector2d(w, b));
  Eigen::MatrixXd in(1, 1);
  in(0, 0) = x;
  const auto lg = loss_and_gradient(m, in, Eigen::VectorXd(Eigen::VectorXd::Constant(1, t)), LossKind::MSE);
  const double s = 1.0 / (1.0 + std::exp(-(w * x + b)));
  const double ds = s * (1.0 - s);
  EXPECT_NEAR(lg.loss, (s - t) * (s - t), 1e-15);
  EXPECT_NEAR(lg.gradient(0), 2.0 * (s - t) * ds * x, 1e-15);
  EXPECT_NEAR(lg.gradient(1), 2.0 * (s - t) * ds, 1e-15);
}

TEST(LossAndGradient, Errors) {
  const StudentModel m = init_model(kSizes, 3);
  const Eigen::VectorXd two = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd none(0);
  const Eigen::VectorXd three = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(loss_and_gradient(m, Eigen::MatrixXd::Zero(7, 2), two, LossKind::MSE), Error);
  EXPECT_THROW(loss_and_gradient(m, Eigen::MatrixXd::Zero(8, 0), none, LossKind::MSE), Error);
  EXPECT_THROW(loss_and_gradient(m, Eigen::MatrixXd::Zero(8, 2), three, LossKind::MSE), Error);
}

TEST(LossAndGradient, MatchesFiniteDifferencesMSE) {
  const auto r = props::check_gradients(21, 50, LossKind::MSE);
  EXPECT_EQ(r.cases, 50u);
  EXPECT_LT(r.worst_error, 1e-4);
}

TEST(LossAndGradient, MatchesFiniteDifferencesCrossEntropy) {
  const auto r = props::check_gradients(22, 50, LossKind::CrossEntropy);
  EXPECT_EQ(r.cases, 50u);
  EXPECT_LT(r.worst_error, 1e-4);
}

TEST(LossAndGradient, CrossEntropyLossValue) {
  const StudentModel m = init_model(kSizes, 3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 4);
  const Eigen::VectorXd t = Eigen::Vector4d(1, 0, 0.3, 1);
  const double expected = oracle::forward_loss(m, x, t, LossKind::CrossEntropy);
  EXPECT_NEAR(loss_and_gradient(m, x, t, LossKind::CrossEntropy).loss, expected, 1e-14);
}

TEST(LossKindNames, Parse) {
  EXPECT_EQ(parse_loss_kind("mse"), LossKind::MSE);
  EXPECT_EQ(parse_loss_kind("cross-entropy"), LossKind::CrossEntropy);
  EXPECT_EQ(parse_loss_kind("ce"), LossKind::CrossEntropy);
  EXPECT_THROW(parse_loss_kind("hinge"), UsageError);
}

TEST(Adam, ZeroGradientIsFixedPoint) {
  StudentModel m = init_model(kSizes, 3);
  const auto before = m.parameters();
  AdamState state = AdamState::zeros(before.size());
  TrainConfig config;
  adam_step(m, Eigen::VectorXd::Zero(before.size()), state, config);
  EXPECT_EQ(m.parameters(), before);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepIsSignScaledLearningRate) {
  StudentModel m(std::vector<int>{2, 1}, Eigen::Vector3d(0.1, -0.2, 0.3));
  const auto before = m.parameters();
  AdamState state = AdamState::zeros(3);
  TrainConfig config;
  config.learning_rate = 0.01;
  config.warmup_steps = 0;
  const Eigen::Vector3d g(0.5, -2.0, 1e-3);
  adam_step(m, g, state, config);
  for (int i = 0; i < 3; ++i) {
    const double expected = -0.01 * g(i) / (std::abs(g(i)) + config.adam_epsilon);
    EXPECT_NEAR(m.parameters()(i) - before(i), expected, 1e-15);
  }
}

TEST(Adam, WarmupRamp) {
  TrainConfig config;
  config.learning_rate = 0.02;
  config.warmup_steps = 10;
  EXPECT_DOUBLE_EQ(warmup_learning_rate(config, 5), 0.01);
  EXPECT_DOUBLE_EQ(warmup_learning_rate(config, 10), 0.02);
  EXPECT_DOUBLE_EQ(warmup_learning_rate(config, 1000), 0.02);
  config.warmup_steps = 0;
  EXPECT_DOUBLE_EQ(warmup_learning_rate(config, 1), 0.02);
}

TEST(Adam, ShapeMismatch) {
  StudentModel m = init_model(kSizes, 3);
  AdamState state = AdamState::zeros(m.parameters().size());
  EXPECT_THROW(adam_step(m, Eigen::VectorXd::Zero(3), state, TrainConfig{}), Error);
}

TEST(TrainConfigValidation, RejectsBadValues) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.adam_beta1 = 1.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(LossDescentProperty, FewIncreasesAtSmallLearningRate) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    StudentModel m = init_model(std::vector<int>{4, 8, 1}, rng());
    Eigen::MatrixXd x(4, 32);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    Eigen::VectorXd t(32);
    for (Eigen::Index j = 0; j < 32; ++j) t(j) = unit(rng);
    TrainConfig config;
    config.learning_rate = 1e-3;
    config.warmup_steps = 0;
    AdamState state = AdamState::zeros(m.parameters().size());
    double previous = loss_and_gradient(m, x, t, LossKind::MSE).loss;
    int increases = 0;
    for (int step = 0; step < 100; ++step) {
      const auto lg = loss_and_gradient(m, x, t, LossKind::MSE);
      adam_step(m, lg.gradient, state, config);
      const double now = loss_and_gradient(m, x, t, LossKind::MSE).loss;
      if (now > previous + 1e-6) ++increases;
      previous = now;
    }
    EXPECT_LE(increases, 5) << "trial " << trial;
  }
}

TEST(ModelFile, RoundTripIsBitExact) {
  testing::TempDir dir;
  const StudentModel m = init_model(kSizes, 7);
  save_model(m, dir / "m.txt");
  const StudentModel r = load_model(dir / "m.txt");
  EXPECT_EQ(r, m);
  CounterRng rng(99, 0);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> x(8);
    for (double& v : x) v = rng.normal();
    EXPECT_EQ(forward(r, x).value(), forward(m, x).value());
  }
  const std::string text = testing::read_file(dir / "m.txt");
  EXPECT_EQ(text.rfind("GOVERN-MODEL v1\n8 16 1\n", 0), 0u);
}

TEST(ModelFile, Errors) {
  std::stringstream full;
  write_model(full, init_model(std::vector<int>{2, 1}, 1));
  std::string text = full.str();
  std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  testing::expect_error_containing([&] { read_model(truncated); }, "parameter count mismatch");
  std::istringstream future("GOVERN-MODEL v2\n2 1\n0\n0\n0\n");
  testing::expect_error_containing([&] { read_model(future); }, "unsupported version");
  std::istringstream junk("hello\n");
  EXPECT_THROW(read_model(junk), Error);
  EXPECT_THROW(load_model("/nonexistent/model.txt"), Error);
}

}  // namespace
}  // namespace govern
