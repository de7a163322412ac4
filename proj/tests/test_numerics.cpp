// Copyright 2026 The alstrat Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "alstrat/adam.hpp"
#include "alstrat/finite_diff.hpp"
#include "alstrat/mlp.hpp"
#include "alstrat/rng.hpp"

namespace alstrat {
namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Evaluates every neuron with explicit loops; shares no code with Mlp.
std::vector<double> PerNeuronForward(const Mlp& net, std::vector<double> x) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const DenseLayer& layer = net.layer(l);
    const bool last = l + 1 == net.num_layers();
    std::vector<double> next(static_cast<std::size_t>(layer.weights.rows()));
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      double z = layer.bias[i];
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        z += layer.weights(i, j) * x[static_cast<std::size_t>(j)];
      }
      const bool linear = last && net.output_activation() == Activation::kIdentity;
      next[static_cast<std::size_t>(i)] = linear ? z : Sigmoid(z);
    }
    x = std::move(next);
  }
  return x;
}

Eigen::VectorXd RandomVector(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 2.0 * UniformUnit(rng) - 1.0;
  return v;
}

TEST(MlpForward, IdentityLinearLayer) {
  Mlp net({2, 2});
  net.layer(0).weights = Eigen::Matrix2d::Identity();
  const Eigen::VectorXd out = net.Forward(Eigen::Vector2d(1.5, -2.0));
  EXPECT_DOUBLE_EQ(out[0], 1.5);
  EXPECT_DOUBLE_EQ(out[1], -2.0);
}

TEST(MlpForward, ZeroHiddenWeightsGiveHalfTimesOutputWeight) {
  Mlp net({1, 1, 1});
  net.layer(1).weights(0, 0) = 2.0;
  for (double x : {-7.0, 0.0, 3.3}) {
    EXPECT_DOUBLE_EQ(net.Forward(Eigen::VectorXd::Constant(1, x))[0], 1.0);
  }
}

TEST(MlpForward, MatchesPerNeuronOracle) {
  Rng rng = MakeRng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mlp net = Mlp::RandomInit({4, 3, 1}, rng);
    const Eigen::VectorXd x = RandomVector(4, rng);
    const auto expected = PerNeuronForward(net, {x.data(), x.data() + 4});
    EXPECT_NEAR(net.Forward(x)[0], expected[0], 1e-12);
  }
}

TEST(MlpForward, SigmoidOutputMatchesOracle) {
  Rng rng = MakeRng(12);
  const Mlp net = Mlp::RandomInit({5, 4, 3}, rng, Activation::kSigmoid);
  const Eigen::VectorXd x = RandomVector(5, rng);
  const auto expected = PerNeuronForward(net, {x.data(), x.data() + 5});
  const Eigen::VectorXd got = net.Forward(x);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], expected[static_cast<std::size_t>(i)], 1e-12);
}

TEST(MlpForward, BatchMatchesColumnwise) {
  Rng rng = MakeRng(13);
  const Mlp net = Mlp::RandomInit({3, 6, 2}, rng);
  Eigen::MatrixXd xs(3, 7);
  for (int c = 0; c < 7; ++c) xs.col(c) = RandomVector(3, rng);
  const Eigen::MatrixXd batch = net.ForwardBatch(xs);
  for (int c = 0; c < 7; ++c) {
    EXPECT_LT((batch.col(c) - net.Forward(xs.col(c))).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(MlpForward, PureAndBitIdentical) {
  Rng rng = MakeRng(14);
  const Mlp net = Mlp::RandomInit({6, 5, 4, 1}, rng);
  const Eigen::VectorXd x = RandomVector(6, rng);
  const double a = net.Forward(x)[0];
  const double b = net.Forward(x)[0];
  EXPECT_EQ(a, b);
}

TEST(MlpForward, RejectsWrongInputSize) {
  const Mlp net({3, 1});
  EXPECT_THROW(net.Forward(Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(MlpShapes, ChainAndInitRange) {
  Rng rng = MakeRng(15);
  const Mlp net = Mlp::RandomInit({7, 5, 3, 1}, rng);
  ASSERT_EQ(net.num_layers(), 3u);
  EXPECT_EQ(net.num_params(), 7u * 5 + 5 + 5 * 3 + 3 + 3 + 1);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& layer = net.layer(l);
    EXPECT_EQ(layer.weights.cols(), net.layer_dims()[l]);
    EXPECT_EQ(layer.weights.rows(), net.layer_dims()[l + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weights.cols()));
    EXPECT_LE(layer.weights.cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(layer.bias.cwiseAbs().maxCoeff(), bound);
  }
}

// Hidden units stay in (0, 1); the linear output is unbounded.
TEST(MlpProperty, HiddenActivationsInUnitInterval) {
  Rng rng = MakeRng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const Mlp net = Mlp::RandomInit({4, 6, 1}, rng);
    const Eigen::VectorXd x = 50.0 * RandomVector(4, rng);
    const Eigen::VectorXd hidden =
        (net.layer(0).weights * x + net.layer(0).bias).unaryExpr(&Sigmoid);
    EXPECT_GE(hidden.minCoeff(), 0.0);
    EXPECT_LE(hidden.maxCoeff(), 1.0);
    EXPECT_TRUE(std::isfinite(net.Forward(x)[0]));
  }
}

TEST(MlpBackward, LinearGradientIsInput) {
  Mlp net({1, 1});
  net.layer(0).weights(0, 0) = 0.7;
  const MlpGradients g = net.Backward(Eigen::VectorXd::Constant(1, 3.0),
                                      Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_DOUBLE_EQ(g.layers[0].weights(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(g.layers[0].bias[0], 1.0);
  EXPECT_DOUBLE_EQ(g.input(0, 0), 0.7);
}

TEST(MlpBackward, ZeroUpstreamGivesZeroGradients) {
  Rng rng = MakeRng(17);
  const Mlp net = Mlp::RandomInit({5, 4, 2}, rng);
  const MlpGradients g = net.Backward(RandomVector(5, rng), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(g.Flat().cwiseAbs().maxCoeff(), 0.0);
}

// Property over random nets of at most 100 parameters.
TEST(MlpBackward, MatchesFiniteDifferences) {
  Rng rng = MakeRng(18);
  for (int trial = 0; trial < 30; ++trial) {
    const int in = 1 + static_cast<int>(UniformIndex(rng, 6));
    const int hidden = 1 + static_cast<int>(UniformIndex(rng, 6));
    const int out = 1 + static_cast<int>(UniformIndex(rng, 2));
    const Mlp net = Mlp::RandomInit({in, hidden, out}, rng);
    ASSERT_LE(net.num_params(), 100u);
    const Eigen::VectorXd x = RandomVector(in, rng);
    const Eigen::VectorXd up = RandomVector(out, rng);
    const Eigen::VectorXd analytic = net.Backward(x, up).Flat();
    const Eigen::VectorXd numeric =
        FiniteDiffGrad([&](const Mlp& m) { return up.dot(m.Forward(x)); }, net);
    EXPECT_LT(MaxRelativeError(analytic, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(MlpBackward, FiveFourOneInputGradient) {
  Rng rng = MakeRng(19);
  const Mlp net = Mlp::RandomInit({5, 4, 1}, rng);
  const Eigen::VectorXd x = RandomVector(5, rng);
  const Eigen::VectorXd up = Eigen::VectorXd::Ones(1);
  const MlpGradients g = net.Backward(x, up);
  const Eigen::VectorXd numeric =
      FiniteDiffGrad([&](const Eigen::VectorXd& p) { return net.Forward(p)[0]; }, x);
  EXPECT_LT(MaxRelativeError(g.input.col(0), numeric), 1e-4);
  const Eigen::VectorXd numeric_params =
      FiniteDiffGrad([&](const Mlp& m) { return m.Forward(x)[0]; }, net);
  EXPECT_LT(MaxRelativeError(g.Flat(), numeric_params), 1e-4);
}

TEST(MlpBackward, BatchSumsColumns) {
  Rng rng = MakeRng(20);
  const Mlp net = Mlp::RandomInit({3, 4, 1}, rng);
  Eigen::MatrixXd xs(3, 5);
  Eigen::MatrixXd ups(1, 5);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_params()));
  for (int c = 0; c < 5; ++c) {
    xs.col(c) = RandomVector(3, rng);
    ups(0, c) = UniformUnit(rng);
    sum += net.Backward(xs.col(c), ups.col(c)).Flat();
  }
  EXPECT_LT((net.BackwardBatch(xs, ups).Flat() - sum).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MlpParams, FlatRoundTripAndJson) {
  Rng rng = MakeRng(21);
  const Mlp net = Mlp::RandomInit({4, 3, 2}, rng, Activation::kSigmoid);
  Mlp copy({4, 3, 2}, Activation::kSigmoid);
  copy.SetFlatParams(net.FlatParams());
  EXPECT_EQ(copy.FlatParams(), net.FlatParams());
  const Mlp restored = MlpFromJson(MlpToJson(net));
  EXPECT_EQ(restored.layer_dims(), net.layer_dims());
  EXPECT_EQ(restored.output_activation(), Activation::kSigmoid);
  EXPECT_EQ(restored.FlatParams(), net.FlatParams());
}

TEST(MlpParams, JsonRejectsBrokenChain) {
  Rng rng = MakeRng(22);
  auto j = MlpToJson(Mlp::RandomInit({3, 2, 1}, rng));
  j["layer_dims"] = {3, 4, 1};
  EXPECT_THROW(MlpFromJson(j), std::invalid_argument);
}

TEST(FiniteDiff, Quadratic) {
  const Eigen::VectorXd g = FiniteDiffGrad(
      [](const Eigen::VectorXd& t) { return t[0] * t[0]; }, Eigen::VectorXd::Constant(1, 3.0));
  EXPECT_NEAR(g[0], 6.0, 1e-6);
}

TEST(FiniteDiff, ConstantHasZeroGradient) {
  Rng rng = MakeRng(23);
  const Mlp net = Mlp::RandomInit({2, 2, 1}, rng);
  const Eigen::VectorXd g = FiniteDiffGrad([](const Mlp&) { return 4.2; }, net);
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FiniteDiff, RelativeErrorFloor) {
  Eigen::VectorXd a(2), b(2);
  a << 1e-12, 2.0;
  b << 0.0, 2.0;
  EXPECT_LT(MaxRelativeError(a, b), 1e-4);
  b[1] = 2.2;
  EXPECT_NEAR(MaxRelativeError(a, b), 0.2 / 2.2, 1e-12);
}

TEST(Adam, ZeroGradientKeepsParamsAndDecaysMoments) {
  Eigen::VectorXd p(2);
  p << 1.0, -1.0;
  AdamState s(2, 0.1);
  s.first_moment << 0.5, 0.5;
  s.second_moment << 0.25, 0.25;
  s.step = 3;
  AdamStep(p, Eigen::VectorXd::Zero(2), s);
  EXPECT_EQ(s.step, 4);
  EXPECT_DOUBLE_EQ(s.first_moment[0], 0.45);
  EXPECT_DOUBLE_EQ(s.second_moment[0], 0.25 * 0.999);
  // The bias-corrected moment is not zero, so only check that the step is
  // the closed-form value.
  const double m_hat = 0.45 / (1.0 - std::pow(0.9, 4));
  const double v_hat = 0.25 * 0.999 / (1.0 - std::pow(0.999, 4));
  EXPECT_NEAR(p[0], 1.0 - 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8), 1e-12);
}

TEST(Adam, FreshStateZeroGradientLeavesParams) {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 0.3);
  AdamState s(3);
  AdamStep(p, Eigen::VectorXd::Zero(3), s);
  EXPECT_EQ(p, Eigen::VectorXd::Constant(3, 0.3));
  EXPECT_EQ(s.first_moment.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
  AdamState s(1, 1e-3);
  AdamStep(p, Eigen::VectorXd::Ones(1), s);
  EXPECT_NEAR(p[0], -1e-3, 1e-9);
  for (int k = 0; k < 5; ++k) AdamStep(p, Eigen::VectorXd::Ones(1), s);
  EXPECT_NEAR(p[0], -6e-3, 1e-8);
  EXPECT_EQ(s.step, 6);
}

TEST(Adam, DecreasesQuadratic) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
  AdamState s(1, 0.1);
  double prev = std::pow(p[0] - 2.0, 2);
  for (int k = 0; k < 10; ++k) {
    AdamStep(p, Eigen::VectorXd::Constant(1, 2.0 * (p[0] - 2.0)), s);
    const double f = std::pow(p[0] - 2.0, 2);
    EXPECT_LT(f, prev);
    prev = f;
  }
}

TEST(Adam, RejectsShapeMismatch) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  AdamState s(2);
  EXPECT_THROW(AdamStep(p, Eigen::VectorXd::Zero(3), s), std::invalid_argument);
}

TEST(Rng, UniformIndexCoversRangeAndShuffleIsPermutation) {
  Rng rng = MakeRng(24);
  std::vector<int> hits(7, 0);
  for (int k = 0; k < 7000; ++k) ++hits[UniformIndex(rng, 7)];
  for (int h : hits) EXPECT_GT(h, 800);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Shuffle(v.begin(), v.end(), rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
  EXPECT_NE(MixSeed(1, 0), MixSeed(1, 1));
  EXPECT_EQ(MakeRng(5, 2)(), MakeRng(5, 2)());
}

}  // namespace
}  // namespace alstrat
