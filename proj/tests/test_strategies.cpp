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
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "alstrat/q_network.hpp"
#include "alstrat/strategies.hpp"

namespace alstrat {
namespace {

ActionSet MakeActions(const std::vector<double>& scores, int first_index = 0) {
  ActionSet a;
  a.features.resize(3, static_cast<Eigen::Index>(scores.size()));
  for (std::size_t k = 0; k < scores.size(); ++k) {
    a.candidates.push_back(first_index + 3 * static_cast<int>(k));
    a.features.col(static_cast<Eigen::Index>(k)) << scores[k], 0.4, 0.6;
  }
  return a;
}

// Head output = weight * score + bias; everything else contributes zero.
QNetwork ScoreNetwork(double weight, double bias = 0.0) {
  Mlp encoder({4, 2}, Activation::kSigmoid);
  Mlp head({5, 1});
  head.layer(0).weights(0, 2) = weight;
  head.layer(0).bias[0] = bias;
  return QNetwork(std::move(encoder), std::move(head));
}

const StateVector kState = Eigen::VectorXd::LinSpaced(4, 0.1, 0.9);

TEST(SelectRandom, Singleton) {
  Rng rng = MakeRng(1);
  EXPECT_EQ(SelectRandom(MakeActions({0.3}, 12), rng), 12);
}

TEST(SelectRandom, UniformFrequencies) {
  Rng rng = MakeRng(2);
  const ActionSet a = MakeActions(std::vector<double>(10, 0.5));
  std::map<int, int> counts;
  for (int k = 0; k < 10000; ++k) ++counts[SelectRandom(a, rng)];
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [idx, c] : counts) {
    EXPECT_GE(c / 10000.0, 0.07) << idx;
    EXPECT_LE(c / 10000.0, 0.13) << idx;
  }
}

TEST(SelectRandom, FixedSeedFixedSequence) {
  const ActionSet a = MakeActions(std::vector<double>(7, 0.5));
  Rng r1 = MakeRng(3);
  Rng r2 = MakeRng(3);
  for (int k = 0; k < 50; ++k) EXPECT_EQ(SelectRandom(a, r1), SelectRandom(a, r2));
}

TEST(Selectors, EmptySetRejected) {
  Rng rng = MakeRng(4);
  const ActionSet empty;
  EXPECT_THROW(SelectRandom(empty, rng), std::invalid_argument);
  EXPECT_THROW(SelectUncertainty(empty), std::invalid_argument);
  EXPECT_THROW(SelectGreedyQ(ScoreNetwork(1.0), kState, empty), std::invalid_argument);
  EXPECT_THROW(SelectEpsilonGreedy(ScoreNetwork(1.0), kState, empty, 0.1, rng),
               std::invalid_argument);
}

TEST(SelectUncertainty, ClosestToHalf) {
  EXPECT_EQ(SelectUncertainty(MakeActions({0.9, 0.55, 0.2})), 3);
  EXPECT_EQ(SelectUncertainty(MakeActions({0.1, 0.7, 0.5, 0.49})), 6);
  // Tie between 0.4 and 0.6 goes to the lower index.
  EXPECT_EQ(SelectUncertainty(MakeActions({0.6, 0.4})), 0);
}

TEST(SelectUncertainty, AgreesWithEntropyArgmax) {
  Rng rng = MakeRng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + UniformIndex(rng, 20);
    std::vector<double> scores(n);
    for (auto& s : scores) s = UniformUnit(rng);
    const ActionSet a = MakeActions(scores);
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      const double p = scores[k];
      const double h = -p * std::log(p) - (1 - p) * std::log(1 - p);
      const double q = scores[best];
      const double hb = -q * std::log(q) - (1 - q) * std::log(1 - q);
      if (h > hb) best = k;
    }
    EXPECT_EQ(SelectUncertainty(a), a.candidates[best]);
  }
}

TEST(BinaryEntropy, LimitsAndMaximum) {
  EXPECT_EQ(BinaryEntropy(0.0), 0.0);
  EXPECT_EQ(BinaryEntropy(1.0), 0.0);
  EXPECT_NEAR(BinaryEntropy(0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(BinaryEntropy(0.2), BinaryEntropy(0.8), 1e-15);
}

TEST(SelectGreedyQ, ActionBlindNetPicksLowestIndex) {
  EXPECT_EQ(SelectGreedyQ(ScoreNetwork(0.0, 3.0), kState, MakeActions({0.2, 0.9, 0.5}, 4)), 4);
}

TEST(SelectGreedyQ, ScoreIdentityPicksMaxScore) {
  const ActionSet a = MakeActions({0.2, 0.9, 0.5, 0.7});
  EXPECT_EQ(SelectGreedyQ(ScoreNetwork(1.0), kState, a), 3);
  EXPECT_EQ(SelectGreedyQ(ScoreNetwork(-1.0), kState, a), 0);
}

TEST(SelectGreedyQ, ShiftInvariant) {
  Rng rng = MakeRng(6);
  for (int trial = 0; trial < 20; ++trial) {
    QNetwork net = QNetwork::RandomInit(4, {3}, {2}, rng);
    std::vector<double> scores(8);
    for (auto& s : scores) s = UniformUnit(rng);
    ActionSet a = MakeActions(scores);
    for (Eigen::Index k = 0; k < a.features.cols(); ++k) {
      a.features(1, k) = UniformUnit(rng);
      a.features(2, k) = UniformUnit(rng);
    }
    const int before = SelectGreedyQ(net, kState, a);
    net.set_output_bias(net.output_bias() - 17.0);
    EXPECT_EQ(SelectGreedyQ(net, kState, a), before);
  }
}

TEST(SelectEpsilonGreedy, ZeroEqualsGreedy) {
  Rng rng = MakeRng(7);
  const QNetwork net = QNetwork::RandomInit(4, {3}, {2}, rng);
  const ActionSet a = MakeActions({0.1, 0.3, 0.8, 0.6});
  const int greedy = SelectGreedyQ(net, kState, a);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(SelectEpsilonGreedy(net, kState, a, 0.0, rng), greedy);
  EXPECT_THROW(SelectEpsilonGreedy(net, kState, a, 1.5, rng), std::invalid_argument);
}

TEST(SelectEpsilonGreedy, OneIsUniform) {
  Rng rng = MakeRng(8);
  const ActionSet a = MakeActions({0.1, 0.3, 0.8, 0.6, 0.2});
  std::map<int, int> counts;
  for (int k = 0; k < 10000; ++k) ++counts[SelectEpsilonGreedy(ScoreNetwork(1.0), kState, a, 1.0, rng)];
  for (const auto& [idx, c] : counts) EXPECT_NEAR(c / 10000.0, 0.2, 0.02) << idx;
}

TEST(SelectEpsilonGreedy, HalfGreedyFrequency) {
  Rng rng = MakeRng(9);
  const ActionSet a = MakeActions({0.1, 0.3, 0.8, 0.6});
  const QNetwork net = ScoreNetwork(1.0);
  const int greedy = SelectGreedyQ(net, kState, a);
  int hits = 0;
  for (int k = 0; k < 10000; ++k) hits += SelectEpsilonGreedy(net, kState, a, 0.5, rng) == greedy;
  EXPECT_NEAR(hits / 10000.0, 0.5 + 0.5 / 4.0, 0.02);
}

TEST(Policies, ReturnOfferedCandidates) {
  Rng rng = MakeRng(10);
  const QNetwork net = QNetwork::RandomInit(4, {3}, {2}, rng);
  const auto random = MakeBaselinePolicy("random");
  const auto uncertainty = MakeBaselinePolicy("uncertainty");
  const QPolicy learned(net, 0.3);
  EXPECT_EQ(random->name(), "random");
  EXPECT_EQ(uncertainty->name(), "uncertainty");
  EXPECT_EQ(learned.name(), "learned");
  EXPECT_THROW(MakeBaselinePolicy("entropy"), std::invalid_argument);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + UniformIndex(rng, 9));
    for (auto& s : scores) s = UniformUnit(rng);
    const ActionSet a = MakeActions(scores, static_cast<int>(UniformIndex(rng, 5)));
    const std::vector<const Policy*> policies{random.get(), uncertainty.get(), &learned};
    for (const Policy* p : policies) {
      EXPECT_GE(a.PositionOf(p->Select(kState, a, rng)), 0);
    }
  }
}

}  // namespace
}  // namespace alstrat
