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

#ifndef ALSTRAT_STRATEGIES_HPP_
#define ALSTRAT_STRATEGIES_HPP_

#include <memory>
#include <string>

#include "alstrat/environment.hpp"
#include "alstrat/q_network.hpp"
#include "alstrat/rng.hpp"

namespace alstrat {

// All selectors return a candidate index from `actions` and throw
// std::invalid_argument on an empty action set. Ties go to the lowest
// candidate index.
int SelectRandom(const ActionSet& actions, Rng& rng);
int SelectUncertainty(const ActionSet& actions);
int SelectGreedyQ(const QNetwork& qnet, const StateVector& state, const ActionSet& actions);
int SelectEpsilonGreedy(const QNetwork& qnet, const StateVector& state,
                        const ActionSet& actions, double epsilon, Rng& rng);

// Binary entropy in nats, with 0 log 0 = 0.
double BinaryEntropy(double p);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual int Select(const StateVector& state, const ActionSet& actions, Rng& rng) const = 0;
  virtual std::string name() const = 0;
};

class RandomPolicy final : public Policy {
 public:
  int Select(const StateVector&, const ActionSet& actions, Rng& rng) const override {
    return SelectRandom(actions, rng);
  }
  std::string name() const override { return "random"; }
};

class UncertaintyPolicy final : public Policy {
 public:
  int Select(const StateVector&, const ActionSet& actions, Rng&) const override {
    return SelectUncertainty(actions);
  }
  std::string name() const override { return "uncertainty"; }
};

// Greedy (epsilon = 0) or epsilon-greedy selection on a private copy of a
// Q-network.
class QPolicy final : public Policy {
 public:
  explicit QPolicy(QNetwork qnet, double epsilon = 0.0, std::string name = "learned")
      : qnet_(std::move(qnet)), epsilon_(epsilon), name_(std::move(name)) {}

  int Select(const StateVector& state, const ActionSet& actions, Rng& rng) const override {
    if (epsilon_ <= 0.0) return SelectGreedyQ(qnet_, state, actions);
    return SelectEpsilonGreedy(qnet_, state, actions, epsilon_, rng);
  }
  std::string name() const override { return name_; }
  const QNetwork& qnet() const { return qnet_; }

 private:
  QNetwork qnet_;
  double epsilon_;
  std::string name_;
};

// "random" or "uncertainty".
std::unique_ptr<Policy> MakeBaselinePolicy(const std::string& kind);

}  // namespace alstrat

#endif  // ALSTRAT_STRATEGIES_HPP_
