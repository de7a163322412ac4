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

#include "alstrat/strategies.hpp"

#include <cmath>
#include <stdexcept>

namespace alstrat {
namespace {

void RequireNonEmpty(const ActionSet& actions) {
  if (actions.empty()) throw std::invalid_argument("selector: empty action set");
}

}  // namespace

double BinaryEntropy(double p) {
  auto term = [](double v) { return v <= 0.0 ? 0.0 : -v * std::log(v); };
  return term(p) + term(1.0 - p);
}

int SelectRandom(const ActionSet& actions, Rng& rng) {
  RequireNonEmpty(actions);
  return actions.candidates[UniformIndex(rng, actions.size())];
}

int SelectUncertainty(const ActionSet& actions) {
  RequireNonEmpty(actions);
  std::size_t best = 0;
  double best_gap = std::abs(actions.features(0, 0) - 0.5);
  for (std::size_t k = 1; k < actions.size(); ++k) {
    const double gap = std::abs(actions.features(0, k) - 0.5);
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return actions.candidates[best];
}

int SelectGreedyQ(const QNetwork& qnet, const StateVector& state, const ActionSet& actions) {
  RequireNonEmpty(actions);
  const Eigen::VectorXd q = qnet.Values(state, actions.features);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < q.size(); ++k) {
    if (q[k] > q[best]) best = k;
  }
  return actions.candidates[best];
}

int SelectEpsilonGreedy(const QNetwork& qnet, const StateVector& state,
                        const ActionSet& actions, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  RequireNonEmpty(actions);
  if (UniformUnit(rng) < epsilon) return SelectRandom(actions, rng);
  return SelectGreedyQ(qnet, state, actions);
}

std::unique_ptr<Policy> MakeBaselinePolicy(const std::string& kind) {
  if (kind == "random") return std::make_unique<RandomPolicy>();
  if (kind == "uncertainty") return std::make_unique<UncertaintyPolicy>();
  throw std::invalid_argument("unknown strategy '" + kind + "'");
}

}  // namespace alstrat
