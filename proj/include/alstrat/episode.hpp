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

#ifndef ALSTRAT_EPISODE_HPP_
#define ALSTRAT_EPISODE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "alstrat/environment.hpp"
#include "alstrat/replay_buffer.hpp"
#include "alstrat/strategies.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {

// One annotation. `t` is the step at which the candidate was chosen;
// `accuracy` is measured after adding its label.
struct StepRecord {
  int t = 0;
  int chosen_index = -1;
  double p_t = 0.0;
  double reward = -1.0;
  double accuracy = 0.0;
  bool terminal = false;
  EpisodeFlag flag = EpisodeFlag::kNone;
};

struct EpisodeLog {
  int episode_id = 0;
  std::string dataset;
  std::string policy;
  double initial_accuracy = 0.0;
  EpisodeFlag flag = EpisodeFlag::kNone;
  std::vector<StepRecord> steps;
  std::vector<StateVector> states;  // s_0 .. s_T when requested

  int length() const { return static_cast<int>(steps.size()); }
  // Sum of rewards, -(T - 1) with T = length() + 1.
  double Return() const;
  bool budget_exhausted() const { return flag == EpisodeFlag::kBudgetExhausted; }
};

struct EpisodeOptions {
  int episode_id = 0;
  bool record_states = false;
  // Appended to when non-null.
  std::vector<Transition>* transitions = nullptr;
};

// Resets `env` with `reset_seed` and follows `policy` until a terminal state.
EpisodeLog RunEpisode(Environment& env, const Policy& policy, std::uint64_t reset_seed,
                      Rng& policy_rng, const EpisodeOptions& options = {});

// JSON Lines, one record per step:
// {episode_id, t, chosen_index, p_t, reward, accuracy, terminal, flag}.
std::string EpisodeLogToJsonLines(const EpisodeLog& log);
// Parses records written by EpisodeLogToJsonLines (any number of episodes).
std::vector<EpisodeLog> ParseEpisodeJsonLines(const std::string& text);

}  // namespace alstrat

#endif  // ALSTRAT_EPISODE_HPP_
