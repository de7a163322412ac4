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

#include "alstrat/episode.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace alstrat {
namespace {

EpisodeFlag ParseFlag(const std::string& s) {
  if (s == "reached_target") return EpisodeFlag::kReachedTarget;
  if (s == "budget_exhausted") return EpisodeFlag::kBudgetExhausted;
  if (s == "pool_exhausted") return EpisodeFlag::kPoolExhausted;
  return EpisodeFlag::kNone;
}

}  // namespace

double EpisodeLog::Return() const {
  double total = 0.0;
  for (const auto& s : steps) total += s.reward;
  return total;
}

EpisodeLog RunEpisode(Environment& env, const Policy& policy, std::uint64_t reset_seed,
                      Rng& policy_rng, const EpisodeOptions& options) {
  EpisodeLog log;
  log.episode_id = options.episode_id;
  log.dataset = env.pool().name;
  log.policy = policy.name();

  Observation obs = env.Reset(reset_seed);
  log.initial_accuracy = obs.accuracy;
  log.flag = obs.flag;
  if (options.record_states) log.states.push_back(obs.state);

  while (!obs.terminal) {
    const int chosen = policy.Select(obs.state, obs.actions, policy_rng);
    const int pos = obs.actions.PositionOf(chosen);
    if (pos < 0) throw std::logic_error("policy returned a candidate outside the action set");
    const int t = env.t();
    StepResult step = env.Step(chosen);
    Observation& next = step.observation;

    if (options.transitions != nullptr) {
      Transition tr;
      tr.state = obs.state;
      tr.action = obs.actions.features.col(pos);
      tr.reward = step.reward;
      tr.next_state = next.state;
      // A cut-off episode is not a true terminal state: keep bootstrapping.
      tr.terminal = next.terminal && next.flag != EpisodeFlag::kBudgetExhausted;
      if (!tr.terminal) tr.next_actions = next.actions.features;
      options.transitions->push_back(std::move(tr));
    }

    StepRecord rec;
    rec.t = t;
    rec.chosen_index = chosen;
    rec.p_t = step.chosen_score;
    rec.reward = step.reward;
    rec.accuracy = next.accuracy;
    rec.terminal = next.terminal;
    rec.flag = next.flag;
    log.steps.push_back(rec);
    log.flag = next.flag;
    if (options.record_states) log.states.push_back(next.state);
    obs = std::move(next);
  }
  return log;
}

std::string EpisodeLogToJsonLines(const EpisodeLog& log) {
  std::ostringstream out;
  for (const auto& s : log.steps) {
    nlohmann::json j = {{"episode_id", log.episode_id},
                        {"t", s.t},
                        {"chosen_index", s.chosen_index},
                        {"p_t", s.p_t},
                        {"reward", s.reward},
                        {"accuracy", s.accuracy},
                        {"terminal", s.terminal},
                        {"flag", EpisodeFlagName(s.flag)}};
    if (!log.dataset.empty()) j["dataset"] = log.dataset;
    if (!log.policy.empty()) j["policy"] = log.policy;
    out << j.dump() << "\n";
  }
  return out.str();
}

std::vector<EpisodeLog> ParseEpisodeJsonLines(const std::string& text) {
  std::vector<EpisodeLog> logs;
  std::map<int, std::size_t> by_id;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const int id = j.at("episode_id").get<int>();
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      it = by_id.emplace(id, logs.size()).first;
      logs.emplace_back();
      logs.back().episode_id = id;
      logs.back().dataset = j.value("dataset", "");
      logs.back().policy = j.value("policy", "");
    }
    EpisodeLog& log = logs[it->second];
    StepRecord rec;
    rec.t = j.at("t").get<int>();
    rec.chosen_index = j.at("chosen_index").get<int>();
    rec.p_t = j.at("p_t").get<double>();
    rec.reward = j.at("reward").get<double>();
    rec.accuracy = j.at("accuracy").get<double>();
    rec.terminal = j.at("terminal").get<bool>();
    rec.flag = ParseFlag(j.value("flag", ""));
    log.steps.push_back(rec);
    if (rec.terminal) log.flag = rec.flag;
  }
  return logs;
}

}  // namespace alstrat
