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

#ifndef ALSTRAT_DQN_HPP_
#define ALSTRAT_DQN_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "alstrat/adam.hpp"
#include "alstrat/dataset.hpp"
#include "alstrat/environment.hpp"
#include "alstrat/episode.hpp"
#include "alstrat/q_network.hpp"
#include "alstrat/replay_buffer.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {

struct TrainConfig {
  int warm_start_episodes = 100;
  int warm_start_updates = 100;
  int rl_iterations = 1000;
  int episodes_per_iteration = 10;
  int updates_per_iteration = 60;
  int batch_size = 32;
  double learning_rate = 1e-4;
  double target_update_rate = 0.01;
  double priority_exponent = 3.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.0;
  int epsilon_decay_iterations = 1000;
  double discount = 1.0;
  std::size_t replay_capacity = 10000;
  std::vector<int> encoder_hidden{10};
  std::vector<int> head_hidden{5};
  // D' share of every sampled dataset.
  double test_fraction = 0.5;
};

nlohmann::json TrainConfigToJson(const TrainConfig& cfg);
// Missing keys keep their defaults. Throws std::invalid_argument on
// non-positive sizes or rates.
TrainConfig TrainConfigFromJson(const nlohmann::json& j);

// Linear from epsilon_start at iteration 0 to epsilon_end at
// epsilon_decay_iterations, constant afterwards.
double EpsilonAt(const TrainConfig& cfg, int iteration);

// Double DQN target: r if terminal, else
// r + discount * Q_target(s', argmax_a' Q_online(s', a')). A non-terminal
// transition without next actions is treated as terminal and reported
// through `degenerate`.
double TdTarget(const Transition& tr, const QNetwork& online, const QNetwork& target,
                double discount = 1.0, bool* degenerate = nullptr);

// target <- (1 - tau) target + tau online
void SoftUpdate(QNetwork& target, const QNetwork& online, double tau);

struct UpdateStats {
  double loss = 0.0;
  // Largest relative gap between the analytic and finite-difference loss
  // gradients; only set in audit mode.
  double audit_max_rel_error = -1.0;
};

// One DQN update: samples a prioritized batch, takes an Adam step on the mean
// squared TD error, refreshes the sampled priorities to |TD error| and
// soft-updates the target network.
UpdateStats UpdateStep(QNetwork& online, QNetwork& target, AdamState& adam,
                       ReplayBuffer& buffer, const TrainConfig& cfg, Rng& rng,
                       bool audit = false);

// Mean squared TD error of `online` on the given transitions against fixed
// targets; the quantity UpdateStep differentiates.
double TdLoss(const QNetwork& online, const std::vector<const Transition*>& batch,
              const std::vector<double>& targets);

struct TrainingTask {
  std::shared_ptr<const Dataset> dataset;  // normalized
  double target_quality = 1.0;
};

struct IterationStats {
  int iteration = 0;
  double epsilon = 0.0;
  double mean_episode_length = 0.0;
  double mean_loss = 0.0;
  std::size_t buffer_size = 0;
};

struct WarmStartResult {
  std::vector<double> episode_returns;
  double bias_init = 0.0;
  double mean_loss = 0.0;
};

// Learns a Q-network over a collection of datasets: warm start with random
// episodes, then iterations of epsilon-greedy episodes followed by updates.
class DqnTrainer {
 public:
  using Progress = std::function<void(const IterationStats&)>;

  // Tasks whose datasets cannot host an environment with `env` are skipped
  // (see skipped()); throws std::invalid_argument if none remain.
  DqnTrainer(std::vector<TrainingTask> tasks, TrainConfig cfg, EnvConfig env,
             std::uint64_t seed);

  WarmStartResult WarmStart();
  IterationStats RunIteration(int iteration);
  // WarmStart followed by cfg.rl_iterations iterations.
  std::vector<IterationStats> Run(const Progress& progress = nullptr);

  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const WarmStartResult& warm_start() const { return warm_; }
  const std::vector<std::string>& skipped() const { return skipped_; }
  const std::vector<TrainingTask>& tasks() const { return tasks_; }

 private:
  // Splits a randomly chosen task and returns an environment over it.
  Environment SampleEnvironment();
  std::vector<EpisodeLog> CollectEpisodes(int count, const Policy& policy);

  std::vector<TrainingTask> tasks_;
  std::vector<std::string> skipped_;
  TrainConfig cfg_;
  EnvConfig env_;
  Rng rng_;
  QNetwork online_;
  QNetwork target_;
  AdamState adam_;
  ReplayBuffer buffer_;
  WarmStartResult warm_;
  int episode_counter_ = 0;
};

}  // namespace alstrat

#endif  // ALSTRAT_DQN_HPP_
