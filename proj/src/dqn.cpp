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

#include "alstrat/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "alstrat/finite_diff.hpp"
#include "alstrat/strategies.hpp"

namespace alstrat {

nlohmann::json TrainConfigToJson(const TrainConfig& cfg) {
  return {{"warm_start_episodes", cfg.warm_start_episodes},
          {"warm_start_updates", cfg.warm_start_updates},
          {"rl_iterations", cfg.rl_iterations},
          {"episodes_per_iteration", cfg.episodes_per_iteration},
          {"updates_per_iteration", cfg.updates_per_iteration},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"target_update_rate", cfg.target_update_rate},
          {"priority_exponent", cfg.priority_exponent},
          {"epsilon_start", cfg.epsilon_start},
          {"epsilon_end", cfg.epsilon_end},
          {"epsilon_decay_iterations", cfg.epsilon_decay_iterations},
          {"discount", cfg.discount},
          {"replay_capacity", cfg.replay_capacity},
          {"encoder_hidden", cfg.encoder_hidden},
          {"head_hidden", cfg.head_hidden},
          {"test_fraction", cfg.test_fraction}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.warm_start_episodes = j.value("warm_start_episodes", cfg.warm_start_episodes);
  cfg.warm_start_updates = j.value("warm_start_updates", cfg.warm_start_updates);
  cfg.rl_iterations = j.value("rl_iterations", cfg.rl_iterations);
  cfg.episodes_per_iteration = j.value("episodes_per_iteration", cfg.episodes_per_iteration);
  cfg.updates_per_iteration = j.value("updates_per_iteration", cfg.updates_per_iteration);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.target_update_rate = j.value("target_update_rate", cfg.target_update_rate);
  cfg.priority_exponent = j.value("priority_exponent", cfg.priority_exponent);
  cfg.epsilon_start = j.value("epsilon_start", cfg.epsilon_start);
  cfg.epsilon_end = j.value("epsilon_end", cfg.epsilon_end);
  cfg.epsilon_decay_iterations =
      j.value("epsilon_decay_iterations", cfg.epsilon_decay_iterations);
  cfg.discount = j.value("discount", cfg.discount);
  cfg.replay_capacity = j.value("replay_capacity", cfg.replay_capacity);
  cfg.encoder_hidden = j.value("encoder_hidden", cfg.encoder_hidden);
  cfg.head_hidden = j.value("head_hidden", cfg.head_hidden);
  cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
  if (cfg.warm_start_episodes < 0 || cfg.warm_start_updates < 0 || cfg.rl_iterations < 0 ||
      cfg.episodes_per_iteration <= 0 || cfg.updates_per_iteration < 0 ||
      cfg.batch_size <= 0 || !(cfg.learning_rate > 0.0) ||
      !(cfg.target_update_rate > 0.0 && cfg.target_update_rate <= 1.0) ||
      cfg.priority_exponent < 0.0 || cfg.epsilon_decay_iterations <= 0 ||
      cfg.replay_capacity == 0 || cfg.encoder_hidden.empty()) {
    throw std::invalid_argument("train config: invalid value");
  }
  return cfg;
}

double EpsilonAt(const TrainConfig& cfg, int iteration) {
  const double frac = std::clamp(
      static_cast<double>(iteration) / static_cast<double>(cfg.epsilon_decay_iterations), 0.0,
      1.0);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

double TdTarget(const Transition& tr, const QNetwork& online, const QNetwork& target,
                double discount, bool* degenerate) {
  if (degenerate != nullptr) *degenerate = false;
  if (tr.terminal) return tr.reward;
  if (tr.next_actions.cols() == 0) {
    if (degenerate != nullptr) *degenerate = true;
    return tr.reward;
  }
  const Eigen::VectorXd q_online = online.Values(tr.next_state, tr.next_actions);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < q_online.size(); ++k) {
    if (q_online[k] > q_online[best]) best = k;
  }
  const Eigen::Matrix<double, 3, Eigen::Dynamic> chosen = tr.next_actions.col(best);
  return tr.reward + discount * target.Values(tr.next_state, chosen)[0];
}

void SoftUpdate(QNetwork& target, const QNetwork& online, double tau) {
  target.SetFlatParams((1.0 - tau) * target.FlatParams() + tau * online.FlatParams());
}

namespace {

void PackBatch(const std::vector<const Transition*>& batch, Eigen::MatrixXd* states,
               Eigen::MatrixXd* actions) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  states->resize(batch.front()->state.size(), b);
  actions->resize(kActionDim, b);
  for (Eigen::Index k = 0; k < b; ++k) {
    states->col(k) = batch[k]->state;
    actions->col(k) = batch[k]->action;
  }
}

}  // namespace

double TdLoss(const QNetwork& online, const std::vector<const Transition*>& batch,
              const std::vector<double>& targets) {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  PackBatch(batch, &states, &actions);
  const Eigen::VectorXd q = online.PairedValues(states, actions);
  double loss = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double e = q[k] - targets[k];
    loss += e * e;
  }
  return loss / static_cast<double>(q.size());
}

UpdateStats UpdateStep(QNetwork& online, QNetwork& target, AdamState& adam,
                       ReplayBuffer& buffer, const TrainConfig& cfg, Rng& rng, bool audit) {
  if (buffer.empty()) throw std::logic_error("UpdateStep: replay buffer is empty");
  const auto slots = buffer.Sample(static_cast<std::size_t>(cfg.batch_size),
                                   cfg.priority_exponent, rng);
  std::vector<const Transition*> batch;
  std::vector<double> targets;
  batch.reserve(slots.size());
  targets.reserve(slots.size());
  for (std::size_t slot : slots) {
    batch.push_back(&buffer.at(slot));
    targets.push_back(TdTarget(buffer.at(slot), online, target, cfg.discount));
  }

  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  PackBatch(batch, &states, &actions);
  const Eigen::VectorXd q = online.PairedValues(states, actions);
  const auto b = static_cast<double>(batch.size());
  Eigen::VectorXd errors(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) errors[k] = q[k] - targets[k];

  UpdateStats stats;
  stats.loss = errors.squaredNorm() / b;
  const Eigen::VectorXd grad = online.ParamGradient(states, actions, (2.0 / b) * errors);
  if (audit) {
    QNetwork probe = online;
    const Eigen::VectorXd numeric = FiniteDiffGrad(
        [&](const Eigen::VectorXd& theta) {
          probe.SetFlatParams(theta);
          return TdLoss(probe, batch, targets);
        },
        online.FlatParams());
    stats.audit_max_rel_error = MaxRelativeError(grad, numeric);
  }

  Eigen::VectorXd params = online.FlatParams();
  AdamStep(params, grad, adam);
  online.SetFlatParams(params);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    buffer.SetPriority(slots[k], std::abs(errors[static_cast<Eigen::Index>(k)]));
  }
  SoftUpdate(target, online, cfg.target_update_rate);
  return stats;
}

DqnTrainer::DqnTrainer(std::vector<TrainingTask> tasks, TrainConfig cfg, EnvConfig env,
                       std::uint64_t seed)
    : cfg_(std::move(cfg)),
      env_(std::move(env)),
      rng_(MakeRng(seed, 0xD09)),
      buffer_(cfg_.replay_capacity) {
  for (auto& task : tasks) {
    try {
      if (!task.dataset) throw std::invalid_argument("null dataset");
      auto [pool, test] = Split(*task.dataset, {cfg_.test_fraction, 0});
      EnvConfig probe = env_;
      probe.target_quality = task.target_quality;
      Environment(std::make_shared<const Dataset>(std::move(pool)),
                  std::make_shared<const Dataset>(std::move(test)), probe);
      tasks_.push_back(std::move(task));
    } catch (const std::exception& e) {
      const std::string name = task.dataset ? task.dataset->name : "<null>";
      std::cerr << "warning: skipping dataset " << name << ": " << e.what() << "\n";
      skipped_.push_back(name);
    }
  }
  if (tasks_.empty()) throw std::invalid_argument("DqnTrainer: no usable datasets");
  online_ = QNetwork::RandomInit(env_.v_size, cfg_.encoder_hidden, cfg_.head_hidden, rng_);
  target_ = online_;
  adam_ = AdamState(static_cast<Eigen::Index>(online_.num_params()), cfg_.learning_rate);
}

Environment DqnTrainer::SampleEnvironment() {
  const TrainingTask& task = tasks_[UniformIndex(rng_, tasks_.size())];
  auto [pool, test] = Split(*task.dataset, {cfg_.test_fraction, rng_()});
  EnvConfig cfg = env_;
  cfg.target_quality = task.target_quality;
  return Environment(std::make_shared<const Dataset>(std::move(pool)),
                     std::make_shared<const Dataset>(std::move(test)), cfg);
}

std::vector<EpisodeLog> DqnTrainer::CollectEpisodes(int count, const Policy& policy) {
  std::vector<EpisodeLog> logs;
  std::vector<Transition> transitions;
  Environment env = SampleEnvironment();
  for (int e = 0; e < count; ++e) {
    const std::uint64_t reset_seed = rng_();
    Rng policy_rng = MakeRng(rng_());
    EpisodeOptions opts;
    opts.episode_id = episode_counter_++;
    opts.transitions = &transitions;
    logs.push_back(RunEpisode(env, policy, reset_seed, policy_rng, opts));
  }
  for (auto& tr : transitions) buffer_.Add(std::move(tr));
  return logs;
}

WarmStartResult DqnTrainer::WarmStart() {
  warm_ = WarmStartResult{};
  const RandomPolicy random;
  for (int e = 0; e < cfg_.warm_start_episodes; ++e) {
    for (const auto& log : CollectEpisodes(1, random)) {
      warm_.episode_returns.push_back(log.Return());
    }
  }
  if (!warm_.episode_returns.empty()) {
    warm_.bias_init = std::accumulate(warm_.episode_returns.begin(),
                                      warm_.episode_returns.end(), 0.0) /
                      static_cast<double>(warm_.episode_returns.size());
  }
  online_.set_output_bias(warm_.bias_init);
  target_ = online_;
  double loss = 0.0;
  if (!buffer_.empty()) {
    for (int u = 0; u < cfg_.warm_start_updates; ++u) {
      loss += UpdateStep(online_, target_, adam_, buffer_, cfg_, rng_).loss;
    }
  }
  warm_.mean_loss = cfg_.warm_start_updates > 0 ? loss / cfg_.warm_start_updates : 0.0;
  return warm_;
}

IterationStats DqnTrainer::RunIteration(int iteration) {
  IterationStats stats;
  stats.iteration = iteration;
  stats.epsilon = EpsilonAt(cfg_, iteration);
  // Episodes act on a frozen snapshot of the online network.
  const QPolicy policy(online_, stats.epsilon, "epsilon_greedy");
  const auto logs = CollectEpisodes(cfg_.episodes_per_iteration, policy);
  double total_length = 0.0;
  for (const auto& log : logs) total_length += log.length();
  stats.mean_episode_length = total_length / static_cast<double>(logs.size());

  double loss = 0.0;
  if (!buffer_.empty()) {
    for (int u = 0; u < cfg_.updates_per_iteration; ++u) {
      loss += UpdateStep(online_, target_, adam_, buffer_, cfg_, rng_).loss;
    }
  }
  stats.mean_loss = cfg_.updates_per_iteration > 0 ? loss / cfg_.updates_per_iteration : 0.0;
  stats.buffer_size = buffer_.size();
  return stats;
}

std::vector<IterationStats> DqnTrainer::Run(const Progress& progress) {
  WarmStart();
  std::vector<IterationStats> log;
  log.reserve(static_cast<std::size_t>(cfg_.rl_iterations));
  for (int it = 0; it < cfg_.rl_iterations; ++it) {
    log.push_back(RunIteration(it));
    if (progress) progress(log.back());
  }
  return log;
}

}  // namespace alstrat
