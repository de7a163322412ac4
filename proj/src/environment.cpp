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

#include "alstrat/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "alstrat/rng.hpp"

namespace alstrat {
namespace {

constexpr int kResetAttempts = 100;
constexpr double kQualityFraction = 0.98;

}  // namespace

nlohmann::json EnvConfigToJson(const EnvConfig& cfg) {
  return {{"v_size", cfg.v_size},
          {"max_steps", cfg.max_steps},
          {"initial_labelled_per_class", cfg.initial_labelled_per_class},
          {"classifier", ClassifierSpecToJson(cfg.classifier)}};
}

EnvConfig EnvConfigFromJson(const nlohmann::json& j) {
  EnvConfig cfg;
  cfg.v_size = j.value("v_size", cfg.v_size);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.initial_labelled_per_class =
      j.value("initial_labelled_per_class", cfg.initial_labelled_per_class);
  if (j.contains("classifier")) cfg.classifier = ClassifierSpecFromJson(j.at("classifier"));
  if (cfg.v_size <= 0 || cfg.max_steps <= 0 || cfg.initial_labelled_per_class <= 0) {
    throw std::invalid_argument("env config: sizes must be positive");
  }
  return cfg;
}

int ActionSet::PositionOf(int candidate) const {
  const auto it = std::lower_bound(candidates.begin(), candidates.end(), candidate);
  if (it == candidates.end() || *it != candidate) return -1;
  return static_cast<int>(it - candidates.begin());
}

std::string EpisodeFlagName(EpisodeFlag flag) {
  switch (flag) {
    case EpisodeFlag::kNone: return "";
    case EpisodeFlag::kReachedTarget: return "reached_target";
    case EpisodeFlag::kBudgetExhausted: return "budget_exhausted";
    case EpisodeFlag::kPoolExhausted: return "pool_exhausted";
  }
  return "";
}

double CosineDistance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return 1.0 - u.dot(v) / (u.norm() * v.norm());
}

double AverageCosineDistance(const Eigen::VectorXd& x, const std::vector<int>& rows,
                             const Dataset& ds) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (int r : rows) total += CosineDistance(x, ds.features.row(r).transpose());
  return total / static_cast<double>(rows.size());
}

StateVector MakeStateVector(const TrainedModel& model, const std::vector<int>& validation,
                            const Dataset& ds) {
  StateVector s = model.Prob0Rows(ds.features, validation);
  std::sort(s.data(), s.data() + s.size());
  return s;
}

ActionSet BuildActionSet(const TrainedModel& model, const std::vector<int>& labelled,
                         const std::vector<int>& unlabelled, const Dataset& ds) {
  ActionSet set;
  set.candidates = unlabelled;
  std::sort(set.candidates.begin(), set.candidates.end());
  set.features.resize(3, static_cast<Eigen::Index>(set.candidates.size()));
  if (set.candidates.empty()) return set;
  const Eigen::VectorXd scores = model.Prob0Rows(ds.features, set.candidates);
  for (std::size_t k = 0; k < set.candidates.size(); ++k) {
    const Eigen::VectorXd x = ds.features.row(set.candidates[k]).transpose();
    set.features(0, k) = scores[k];
    set.features(1, k) = AverageCosineDistance(x, labelled, ds);
    set.features(2, k) = AverageCosineDistance(x, unlabelled, ds);
  }
  return set;
}

Calibration CalibrateTargetQuality(const Dataset& train, const Dataset& test,
                                   const ClassifierSpec& spec, int budget, int repeats,
                                   std::uint64_t seed) {
  if (repeats <= 0 || budget <= 1) {
    throw std::invalid_argument("calibration: budget must be > 1 and repeats > 0");
  }
  train.Validate();
  Calibration out;
  if (budget > train.size()) {
    budget = static_cast<int>(train.size());
    out.clamped = true;
  }
  std::array<std::vector<int>, 2> by_class;
  for (int i = 0; i < static_cast<int>(train.labels.size()); ++i) {
    by_class[train.labels[i]].push_back(i);
  }
  // Proportional allocation with at least one point per class.
  const double frac1 = static_cast<double>(by_class[1].size()) /
                       static_cast<double>(train.size());
  int n1 = static_cast<int>(std::lround(frac1 * budget));
  n1 = std::clamp(n1, 1, budget - 1);
  n1 = std::min(n1, static_cast<int>(by_class[1].size()));
  int n0 = std::min(budget - n1, static_cast<int>(by_class[0].size()));
  n1 = std::min(budget - n0, static_cast<int>(by_class[1].size()));

  Rng rng = MakeRng(seed, 0xCA1);
  for (int r = 0; r < repeats; ++r) {
    std::vector<int> picked;
    for (int cls = 0; cls < 2; ++cls) {
      auto idx = by_class[cls];
      Shuffle(idx.begin(), idx.end(), rng);
      const int take = cls == 0 ? n0 : n1;
      picked.insert(picked.end(), idx.begin(), idx.begin() + take);
    }
    const auto model = Fit(spec, train.features, train.labels, picked);
    out.accuracies.push_back(Accuracy(model, test));
  }
  out.mean_accuracy = std::accumulate(out.accuracies.begin(), out.accuracies.end(), 0.0) /
                      static_cast<double>(repeats);
  out.target_quality = kQualityFraction * out.mean_accuracy;
  return out;
}

Environment::Environment(std::shared_ptr<const Dataset> pool,
                         std::shared_ptr<const Dataset> test, EnvConfig config)
    : pool_(std::move(pool)), test_(std::move(test)), config_(std::move(config)) {
  if (!pool_ || !test_) throw std::invalid_argument("Environment: null dataset");
  pool_->Validate();
  if (test_->size() == 0) throw std::invalid_argument("Environment: empty test set");
  if (config_.v_size <= 0 || config_.max_steps <= 0 ||
      config_.initial_labelled_per_class <= 0) {
    throw std::invalid_argument("Environment: config sizes must be positive");
  }
  if (config_.v_size + 2 * config_.initial_labelled_per_class > pool_->size()) {
    throw std::invalid_argument("Environment: pool too small for v_size and L_0");
  }
  if (test_->dims() != pool_->dims()) {
    throw std::invalid_argument("Environment: pool and test dimensions differ");
  }
  unit_rows_ = pool_->features;
  for (Eigen::Index r = 0; r < unit_rows_.rows(); ++r) {
    const double norm = unit_rows_.row(r).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("Environment: all-zero feature row in pool");
    }
    unit_rows_.row(r) /= norm;
  }
}

Observation Environment::Reset(std::uint64_t seed) {
  Rng rng = MakeRng(seed, 0xE5E7);
  const int n = static_cast<int>(pool_->size());
  const int per_class = config_.initial_labelled_per_class;
  std::vector<int> order(n);
  for (int attempt = 0;; ++attempt) {
    if (attempt == kResetAttempts) {
      throw DataError(pool_->name + ": cannot draw L_0 with both classes");
    }
    std::iota(order.begin(), order.end(), 0);
    Shuffle(order.begin(), order.end(), rng);
    validation_.assign(order.begin(), order.begin() + config_.v_size);
    labelled_.clear();
    std::array<int, 2> taken{0, 0};
    for (int k = config_.v_size; k < n; ++k) {
      const int y = pool_->labels[order[k]];
      if (taken[y] < per_class) {
        ++taken[y];
        labelled_.push_back(order[k]);
      }
    }
    if (taken[0] == per_class && taken[1] == per_class) break;
  }
  std::sort(validation_.begin(), validation_.end());
  std::vector<char> used(n, 0);
  for (int i : validation_) used[i] = 1;
  for (int i : labelled_) used[i] = 1;
  unlabelled_.clear();
  for (int i = 0; i < n; ++i) {
    if (!used[i]) unlabelled_.push_back(i);
  }

  labelled_sum_ = Eigen::VectorXd::Zero(unit_rows_.cols());
  unlabelled_sum_ = Eigen::VectorXd::Zero(unit_rows_.cols());
  for (int i : labelled_) labelled_sum_ += unit_rows_.row(i).transpose();
  for (int i : unlabelled_) unlabelled_sum_ += unit_rows_.row(i).transpose();

  t_ = 0;
  has_episode_ = true;
  Refresh();
  if (observation_.accuracy >= config_.target_quality) {
    observation_.terminal = true;
    observation_.flag = EpisodeFlag::kReachedTarget;
  } else if (unlabelled_.empty()) {
    observation_.terminal = true;
    observation_.flag = EpisodeFlag::kPoolExhausted;
  }
  if (!observation_.terminal) observation_.actions = ComputeActions();
  return observation_;
}

void Environment::Refresh() {
  model_ = Fit(config_.classifier, pool_->features, pool_->labels, labelled_);
  observation_ = Observation{};
  observation_.accuracy = Accuracy(model_, *test_);
  observation_.state = MakeStateVector(model_, validation_, *pool_);
}

ActionSet Environment::ComputeActions() const {
  ActionSet set;
  set.candidates = unlabelled_;
  const auto k = static_cast<Eigen::Index>(unlabelled_.size());
  set.features.resize(3, k);
  if (k == 0) return set;
  const Eigen::VectorXd scores = model_.Prob0Rows(pool_->features, unlabelled_);
  // Mean cosine distance to a set equals 1 - x_unit . mean(unit rows).
  const Eigen::VectorXd l_mean = labelled_sum_ / static_cast<double>(labelled_.size());
  const Eigen::VectorXd u_mean = unlabelled_sum_ / static_cast<double>(unlabelled_.size());
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto row = unit_rows_.row(unlabelled_[c]);
    set.features(0, c) = scores[c];
    set.features(1, c) = std::clamp(1.0 - row.dot(l_mean), 0.0, 2.0);
    set.features(2, c) = std::clamp(1.0 - row.dot(u_mean), 0.0, 2.0);
  }
  return set;
}

StepResult Environment::Step(int candidate) {
  if (!has_episode_) throw std::logic_error("Environment: Step before Reset");
  if (observation_.terminal) throw std::logic_error("Environment: Step after terminal state");
  const int pos = observation_.actions.PositionOf(candidate);
  if (pos < 0) {
    throw std::invalid_argument("Environment: candidate " + std::to_string(candidate) +
                                " is not in the unlabelled set");
  }
  StepResult result;
  result.chosen_score = observation_.actions.features(0, pos);
  result.reward = -1.0;

  unlabelled_.erase(unlabelled_.begin() + pos);
  labelled_.push_back(candidate);
  labelled_sum_ += unit_rows_.row(candidate).transpose();
  unlabelled_sum_ -= unit_rows_.row(candidate).transpose();
  ++t_;

  Refresh();
  if (observation_.accuracy >= config_.target_quality) {
    observation_.terminal = true;
    observation_.flag = EpisodeFlag::kReachedTarget;
  } else if (t_ >= config_.max_steps) {
    observation_.terminal = true;
    observation_.flag = EpisodeFlag::kBudgetExhausted;
  } else if (unlabelled_.empty()) {
    observation_.terminal = true;
    observation_.flag = EpisodeFlag::kPoolExhausted;
  }
  if (!observation_.terminal || observation_.flag == EpisodeFlag::kBudgetExhausted) {
    observation_.actions = ComputeActions();
  }
  result.observation = observation_;
  return result;
}

}  // namespace alstrat
