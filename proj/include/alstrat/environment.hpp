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

#ifndef ALSTRAT_ENVIRONMENT_HPP_
#define ALSTRAT_ENVIRONMENT_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alstrat/classifier.hpp"
#include "alstrat/dataset.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {

struct EnvConfig {
  int v_size = 30;
  int max_steps = 100;
  int initial_labelled_per_class = 1;
  double target_quality = 1.0;
  ClassifierSpec classifier;
};

nlohmann::json EnvConfigToJson(const EnvConfig& cfg);
EnvConfig EnvConfigFromJson(const nlohmann::json& j);

// Sorted classifier scores p(y = 0) over the held-out subset V.
using StateVector = Eigen::VectorXd;

struct ActionFeatures {
  double score = 0.0;
  double dist_to_labelled = 0.0;
  double dist_to_unlabelled = 0.0;

  Eigen::Vector3d AsVector() const {
    return {score, dist_to_labelled, dist_to_unlabelled};
  }
};

// Candidates in ascending dataset-index order; column k of `features` holds
// [score, g(x, L), g(x, U)] for candidates[k].
struct ActionSet {
  std::vector<int> candidates;
  Eigen::Matrix<double, 3, Eigen::Dynamic> features;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
  ActionFeatures at(std::size_t k) const {
    return {features(0, k), features(1, k), features(2, k)};
  }
  // Position of `candidate`, or -1.
  int PositionOf(int candidate) const;
};

enum class EpisodeFlag { kNone, kReachedTarget, kBudgetExhausted, kPoolExhausted };
std::string EpisodeFlagName(EpisodeFlag flag);

struct Observation {
  StateVector state;
  // Empty once terminal, except after budget exhaustion: the episode was cut
  // off rather than finished, so the remaining actions are kept for
  // bootstrapping.
  ActionSet actions;
  double accuracy = 0.0;
  bool terminal = false;
  EpisodeFlag flag = EpisodeFlag::kNone;
};

struct StepResult {
  Observation observation;
  double reward = -1.0;
  // p(y = 0) of the annotated candidate under the model before annotation.
  double chosen_score = 0.0;
};

// 1 - u.v / (|u| |v|)
double CosineDistance(const Eigen::VectorXd& u, const Eigen::VectorXd& v);
// Mean cosine distance from x to the listed rows; 0 for an empty list.
double AverageCosineDistance(const Eigen::VectorXd& x, const std::vector<int>& rows,
                             const Dataset& ds);
StateVector MakeStateVector(const TrainedModel& model, const std::vector<int>& validation,
                            const Dataset& ds);
// Direct evaluation of the action features by pairwise distances.
ActionSet BuildActionSet(const TrainedModel& model, const std::vector<int>& labelled,
                         const std::vector<int>& unlabelled, const Dataset& ds);

struct Calibration {
  double target_quality = 0.0;
  double mean_accuracy = 0.0;
  std::vector<double> accuracies;
  bool clamped = false;
};

// q = 0.98 * mean accuracy on `test` of classifiers fit on `budget` stratified
// random points of `train`, over `repeats` draws.
Calibration CalibrateTargetQuality(const Dataset& train, const Dataset& test,
                                   const ClassifierSpec& spec, int budget = 100,
                                   int repeats = 10, std::uint64_t seed = 0);

// Pool-based annotation episode over a pool D and a test set D'. Owns the
// labelled/unlabelled/validation bookkeeping and the current classifier.
class Environment {
 public:
  Environment(std::shared_ptr<const Dataset> pool, std::shared_ptr<const Dataset> test,
              EnvConfig config);

  // Samples V, L_0 and U_0, fits f_0. Throws DataError if a class cannot be
  // placed in L_0 after 100 attempts.
  Observation Reset(std::uint64_t seed);
  // Annotates `candidate`. Throws std::invalid_argument if it is not in U_t
  // and std::logic_error after termination.
  StepResult Step(int candidate);

  const EnvConfig& config() const { return config_; }
  const Dataset& pool() const { return *pool_; }
  const Dataset& test() const { return *test_; }
  const std::vector<int>& labelled() const { return labelled_; }
  const std::vector<int>& unlabelled() const { return unlabelled_; }
  const std::vector<int>& validation() const { return validation_; }
  const TrainedModel& model() const { return model_; }
  const Observation& observation() const { return observation_; }
  int t() const { return t_; }
  double accuracy() const { return observation_.accuracy; }
  bool terminal() const { return observation_.terminal; }

 private:
  void Refresh();
  ActionSet ComputeActions() const;

  std::shared_ptr<const Dataset> pool_;
  std::shared_ptr<const Dataset> test_;
  EnvConfig config_;
  Eigen::MatrixXd unit_rows_;  // pool rows scaled to unit norm

  std::vector<int> labelled_;
  std::vector<int> unlabelled_;  // sorted
  std::vector<int> validation_;
  Eigen::VectorXd labelled_sum_;
  Eigen::VectorXd unlabelled_sum_;
  TrainedModel model_;
  Observation observation_;
  int t_ = 0;
  bool has_episode_ = false;
};

}  // namespace alstrat

#endif  // ALSTRAT_ENVIRONMENT_HPP_
