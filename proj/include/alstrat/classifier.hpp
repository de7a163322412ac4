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

#ifndef ALSTRAT_CLASSIFIER_HPP_
#define ALSTRAT_CLASSIFIER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alstrat/dataset.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {

enum class ClassifierKind { kLogReg, kRbfLogReg };

ClassifierKind ParseClassifierKind(const std::string& s);
std::string ClassifierKindName(ClassifierKind kind);

struct RbfOptions {
  int n_features = 100;
  double bandwidth = 1.0;
  std::uint64_t seed = 0;
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::kLogReg;
  // Penalty (l2_strength / 2) * ||w||^2 added to the summed log-loss. The
  // intercept is not penalized. 1.0 matches an inverse strength C = 1.
  double l2_strength = 1.0;
  int max_iterations = 100;
  RbfOptions rbf;
};

nlohmann::json ClassifierSpecToJson(const ClassifierSpec& spec);
ClassifierSpec ClassifierSpecFromJson(const nlohmann::json& j);

// Immutable result of Fit. The linear score w . phi(x) + b is the logit of
// class 1; Prob0 returns p(y = 0 | x).
class TrainedModel {
 public:
  const ClassifierSpec& spec() const { return spec_; }
  // Coefficients followed by the intercept.
  const Eigen::VectorXd& weights() const { return weights_; }
  // True when fit saw a single class; predictions are then the smoothed
  // class frequency.
  bool degenerate() const { return degenerate_; }
  Eigen::Index input_dim() const { return input_dim_; }

  double Prob0(const Eigen::VectorXd& x) const;
  std::array<double, 2> PredictProba(const Eigen::VectorXd& x) const;
  // p(y = 0) for every row of `rows` selected by `indices` (all rows when
  // `indices` is empty).
  Eigen::VectorXd Prob0Rows(const Eigen::MatrixXd& rows,
                            const std::vector<int>& indices = {}) const;
  // Predicted class: 0 iff p(y = 0) > 0.5.
  int Predict(const Eigen::VectorXd& x) const;

  // Linear model with explicit coefficients; mainly for tests.
  static TrainedModel FromWeights(Eigen::VectorXd coefficients, double intercept);

 private:
  friend TrainedModel Fit(const ClassifierSpec&, const Eigen::MatrixXd&,
                          const std::vector<int>&, const std::vector<int>&);

  Eigen::MatrixXd Features(const Eigen::MatrixXd& rows) const;

  ClassifierSpec spec_;
  Eigen::VectorXd weights_;
  Eigen::Index input_dim_ = 0;
  bool degenerate_ = false;
  double degenerate_prob0_ = 0.5;
  Eigen::MatrixXd projection_;  // n_features x d, rbf only
  Eigen::VectorXd phase_;       // n_features, rbf only
};

// Minimizes the L2-regularized logistic loss over the rows of `features`
// listed in `indices` with damped Newton steps. `labels` is indexed like the
// rows of `features`.
TrainedModel Fit(const ClassifierSpec& spec, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels, const std::vector<int>& indices);
TrainedModel Fit(const ClassifierSpec& spec, const Dataset& labelled);

// Fraction of correctly predicted points.
double Accuracy(const TrainedModel& model, const Dataset& testset);

// Objective that Fit minimizes, for given (coefficients, intercept) in
// feature space; exposed so tests can compare against an independent
// optimizer.
double RegularizedLogLoss(const Eigen::MatrixXd& design, const std::vector<int>& labels,
                          const Eigen::VectorXd& weights, double l2_strength);

}  // namespace alstrat

#endif  // ALSTRAT_CLASSIFIER_HPP_
