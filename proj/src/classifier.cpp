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

#include "alstrat/classifier.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "alstrat/rng.hpp"

namespace alstrat {
namespace {

constexpr double kGradTolerance = 1e-8;
constexpr double kHessianJitter = 1e-10;

double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Appends a column of ones.
Eigen::MatrixXd WithIntercept(const Eigen::MatrixXd& phi) {
  Eigen::MatrixXd out(phi.rows(), phi.cols() + 1);
  out.leftCols(phi.cols()) = phi;
  out.col(phi.cols()).setOnes();
  return out;
}

}  // namespace

ClassifierKind ParseClassifierKind(const std::string& s) {
  if (s == "logreg") return ClassifierKind::kLogReg;
  if (s == "rbf_logreg") return ClassifierKind::kRbfLogReg;
  throw std::invalid_argument("unknown classifier kind '" + s + "'");
}

std::string ClassifierKindName(ClassifierKind kind) {
  return kind == ClassifierKind::kLogReg ? "logreg" : "rbf_logreg";
}

nlohmann::json ClassifierSpecToJson(const ClassifierSpec& spec) {
  return {{"kind", ClassifierKindName(spec.kind)},
          {"l2_strength", spec.l2_strength},
          {"max_iterations", spec.max_iterations},
          {"rbf",
           {{"n_features", spec.rbf.n_features},
            {"bandwidth", spec.rbf.bandwidth},
            {"seed", spec.rbf.seed}}}};
}

ClassifierSpec ClassifierSpecFromJson(const nlohmann::json& j) {
  ClassifierSpec spec;
  spec.kind = ParseClassifierKind(j.value("kind", "logreg"));
  spec.l2_strength = j.value("l2_strength", spec.l2_strength);
  spec.max_iterations = j.value("max_iterations", spec.max_iterations);
  if (j.contains("rbf")) {
    const auto& r = j.at("rbf");
    spec.rbf.n_features = r.value("n_features", spec.rbf.n_features);
    spec.rbf.bandwidth = r.value("bandwidth", spec.rbf.bandwidth);
    spec.rbf.seed = r.value("seed", spec.rbf.seed);
  }
  if (!(spec.l2_strength > 0.0) || spec.max_iterations <= 0 ||
      spec.rbf.n_features <= 0 || !(spec.rbf.bandwidth > 0.0)) {
    throw std::invalid_argument("classifier spec: parameters must be positive");
  }
  return spec;
}

Eigen::MatrixXd TrainedModel::Features(const Eigen::MatrixXd& rows) const {
  if (spec_.kind == ClassifierKind::kLogReg) return rows;
  Eigen::MatrixXd z = rows * projection_.transpose();
  z.rowwise() += phase_.transpose();
  const double scale = std::sqrt(2.0 / static_cast<double>(projection_.rows()));
  return (z.array().cos() * scale).matrix();
}

TrainedModel TrainedModel::FromWeights(Eigen::VectorXd coefficients, double intercept) {
  TrainedModel m;
  m.input_dim_ = coefficients.size();
  m.weights_.resize(coefficients.size() + 1);
  m.weights_.head(coefficients.size()) = coefficients;
  m.weights_[coefficients.size()] = intercept;
  return m;
}

Eigen::VectorXd TrainedModel::Prob0Rows(const Eigen::MatrixXd& rows,
                                        const std::vector<int>& indices) const {
  if (rows.cols() != input_dim_) {
    throw std::invalid_argument("TrainedModel: input dimension mismatch");
  }
  const Eigen::Index n = indices.empty() ? rows.rows()
                                         : static_cast<Eigen::Index>(indices.size());
  if (degenerate_) return Eigen::VectorXd::Constant(n, degenerate_prob0_);
  Eigen::MatrixXd picked;
  if (indices.empty()) {
    picked = rows;
  } else {
    picked.resize(n, rows.cols());
    for (Eigen::Index i = 0; i < n; ++i) picked.row(i) = rows.row(indices[i]);
  }
  const Eigen::MatrixXd phi = Features(picked);
  const Eigen::Index p = phi.cols();
  Eigen::VectorXd logits = phi * weights_.head(p);
  logits.array() += weights_[p];
  return logits.unaryExpr([](double z) { return Sigmoid(-z); });
}

double TrainedModel::Prob0(const Eigen::VectorXd& x) const {
  return Prob0Rows(x.transpose())[0];
}

std::array<double, 2> TrainedModel::PredictProba(const Eigen::VectorXd& x) const {
  const double p0 = Prob0(x);
  return {p0, 1.0 - p0};
}

int TrainedModel::Predict(const Eigen::VectorXd& x) const {
  return Prob0(x) > 0.5 ? 0 : 1;
}

double RegularizedLogLoss(const Eigen::MatrixXd& design, const std::vector<int>& labels,
                          const Eigen::VectorXd& weights, double l2_strength) {
  const Eigen::Index p = design.cols();
  const Eigen::VectorXd z = design * weights.head(p) +
                            Eigen::VectorXd::Constant(design.rows(), weights[p]);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += Softplus(z[i]) - (labels[i] == 1 ? z[i] : 0.0);
  }
  return loss + 0.5 * l2_strength * weights.head(p).squaredNorm();
}

TrainedModel Fit(const ClassifierSpec& spec, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels, const std::vector<int>& indices) {
  if (indices.empty()) throw std::invalid_argument("Fit: labelled set is empty");
  TrainedModel model;
  model.spec_ = spec;
  model.input_dim_ = features.cols();

  std::vector<int> y;
  y.reserve(indices.size());
  int n0 = 0;
  for (int idx : indices) {
    y.push_back(labels[idx]);
    n0 += labels[idx] == 0 ? 1 : 0;
  }
  const int m = static_cast<int>(indices.size());
  if (n0 == 0 || n0 == m) {
    model.degenerate_ = true;
    model.degenerate_prob0_ = (n0 + 1.0) / (m + 2.0);
    return model;
  }

  if (spec.kind == ClassifierKind::kRbfLogReg) {
    Rng rng = MakeRng(spec.rbf.seed, 0xF0);
    const Eigen::Index d = features.cols();
    model.projection_.resize(spec.rbf.n_features, d);
    model.phase_.resize(spec.rbf.n_features);
    for (Eigen::Index r = 0; r < model.projection_.rows(); ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        model.projection_(r, c) = StandardNormal(rng) / spec.rbf.bandwidth;
      }
    }
    for (Eigen::Index r = 0; r < model.phase_.size(); ++r) {
      model.phase_[r] = 6.283185307179586 * UniformUnit(rng);
    }
  }

  Eigen::MatrixXd picked(m, features.cols());
  for (int i = 0; i < m; ++i) picked.row(i) = features.row(indices[i]);
  const Eigen::MatrixXd phi = model.Features(picked);
  const Eigen::MatrixXd design = WithIntercept(phi);
  const Eigen::Index p = phi.cols();
  Eigen::VectorXd yv(m);
  for (int i = 0; i < m; ++i) yv[i] = y[i];

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p + 1, spec.l2_strength);
  penalty[p] = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  double loss = RegularizedLogLoss(phi, y, beta, spec.l2_strength);
  for (int iter = 0; iter < spec.max_iterations; ++iter) {
    const Eigen::VectorXd z = design * beta;
    const Eigen::VectorXd prob1 = z.unaryExpr([](double v) { return Sigmoid(v); });
    const Eigen::VectorXd grad =
        design.transpose() * (prob1 - yv) + penalty.cwiseProduct(beta);
    if (grad.norm() < kGradTolerance) break;

    const Eigen::VectorXd s = prob1.cwiseProduct((1.0 - prob1.array()).matrix());
    Eigen::MatrixXd hessian = design.transpose() * s.asDiagonal() * design;
    hessian.diagonal() += penalty;
    hessian.diagonal().array() += kHessianJitter;
    Eigen::VectorXd direction = hessian.ldlt().solve(grad);
    double slope = grad.dot(direction);
    if (!direction.allFinite() || !(slope > 0.0)) {
      direction = grad;
      slope = grad.squaredNorm();
    }

    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      const Eigen::VectorXd candidate = beta - step * direction;
      const double cand_loss = RegularizedLogLoss(phi, y, candidate, spec.l2_strength);
      if (cand_loss <= loss - 1e-4 * step * slope) {
        beta = candidate;
        loss = cand_loss;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  model.weights_ = std::move(beta);
  return model;
}

TrainedModel Fit(const ClassifierSpec& spec, const Dataset& labelled) {
  std::vector<int> all(static_cast<std::size_t>(labelled.size()));
  std::iota(all.begin(), all.end(), 0);
  return Fit(spec, labelled.features, labelled.labels, all);
}

double Accuracy(const TrainedModel& model, const Dataset& testset) {
  if (testset.size() == 0) throw std::invalid_argument("Accuracy: empty test set");
  const Eigen::VectorXd p0 = model.Prob0Rows(testset.features);
  int correct = 0;
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    const int predicted = p0[i] > 0.5 ? 0 : 1;
    correct += predicted == testset.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(p0.size());
}

}  // namespace alstrat
