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

#ifndef ALSTRAT_Q_NETWORK_HPP_
#define ALSTRAT_Q_NETWORK_HPP_

#include <vector>

#include <Eigen/Dense>

#include "alstrat/environment.hpp"
#include "alstrat/mlp.hpp"
#include "alstrat/rng.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {

inline constexpr int kActionDim = 3;

// Q(s, a) = head([encoder(s); a]). The encoder maps the sorted state vector
// to a sigmoid representation; the head ends in a single linear unit.
class QNetwork {
 public:
  QNetwork() = default;
  // Throws std::invalid_argument unless head input = encoder output + 3 and
  // the head has one output.
  QNetwork(Mlp encoder, Mlp head);

  static QNetwork RandomInit(int state_dim, const std::vector<int>& encoder_hidden,
                             const std::vector<int>& head_hidden, Rng& rng);

  const Mlp& encoder() const { return encoder_; }
  const Mlp& head() const { return head_; }
  Mlp& encoder() { return encoder_; }
  Mlp& head() { return head_; }
  int state_dim() const { return encoder_.input_dim(); }

  double Value(const StateVector& state, const ActionFeatures& action) const;
  // Q(state, a_k) for every column a_k of `actions`.
  Eigen::VectorXd Values(const StateVector& state,
                         const Eigen::Matrix<double, 3, Eigen::Dynamic>& actions) const;
  // Q(states_k, actions_k) for paired columns.
  Eigen::VectorXd PairedValues(const Eigen::MatrixXd& states,
                               const Eigen::MatrixXd& actions) const;

  // Gradient of sum_k upstream_k * Q(states_k, actions_k) with respect to
  // FlatParams().
  Eigen::VectorXd ParamGradient(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions,
                                const Eigen::VectorXd& upstream) const;

  double output_bias() const;
  void set_output_bias(double b);

  std::size_t num_params() const { return encoder_.num_params() + head_.num_params(); }
  // Encoder parameters followed by head parameters.
  Eigen::VectorXd FlatParams() const;
  void SetFlatParams(const Eigen::VectorXd& flat);

 private:
  Mlp encoder_;
  Mlp head_;
};

nlohmann::json QNetworkToJson(const QNetwork& net);
QNetwork QNetworkFromJson(const nlohmann::json& j);

}  // namespace alstrat

#endif  // ALSTRAT_Q_NETWORK_HPP_
