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

#include "alstrat/q_network.hpp"

#include <stdexcept>
#include <utility>

namespace alstrat {

QNetwork::QNetwork(Mlp encoder, Mlp head)
    : encoder_(std::move(encoder)), head_(std::move(head)) {
  if (head_.input_dim() != encoder_.output_dim() + kActionDim) {
    throw std::invalid_argument("QNetwork: head input must be encoder output + 3");
  }
  if (head_.output_dim() != 1) {
    throw std::invalid_argument("QNetwork: head must have a single output");
  }
}

QNetwork QNetwork::RandomInit(int state_dim, const std::vector<int>& encoder_hidden,
                              const std::vector<int>& head_hidden, Rng& rng) {
  if (encoder_hidden.empty()) {
    throw std::invalid_argument("QNetwork: encoder needs at least one layer");
  }
  std::vector<int> enc_dims{state_dim};
  enc_dims.insert(enc_dims.end(), encoder_hidden.begin(), encoder_hidden.end());
  std::vector<int> head_dims{encoder_hidden.back() + kActionDim};
  head_dims.insert(head_dims.end(), head_hidden.begin(), head_hidden.end());
  head_dims.push_back(1);
  Mlp encoder = Mlp::RandomInit(enc_dims, rng, Activation::kSigmoid);
  Mlp head = Mlp::RandomInit(head_dims, rng, Activation::kIdentity);
  return QNetwork(std::move(encoder), std::move(head));
}

double QNetwork::Value(const StateVector& state, const ActionFeatures& action) const {
  Eigen::Matrix<double, 3, Eigen::Dynamic> a(3, 1);
  a.col(0) = action.AsVector();
  return Values(state, a)[0];
}

Eigen::VectorXd QNetwork::Values(
    const StateVector& state, const Eigen::Matrix<double, 3, Eigen::Dynamic>& actions) const {
  const Eigen::VectorXd code = encoder_.Forward(state);
  const Eigen::Index k = actions.cols();
  Eigen::MatrixXd joint(code.size() + kActionDim, k);
  joint.topRows(code.size()) = code.replicate(1, k);
  joint.bottomRows(kActionDim) = actions;
  return head_.ForwardBatch(joint).row(0).transpose();
}

Eigen::VectorXd QNetwork::PairedValues(const Eigen::MatrixXd& states,
                                       const Eigen::MatrixXd& actions) const {
  if (states.cols() != actions.cols() || actions.rows() != kActionDim) {
    throw std::invalid_argument("QNetwork: states/actions batch mismatch");
  }
  const Eigen::MatrixXd codes = encoder_.ForwardBatch(states);
  Eigen::MatrixXd joint(codes.rows() + kActionDim, states.cols());
  joint.topRows(codes.rows()) = codes;
  joint.bottomRows(kActionDim) = actions;
  return head_.ForwardBatch(joint).row(0).transpose();
}

Eigen::VectorXd QNetwork::ParamGradient(const Eigen::MatrixXd& states,
                                        const Eigen::MatrixXd& actions,
                                        const Eigen::VectorXd& upstream) const {
  if (states.cols() != actions.cols() || upstream.size() != states.cols() ||
      actions.rows() != kActionDim) {
    throw std::invalid_argument("QNetwork: gradient batch mismatch");
  }
  const Eigen::MatrixXd codes = encoder_.ForwardBatch(states);
  Eigen::MatrixXd joint(codes.rows() + kActionDim, states.cols());
  joint.topRows(codes.rows()) = codes;
  joint.bottomRows(kActionDim) = actions;
  const MlpGradients head_grad = head_.BackwardBatch(joint, upstream.transpose());
  const MlpGradients enc_grad =
      encoder_.BackwardBatch(states, head_grad.input.topRows(codes.rows()));
  Eigen::VectorXd flat(num_params());
  const Eigen::Index n_enc = static_cast<Eigen::Index>(encoder_.num_params());
  flat.head(n_enc) = enc_grad.Flat();
  flat.tail(flat.size() - n_enc) = head_grad.Flat();
  return flat;
}

double QNetwork::output_bias() const {
  return head_.layer(head_.num_layers() - 1).bias[0];
}

void QNetwork::set_output_bias(double b) {
  head_.layer(head_.num_layers() - 1).bias[0] = b;
}

Eigen::VectorXd QNetwork::FlatParams() const {
  Eigen::VectorXd flat(num_params());
  const Eigen::Index n_enc = static_cast<Eigen::Index>(encoder_.num_params());
  flat.head(n_enc) = encoder_.FlatParams();
  flat.tail(flat.size() - n_enc) = head_.FlatParams();
  return flat;
}

void QNetwork::SetFlatParams(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != num_params()) {
    throw std::invalid_argument("QNetwork: flat parameter vector has wrong length");
  }
  const Eigen::Index n_enc = static_cast<Eigen::Index>(encoder_.num_params());
  encoder_.SetFlatParams(flat.head(n_enc));
  head_.SetFlatParams(flat.tail(flat.size() - n_enc));
}

nlohmann::json QNetworkToJson(const QNetwork& net) {
  return {{"encoder", MlpToJson(net.encoder())}, {"head", MlpToJson(net.head())}};
}

QNetwork QNetworkFromJson(const nlohmann::json& j) {
  return QNetwork(MlpFromJson(j.at("encoder")), MlpFromJson(j.at("head")));
}

}  // namespace alstrat
