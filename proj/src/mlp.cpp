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

#include "alstrat/mlp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace alstrat {
namespace {

Eigen::MatrixXd Sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

void ValidateDims(const std::vector<int>& dims) {
  if (dims.size() < 2) {
    throw std::invalid_argument("Mlp: layer_dims needs at least two entries");
  }
  for (int d : dims) {
    if (d <= 0) {
      throw std::invalid_argument("Mlp: layer_dims must be positive");
    }
  }
}

const char* ActivationName(Activation a) {
  return a == Activation::kSigmoid ? "sigmoid" : "identity";
}

Activation ParseActivation(const std::string& s) {
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "identity") return Activation::kIdentity;
  throw std::invalid_argument("Mlp: unknown activation '" + s + "'");
}

}  // namespace

Eigen::VectorXd FlattenLayers(const std::vector<DenseLayer>& layers) {
  Eigen::Index total = 0;
  for (const auto& l : layers) total += l.weights.size() + l.bias.size();
  Eigen::VectorXd flat(total);
  Eigen::Index pos = 0;
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        flat[pos++] = l.weights(r, c);
      }
    }
    flat.segment(pos, l.bias.size()) = l.bias;
    pos += l.bias.size();
  }
  return flat;
}

Eigen::VectorXd MlpGradients::Flat() const { return FlattenLayers(layers); }

Mlp::Mlp(std::vector<int> layer_dims, Activation output_activation)
    : layer_dims_(std::move(layer_dims)),
      output_activation_(output_activation) {
  ValidateDims(layer_dims_);
  layers_.reserve(layer_dims_.size() - 1);
  for (std::size_t i = 0; i + 1 < layer_dims_.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(layer_dims_[i + 1], layer_dims_[i]),
                       Eigen::VectorXd::Zero(layer_dims_[i + 1])});
  }
}

Mlp Mlp::RandomInit(std::vector<int> layer_dims, Rng& rng,
                    Activation output_activation) {
  Mlp net(std::move(layer_dims), output_activation);
  for (auto& l : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weights.cols()));
    auto draw = [&] { return (2.0 * UniformUnit(rng) - 1.0) * bound; };
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = draw();
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = draw();
  }
  return net;
}

std::size_t Mlp::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  }
  return n;
}

Activation Mlp::ActivationOf(std::size_t layer_index) const {
  return layer_index + 1 == layers_.size() ? output_activation_
                                           : Activation::kSigmoid;
}

void Mlp::CheckInputRows(Eigen::Index rows) const {
  if (layers_.empty()) throw std::logic_error("Mlp: network has no layers");
  if (rows != input_dim()) {
    std::ostringstream msg;
    msg << "Mlp: input has dimension " << rows << ", expected " << input_dim();
    throw std::invalid_argument(msg.str());
  }
}

Eigen::VectorXd Mlp::Forward(const Eigen::VectorXd& input) const {
  CheckInputRows(input.size());
  Eigen::VectorXd a = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::VectorXd z = layers_[i].weights * a + layers_[i].bias;
    a = ActivationOf(i) == Activation::kSigmoid ? Eigen::VectorXd(Sigmoid(z))
                                                : std::move(z);
  }
  return a;
}

Eigen::MatrixXd Mlp::ForwardBatch(const Eigen::MatrixXd& inputs) const {
  CheckInputRows(inputs.rows());
  Eigen::MatrixXd a = inputs;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weights * a;
    z.colwise() += layers_[i].bias;
    a = ActivationOf(i) == Activation::kSigmoid ? Sigmoid(z) : std::move(z);
  }
  return a;
}

MlpGradients Mlp::Backward(const Eigen::VectorXd& input,
                           const Eigen::VectorXd& upstream) const {
  return BackwardBatch(Eigen::MatrixXd(input), Eigen::MatrixXd(upstream));
}

MlpGradients Mlp::BackwardBatch(const Eigen::MatrixXd& inputs,
                                const Eigen::MatrixXd& upstream) const {
  CheckInputRows(inputs.rows());
  if (upstream.rows() != output_dim() || upstream.cols() != inputs.cols()) {
    std::ostringstream msg;
    msg << "Mlp: upstream gradient is " << upstream.rows() << "x"
        << upstream.cols() << ", expected " << output_dim() << "x"
        << inputs.cols();
    throw std::invalid_argument(msg.str());
  }

  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(inputs);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weights * acts.back();
    z.colwise() += layers_[i].bias;
    acts.push_back(ActivationOf(i) == Activation::kSigmoid ? Sigmoid(z)
                                                           : std::move(z));
  }

  MlpGradients grads;
  grads.layers.resize(layers_.size());
  Eigen::MatrixXd delta = upstream;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (ActivationOf(i) == Activation::kSigmoid) {
      const Eigen::MatrixXd& a = acts[i + 1];
      delta = delta.cwiseProduct(a.cwiseProduct((1.0 - a.array()).matrix()));
    }
    grads.layers[i].weights = delta * acts[i].transpose();
    grads.layers[i].bias = delta.rowwise().sum();
    delta = layers_[i].weights.transpose() * delta;
  }
  grads.input = std::move(delta);
  return grads;
}

Eigen::VectorXd Mlp::FlatParams() const { return FlattenLayers(layers_); }

void Mlp::SetFlatParams(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != num_params()) {
    throw std::invalid_argument("Mlp: flat parameter vector has wrong length");
  }
  Eigen::Index pos = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        l.weights(r, c) = flat[pos++];
      }
    }
    l.bias = flat.segment(pos, l.bias.size());
    pos += l.bias.size();
  }
}

nlohmann::json MlpToJson(const Mlp& net) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const auto& l = net.layer(i);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      std::vector<double> row(l.weights.cols());
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) row[c] = l.weights(r, c);
      rows.push_back(row);
    }
    weights.push_back(std::move(rows));
    biases.push_back(std::vector<double>(l.bias.data(),
                                         l.bias.data() + l.bias.size()));
  }
  return {{"version", kMlpFormatVersion},
          {"layer_dims", net.layer_dims()},
          {"output_activation", ActivationName(net.output_activation())},
          {"weights", std::move(weights)},
          {"biases", std::move(biases)}};
}

Mlp MlpFromJson(const nlohmann::json& j) {
  if (j.value("version", 0) != kMlpFormatVersion) {
    throw std::invalid_argument("Mlp: unsupported serialization version");
  }
  auto dims = j.at("layer_dims").get<std::vector<int>>();
  Mlp net(dims, ParseActivation(j.value("output_activation", "identity")));
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (weights.size() != net.num_layers() || biases.size() != net.num_layers()) {
    throw std::invalid_argument("Mlp: layer count does not match layer_dims");
  }
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    auto& l = net.layer(i);
    const auto& rows = weights[i];
    if (rows.size() != static_cast<std::size_t>(l.weights.rows())) {
      throw std::invalid_argument("Mlp: weight rows do not chain with layer_dims");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto row = rows[r].get<std::vector<double>>();
      if (row.size() != static_cast<std::size_t>(l.weights.cols())) {
        throw std::invalid_argument(
            "Mlp: weight columns do not chain with layer_dims");
      }
      for (std::size_t c = 0; c < row.size(); ++c) l.weights(r, c) = row[c];
    }
    auto b = biases[i].get<std::vector<double>>();
    if (b.size() != static_cast<std::size_t>(l.bias.size())) {
      throw std::invalid_argument("Mlp: bias length does not match layer_dims");
    }
    for (std::size_t r = 0; r < b.size(); ++r) l.bias[r] = b[r];
  }
  return net;
}

}  // namespace alstrat
