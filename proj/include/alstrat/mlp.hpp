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

#ifndef ALSTRAT_MLP_HPP_
#define ALSTRAT_MLP_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "alstrat/rng.hpp"

namespace alstrat {

enum class Activation { kSigmoid, kIdentity };

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

// Parameter gradients of (upstream . output), plus the gradient with respect
// to the input so networks can be chained.
struct MlpGradients {
  std::vector<DenseLayer> layers;
  Eigen::MatrixXd input;  // one column per sample

  Eigen::VectorXd Flat() const;
};

// Fully connected network. Hidden layers use the sigmoid; the last layer uses
// `output_activation` (identity unless the network feeds another network).
class Mlp {
 public:
  Mlp() = default;
  // All parameters zero.
  explicit Mlp(std::vector<int> layer_dims,
               Activation output_activation = Activation::kIdentity);

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  static Mlp RandomInit(std::vector<int> layer_dims, Rng& rng,
                        Activation output_activation = Activation::kIdentity);

  const std::vector<int>& layer_dims() const { return layer_dims_; }
  int input_dim() const { return layer_dims_.front(); }
  int output_dim() const { return layer_dims_.back(); }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t num_params() const;
  Activation output_activation() const { return output_activation_; }

  DenseLayer& layer(std::size_t i) { return layers_[i]; }
  const DenseLayer& layer(std::size_t i) const { return layers_[i]; }

  Eigen::VectorXd Forward(const Eigen::VectorXd& input) const;
  // Columns are samples.
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& inputs) const;

  MlpGradients Backward(const Eigen::VectorXd& input,
                        const Eigen::VectorXd& upstream) const;
  // Parameter gradients are summed over the columns of `inputs`.
  MlpGradients BackwardBatch(const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& upstream) const;

  // Layer by layer: weights row-major, then bias.
  Eigen::VectorXd FlatParams() const;
  void SetFlatParams(const Eigen::VectorXd& flat);

 private:
  void CheckInputRows(Eigen::Index rows) const;
  Activation ActivationOf(std::size_t layer_index) const;

  std::vector<int> layer_dims_;
  std::vector<DenseLayer> layers_;
  Activation output_activation_ = Activation::kIdentity;
};

// Flattens layer-shaped values in the same order as Mlp::FlatParams.
Eigen::VectorXd FlattenLayers(const std::vector<DenseLayer>& layers);

inline constexpr int kMlpFormatVersion = 1;

nlohmann::json MlpToJson(const Mlp& net);
// Throws std::invalid_argument if the shapes do not chain.
Mlp MlpFromJson(const nlohmann::json& j);

}  // namespace alstrat

#endif  // ALSTRAT_MLP_HPP_
