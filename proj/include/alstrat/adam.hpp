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

#ifndef ALSTRAT_ADAM_HPP_
#define ALSTRAT_ADAM_HPP_

#include <cstdint>

#include <Eigen/Dense>

namespace alstrat {

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::int64_t step = 0;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(Eigen::Index num_params, double lr = 1e-4)
      : first_moment(Eigen::VectorXd::Zero(num_params)),
        second_moment(Eigen::VectorXd::Zero(num_params)),
        learning_rate(lr) {}
};

// One bias-corrected Adam update of `params` in place.
void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
              AdamState& state);

}  // namespace alstrat

#endif  // ALSTRAT_ADAM_HPP_
