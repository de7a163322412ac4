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

#ifndef ALSTRAT_FINITE_DIFF_HPP_
#define ALSTRAT_FINITE_DIFF_HPP_

#include <functional>

#include <Eigen/Dense>

#include "alstrat/mlp.hpp"

namespace alstrat {

// Central differences (f(x+eps) - f(x-eps)) / (2 eps), one coordinate at a
// time.
Eigen::VectorXd FiniteDiffGrad(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& point, double eps = 1e-5);

// Same, over the flattened parameters of `net` (Mlp::FlatParams order).
Eigen::VectorXd FiniteDiffGrad(const std::function<double(const Mlp&)>& f,
                               const Mlp& net, double eps = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, abs_floor)
double MaxRelativeError(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        double abs_floor = 1e-7);

}  // namespace alstrat

#endif  // ALSTRAT_FINITE_DIFF_HPP_
