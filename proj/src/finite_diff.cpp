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

#include "alstrat/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alstrat {

Eigen::VectorXd FiniteDiffGrad(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& point, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("FiniteDiffGrad: eps must be > 0");
  Eigen::VectorXd grad(point.size());
  Eigen::VectorXd probe = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + eps;
    const double up = f(probe);
    probe[i] = point[i] - eps;
    const double down = f(probe);
    probe[i] = point[i];
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

Eigen::VectorXd FiniteDiffGrad(const std::function<double(const Mlp&)>& f,
                               const Mlp& net, double eps) {
  Mlp probe = net;
  return FiniteDiffGrad(
      [&](const Eigen::VectorXd& theta) {
        probe.SetFlatParams(theta);
        return f(probe);
      },
      net.FlatParams(), eps);
}

double MaxRelativeError(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        double abs_floor) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("MaxRelativeError: size mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), abs_floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace alstrat
