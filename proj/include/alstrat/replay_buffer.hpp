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

#ifndef ALSTRAT_REPLAY_BUFFER_HPP_
#define ALSTRAT_REPLAY_BUFFER_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "alstrat/environment.hpp"
#include "alstrat/rng.hpp"

namespace alstrat {

struct Transition {
  StateVector state;
  Eigen::Vector3d action = Eigen::Vector3d::Zero();
  double reward = -1.0;
  StateVector next_state;
  Eigen::Matrix<double, 3, Eigen::Dynamic> next_actions;  // may be empty if terminal
  bool terminal = false;
};

// Fixed-capacity FIFO ring of transitions with one priority per slot.
// New entries get the largest priority seen so far.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  void Add(Transition t);

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }
  const Transition& at(std::size_t slot) const { return data_[slot]; }
  double priority(std::size_t slot) const { return priorities_[slot]; }
  void SetPriority(std::size_t slot, double priority);
  double max_priority() const { return max_priority_; }

  // P(i) = priority_i^exponent / sum_j priority_j^exponent; uniform when all
  // weights are zero.
  std::vector<double> SamplingProbabilities(double exponent) const;
  // Slots drawn with replacement from SamplingProbabilities(exponent).
  std::vector<std::size_t> Sample(std::size_t batch_size, double exponent, Rng& rng) const;

  // Slots from oldest to newest.
  std::vector<std::size_t> SlotsOldestFirst() const;

 private:
  std::size_t capacity_;
  std::vector<Transition> data_;
  std::vector<double> priorities_;
  std::size_t next_ = 0;  // slot overwritten by the next Add once full
  double max_priority_ = 1.0;
};

}  // namespace alstrat

#endif  // ALSTRAT_REPLAY_BUFFER_HPP_
