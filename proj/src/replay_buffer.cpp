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

#include "alstrat/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alstrat {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::Add(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    priorities_.push_back(max_priority_);
    return;
  }
  data_[next_] = std::move(t);
  priorities_[next_] = max_priority_;
  next_ = (next_ + 1) % capacity_;
}

void ReplayBuffer::SetPriority(std::size_t slot, double priority) {
  if (slot >= data_.size()) throw std::out_of_range("ReplayBuffer: bad slot");
  if (!(priority >= 0.0) || !std::isfinite(priority)) {
    throw std::invalid_argument("ReplayBuffer: priority must be finite and >= 0");
  }
  priorities_[slot] = priority;
  max_priority_ = std::max(max_priority_, priority);
}

std::vector<double> ReplayBuffer::SamplingProbabilities(double exponent) const {
  std::vector<double> w(priorities_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = exponent == 0.0 ? 1.0 : std::pow(priorities_[i], exponent);
    total += w[i];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(w.size());
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<std::size_t> ReplayBuffer::Sample(std::size_t batch_size, double exponent,
                                              Rng& rng) const {
  if (data_.empty()) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
  const auto probs = SamplingProbabilities(exponent);
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cumulative[i] = acc;
  }
  std::vector<std::size_t> out;
  out.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const double u = UniformUnit(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return out;
}

std::vector<std::size_t> ReplayBuffer::SlotsOldestFirst() const {
  std::vector<std::size_t> slots;
  slots.reserve(data_.size());
  const std::size_t start = data_.size() < capacity_ ? 0 : next_;
  for (std::size_t k = 0; k < data_.size(); ++k) slots.push_back((start + k) % data_.size());
  return slots;
}

}  // namespace alstrat
