// Copyright 2025 The SpikeMotion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "smd/lif.hpp"

#include <algorithm>

namespace smd {

LifLayer::LifLayer(size_t n, const LifParams& params) : params_(params) {
  if (n == 0) throw std::invalid_argument("LifLayer: neuron count must be positive");
  params_.validate();
  v_.assign(n, params_.e_l);
  refractory_.assign(n, 0.0);
  spike_count_.assign(n, 0);
}

void LifLayer::check_step_args(std::span<const double> currents, double dt,
                               std::span<std::uint8_t> spikes_out) const {
  if (currents.size() != v_.size())
    throw std::invalid_argument("LifLayer::step: currents length mismatch");
  if (spikes_out.size() != v_.size())
    throw std::invalid_argument("LifLayer::step: spike buffer length mismatch");
  if (!(dt > 0.0) || dt > params_.tau_m)
    throw std::invalid_argument("LifLayer::step: require 0 < dt <= tau_m");
}

void LifLayer::step(std::span<const double> currents, double dt,
                    std::span<std::uint8_t> spikes_out) {
  check_step_args(currents, dt, spikes_out);
  const std::int64_t n = static_cast<std::int64_t>(v_.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    const bool fired = lif_step_neuron(params_, dt, currents[i], v_[i], refractory_[i]);
    spikes_out[i] = fired ? 1 : 0;
    spike_count_[i] += fired ? 1u : 0u;
  }
}

void LifLayer::step_serial(std::span<const double> currents, double dt,
                           std::span<std::uint8_t> spikes_out) {
  check_step_args(currents, dt, spikes_out);
  for (size_t i = 0; i < v_.size(); ++i) {
    const bool fired = lif_step_neuron(params_, dt, currents[i], v_[i], refractory_[i]);
    spikes_out[i] = fired ? 1 : 0;
    spike_count_[i] += fired ? 1u : 0u;
  }
}

std::vector<std::uint8_t> LifLayer::step(std::span<const double> currents, double dt) {
  std::vector<std::uint8_t> spikes(v_.size(), 0);
  step(currents, dt, spikes);
  return spikes;
}

std::vector<std::uint32_t> LifLayer::take_spike_counts() {
  std::vector<std::uint32_t> out(spike_count_.begin(), spike_count_.end());
  std::fill(spike_count_.begin(), spike_count_.end(), 0u);
  return out;
}

void LifLayer::reset_to_rest() {
  std::fill(v_.begin(), v_.end(), params_.e_l);
  std::fill(refractory_.begin(), refractory_.end(), 0.0);
}

}  // namespace smd
