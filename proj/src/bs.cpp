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

#include "smd/bs.hpp"

#include <cmath>

namespace smd {

GrayFrame bs_frame_diff(BsBackendState& state, const GrayFrame& frame) {
  state.validate();
  if (state.previous.size() == 0) {
    state.previous = frame;
    return GrayFrame(frame.width, frame.height, 0.0);
  }
  if (!state.previous.same_size(frame))
    throw std::invalid_argument("bs_frame_diff: frame dimensions changed mid-sequence");
  GrayFrame out(frame.width, frame.height);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(frame.size()); ++k) {
    const double d = std::abs(frame.data[k] - state.previous.data[k]);
    out.data[k] = d < state.diff_threshold ? 0.0 : d;
  }
  state.previous = frame;
  return out;
}

GrayFrame bs_running_gaussian(BsBackendState& state, const GrayFrame& frame) {
  state.validate();
  if (state.mean.size() == 0) {
    state.mean = frame;
    state.variance = GrayFrame(frame.width, frame.height, 0.0);
    return GrayFrame(frame.width, frame.height, 0.0);
  }
  if (!state.mean.same_size(frame))
    throw std::invalid_argument("bs_running_gaussian: frame dimensions changed mid-sequence");
  GrayFrame out(frame.width, frame.height);
  const double a = state.alpha;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(frame.size()); ++k) {
    const double delta = frame.data[k] - state.mean.data[k];
    const double sigma = std::sqrt(state.variance.data[k]);
    out.data[k] = std::abs(delta) > state.k_sigma * sigma ? frame.data[k] : 0.0;
    state.mean.data[k] += a * delta;
    state.variance.data[k] = (1.0 - a) * state.variance.data[k] + a * delta * delta;
  }
  return out;
}

GrayFrame bs_apply(BsBackendState& state, const GrayFrame& frame) {
  return state.kind == BsKind::kFrameDiff ? bs_frame_diff(state, frame)
                                          : bs_running_gaussian(state, frame);
}

}  // namespace smd
