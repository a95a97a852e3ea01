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

#ifndef SMD_BS_HPP_
#define SMD_BS_HPP_

#include "smd/frame.hpp"

namespace smd {

enum class BsKind { kFrameDiff, kRunningGaussian };

/// State for the pluggable background-subtraction stage. Two backends share
/// this struct: a two-frame absolute difference and a per-pixel running
/// Gaussian model.
struct BsBackendState {
  BsKind kind = BsKind::kRunningGaussian;
  GrayFrame previous;        // frame-diff backend; empty until the first frame
  GrayFrame mean;            // running-gaussian backend
  GrayFrame variance;        // running-gaussian backend
  double alpha = 0.01;       // exponential learning rate, in (0,1)
  double diff_threshold = 0.05;  // intensity threshold in [0,1]
  double k_sigma = 3.0;      // deviation multiplier

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("BsBackendState: alpha must be in (0,1]");
    if (!(diff_threshold >= 0.0 && diff_threshold <= 1.0))
      throw std::invalid_argument("BsBackendState: diff_threshold must be in [0,1]");
    if (!(k_sigma > 0.0)) throw std::invalid_argument("BsBackendState: k_sigma must be positive");
  }
};

/// |frame - previous| with sub-threshold values zeroed. The first frame
/// returns all zeros and primes the state.
GrayFrame bs_frame_diff(BsBackendState& state, const GrayFrame& frame);

/// Per pixel, passes the frame value through where it deviates from the
/// running mean by more than k_sigma standard deviations, then updates the
/// mean/variance with exponential factor alpha.
GrayFrame bs_running_gaussian(BsBackendState& state, const GrayFrame& frame);

/// Dispatches on state.kind.
GrayFrame bs_apply(BsBackendState& state, const GrayFrame& frame);

}  // namespace smd

#endif  // SMD_BS_HPP_
