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

#ifndef SMD_WHITEN_HPP_
#define SMD_WHITEN_HPP_

#include <vector>

#include "smd/frame.hpp"

namespace smd {

/// ZCA whitening model over flattened frames.
struct WhitenModel {
  int width = 0;
  int height = 0;
  double epsilon = 1e-5;
  std::vector<double> mean;       // per-pixel mean, length width*height
  std::vector<double> transform;  // row-major n x n, n = width*height
};

/// Fits a ZCA model on >= 2 same-sized frames: eigendecomposition of the
/// sample covariance, eigenvalues regularised by epsilon.
WhitenModel whiten_fit(const std::vector<GrayFrame>& frames, double epsilon = 1e-5);

/// Applies the whitening transform to the mean-subtracted frame. Output is
/// not rescaled; a constant-only model maps every frame to all zeros.
GrayFrame whiten_transform(const WhitenModel& model, const GrayFrame& frame);

/// whiten_transform followed by min-max rescaling to [0,1]. A degenerate
/// (constant) result rescales to all zeros.
GrayFrame whiten_apply(const WhitenModel& model, const GrayFrame& frame);

}  // namespace smd

#endif  // SMD_WHITEN_HPP_
