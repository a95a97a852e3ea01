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

#ifndef SMD_IMAGING_HPP_
#define SMD_IMAGING_HPP_

#include "smd/frame.hpp"

namespace smd {

enum class Direction { kLeft, kRight, kUp, kDown };

/// ITU-R BT.601 luma: (0.299 R + 0.587 G + 0.114 B) / 255, clamped to [0,1].
GrayFrame to_grayscale(const RawFrame& frame);

/// Bilinear resize. Corner samples map onto input corners when both output
/// dimensions exceed 1. Target must be at least 3x3.
GrayFrame resize(const GrayFrame& frame, int out_w, int out_h);

/// Convolution with zero padding outside the frame.
GrayFrame convolve(const GrayFrame& frame, const Kernel2D& kernel);

/// Mean filter over a u x v all-ones window (zero padding). u, v odd.
GrayFrame box_filter(const GrayFrame& mask, int u, int v);

/// Per-pixel median over a k x k window with edge replication. k odd, >= 3.
GrayFrame median_filter(const GrayFrame& mask, int k);

/// Sampled centre-surround difference-of-Gaussians kernel, surround sigma =
/// ratio * centre sigma, shifted so the weights sum to exactly zero.
Kernel2D dog_kernel(int size, double sigma_center, double ratio = 1.6);

/// Antisymmetric gradient kernel for one movement direction. Leftwards has
/// column weights (size-1)/2 - j; rightwards is its elementwise negation;
/// upwards/downwards are the row analogues. Weights sum to zero.
Kernel2D directional_kernel(Direction direction, int size);

}  // namespace smd

#endif  // SMD_IMAGING_HPP_
