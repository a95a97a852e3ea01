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

#ifndef SMD_FRAME_HPP_
#define SMD_FRAME_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smd {

/// 8-bit RGB frame as three row-major planes. Minimum size 3x3.
struct RawFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> r, g, b;

  RawFrame() = default;
  RawFrame(int w, int h)
      : width(w), height(h),
        r(static_cast<size_t>(w) * h, 0),
        g(static_cast<size_t>(w) * h, 0),
        b(static_cast<size_t>(w) * h, 0) {
    if (w < 3 || h < 3) throw std::invalid_argument("RawFrame: size must be at least 3x3");
  }

  size_t size() const { return static_cast<size_t>(width) * height; }
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * width + j; }
};

/// Row-major grayscale frame with intensities in [0,1]. The unit of all
/// image processing in this library; conversion to/from 8-bit happens at
/// I/O boundaries only.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayFrame() = default;
  GrayFrame(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
    if (w < 1 || h < 1) throw std::invalid_argument("GrayFrame: empty size");
  }

  size_t size() const { return data.size(); }
  double& at(int i, int j) { return data[static_cast<size_t>(i) * width + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * width + j]; }
  bool same_size(const GrayFrame& o) const { return width == o.width && height == o.height; }
};

/// Dense convolution kernel with odd dimensions.
struct Kernel2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> weights;  // row-major

  Kernel2D() = default;
  Kernel2D(int r, int c) : rows(r), cols(c), weights(static_cast<size_t>(r) * c, 0.0) {
    if (r < 1 || c < 1 || r % 2 == 0 || c % 2 == 0)
      throw std::invalid_argument("Kernel2D: dimensions must be odd and positive");
  }

  double& at(int i, int j) { return weights[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return weights[static_cast<size_t>(i) * cols + j]; }
};

}  // namespace smd

#endif  // SMD_FRAME_HPP_
