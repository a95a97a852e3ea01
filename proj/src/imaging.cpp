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

#include "smd/imaging.hpp"

#include <algorithm>
#include <cmath>

namespace smd {

GrayFrame to_grayscale(const RawFrame& frame) {
  GrayFrame out(frame.width, frame.height);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < frame.height; ++i) {
    for (int j = 0; j < frame.width; ++j) {
      const size_t k = frame.idx(i, j);
      const double y = (0.299 * frame.r[k] + 0.587 * frame.g[k] + 0.114 * frame.b[k]) / 255.0;
      out.at(i, j) = std::clamp(y, 0.0, 1.0);
    }
  }
  return out;
}

GrayFrame resize(const GrayFrame& frame, int out_w, int out_h) {
  if (out_w < 3 || out_h < 3) throw std::invalid_argument("resize: target must be at least 3x3");
  if (out_w == frame.width && out_h == frame.height) return frame;
  GrayFrame out(out_w, out_h);
  const double si = out_h > 1 ? static_cast<double>(frame.height - 1) / (out_h - 1) : 0.0;
  const double sj = out_w > 1 ? static_cast<double>(frame.width - 1) / (out_w - 1) : 0.0;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < out_h; ++i) {
    const double y = i * si;
    const int i0 = std::min(static_cast<int>(y), frame.height - 1);
    const int i1 = std::min(i0 + 1, frame.height - 1);
    const double fy = y - i0;
    for (int j = 0; j < out_w; ++j) {
      const double x = j * sj;
      const int j0 = std::min(static_cast<int>(x), frame.width - 1);
      const int j1 = std::min(j0 + 1, frame.width - 1);
      const double fx = x - j0;
      const double v = (1 - fy) * ((1 - fx) * frame.at(i0, j0) + fx * frame.at(i0, j1)) +
                       fy * ((1 - fx) * frame.at(i1, j0) + fx * frame.at(i1, j1));
      out.at(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

GrayFrame convolve(const GrayFrame& frame, const Kernel2D& kernel) {
  GrayFrame out(frame.width, frame.height);
  const int ri = kernel.rows / 2;
  const int rj = kernel.cols / 2;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < frame.height; ++i) {
    for (int j = 0; j < frame.width; ++j) {
      double acc = 0.0;
      for (int di = -ri; di <= ri; ++di) {
        const int ii = i + di;
        if (ii < 0 || ii >= frame.height) continue;
        for (int dj = -rj; dj <= rj; ++dj) {
          const int jj = j + dj;
          if (jj < 0 || jj >= frame.width) continue;
          acc += kernel.at(di + ri, dj + rj) * frame.at(ii, jj);
        }
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

GrayFrame box_filter(const GrayFrame& mask, int u, int v) {
  if (u < 1 || v < 1 || u % 2 == 0 || v % 2 == 0)
    throw std::invalid_argument("box_filter: window sizes must be odd and positive");
  Kernel2D k(v, u);
  const double w = 1.0 / (static_cast<double>(u) * v);
  std::fill(k.weights.begin(), k.weights.end(), w);
  return convolve(mask, k);
}

GrayFrame median_filter(const GrayFrame& mask, int k) {
  if (k < 3 || k % 2 == 0) throw std::invalid_argument("median_filter: k must be odd and >= 3");
  GrayFrame out(mask.width, mask.height);
  const int r = k / 2;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < mask.height; ++i) {
    std::vector<double> window(static_cast<size_t>(k) * k);
    for (int j = 0; j < mask.width; ++j) {
      size_t n = 0;
      for (int di = -r; di <= r; ++di) {
        const int ii = std::clamp(i + di, 0, mask.height - 1);
        for (int dj = -r; dj <= r; ++dj) {
          const int jj = std::clamp(j + dj, 0, mask.width - 1);
          window[n++] = mask.at(ii, jj);
        }
      }
      auto mid = window.begin() + n / 2;
      std::nth_element(window.begin(), mid, window.begin() + n);
      out.at(i, j) = *mid;
    }
  }
  return out;
}

Kernel2D dog_kernel(int size, double sigma_center, double ratio) {
  if (size < 3 || size % 2 == 0) throw std::invalid_argument("dog_kernel: size must be odd and >= 3");
  if (sigma_center <= 0.0 || ratio <= 0.0)
    throw std::invalid_argument("dog_kernel: sigmas must be positive");
  const double sc = sigma_center;
  const double ss = ratio * sigma_center;
  Kernel2D k(size, size);
  const int r = size / 2;
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      const double d2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
      const double centre = std::exp(-d2 / (2 * sc * sc)) / (2 * M_PI * sc * sc);
      const double surround = std::exp(-d2 / (2 * ss * ss)) / (2 * M_PI * ss * ss);
      k.at(i + r, j + r) = centre - surround;
      sum += k.at(i + r, j + r);
    }
  }
  // Truncation leaves a small residual mass; remove it so uniform input maps
  // to an exactly zero response.
  const double shift = sum / (static_cast<double>(size) * size);
  for (double& w : k.weights) w -= shift;
  return k;
}

Kernel2D directional_kernel(Direction direction, int size) {
  if (size < 3 || size % 2 == 0)
    throw std::invalid_argument("directional_kernel: size must be odd and >= 3");
  Kernel2D k(size, size);
  const int half = (size - 1) / 2;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      double w = 0.0;
      switch (direction) {
        case Direction::kLeft: w = static_cast<double>(half - j); break;
        case Direction::kRight: w = static_cast<double>(j - half); break;
        case Direction::kUp: w = static_cast<double>(half - i); break;
        case Direction::kDown: w = static_cast<double>(i - half); break;
      }
      k.at(i, j) = w;
    }
  }
  return k;
}

}  // namespace smd
