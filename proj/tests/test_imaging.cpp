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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smd/imaging.hpp"
#include "smd/whiten.hpp"

using namespace smd;

namespace {

RawFrame solid_raw(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RawFrame f(w, h);
  std::fill(f.r.begin(), f.r.end(), r);
  std::fill(f.g.begin(), f.g.end(), g);
  std::fill(f.b.begin(), f.b.end(), b);
  return f;
}

GrayFrame random_frame(int w, int h, std::mt19937& rng) {
  GrayFrame f(w, h);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : f.data) v = u(rng);
  return f;
}

// Independent naive convolution used as an oracle for smd::convolve.
GrayFrame naive_convolve(const GrayFrame& f, const Kernel2D& k) {
  GrayFrame out(f.width, f.height);
  for (int i = 0; i < f.height; ++i)
    for (int j = 0; j < f.width; ++j) {
      double acc = 0;
      for (int u = 0; u < k.rows; ++u)
        for (int v = 0; v < k.cols; ++v) {
          const int ii = i + u - k.rows / 2;
          const int jj = j + v - k.cols / 2;
          if (ii < 0 || ii >= f.height || jj < 0 || jj >= f.width) continue;
          acc += k.at(u, v) * f.at(ii, jj);
        }
      out.at(i, j) = acc;
    }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("imaging");

TEST_CASE("grayscale: white maps to 1.0 everywhere") {
  GrayFrame g = to_grayscale(solid_raw(4, 3, 255, 255, 255));
  for (double v : g.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grayscale: single-channel values match the luma weights") {
  GrayFrame red = to_grayscale(solid_raw(3, 3, 100, 0, 0));
  CHECK(red.at(1, 1) == doctest::Approx(29.9 / 255.0).epsilon(1e-12));
  GrayFrame green = to_grayscale(solid_raw(3, 3, 0, 255, 0));
  CHECK(green.at(1, 1) == doctest::Approx(149.685 / 255.0).epsilon(1e-12));
}

TEST_CASE("grayscale: raising any channel never lowers the output") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> u8(0, 254);
  for (int trial = 0; trial < 200; ++trial) {
    RawFrame f = solid_raw(3, 3, u8(rng), u8(rng), u8(rng));
    const double before = to_grayscale(f).at(1, 1);
    switch (trial % 3) {
      case 0: f.r[f.idx(1, 1)] += 1; break;
      case 1: f.g[f.idx(1, 1)] += 1; break;
      case 2: f.b[f.idx(1, 1)] += 1; break;
    }
    CHECK(to_grayscale(f).at(1, 1) >= before);
  }
}

TEST_CASE("resize: same size returns an identical frame") {
  std::mt19937 rng(3);
  GrayFrame f = random_frame(7, 5, rng);
  GrayFrame r = resize(f, 7, 5);
  CHECK(r.data == f.data);
}

TEST_CASE("resize: constant frames stay constant") {
  GrayFrame f(6, 6, 0.5);
  GrayFrame r = resize(f, 11, 4);
  for (double v : r.data) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("resize: 2x2 checkerboard to 4x4 matches hand-evaluated bilinear weights") {
  GrayFrame f(2, 2);
  f.at(0, 0) = 0.0;
  f.at(0, 1) = 1.0;
  f.at(1, 0) = 1.0;
  f.at(1, 1) = 0.0;
  GrayFrame r = resize(f, 4, 4);
  const double expected[4][4] = {
      {0.0, 1.0 / 3, 2.0 / 3, 1.0},
      {1.0 / 3, 4.0 / 9, 5.0 / 9, 2.0 / 3},
      {2.0 / 3, 5.0 / 9, 4.0 / 9, 1.0 / 3},
      {1.0, 2.0 / 3, 1.0 / 3, 0.0},
  };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(r.at(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
  // Corner samples equal the original corners.
  CHECK(r.at(0, 0) == f.at(0, 0));
  CHECK(r.at(0, 3) == f.at(0, 1));
  CHECK(r.at(3, 0) == f.at(1, 0));
  CHECK(r.at(3, 3) == f.at(1, 1));
}

TEST_CASE("resize: invalid target size is rejected") {
  GrayFrame f(4, 4, 0.1);
  CHECK_THROWS_AS(resize(f, 2, 4), std::invalid_argument);
  CHECK_THROWS_AS(resize(f, 4, 1), std::invalid_argument);
}

TEST_CASE("whiten: constant sequence maps every frame to zero before rescale") {
  std::vector<GrayFrame> frames(3, GrayFrame(4, 4, 0.7));
  WhitenModel model = whiten_fit(frames, 1e-5);
  GrayFrame raw = whiten_transform(model, frames[0]);
  for (double v : raw.data) CHECK(std::abs(v) < 1e-9);
  GrayFrame rescaled = whiten_apply(model, frames[0]);
  for (double v : rescaled.data) CHECK(v == 0.0);
}

TEST_CASE("whiten: decorrelates a random sequence") {
  std::mt19937 rng(11);
  const int n = 16;  // 4x4 frames
  const int m = 500;
  const double eps = 1e-4;
  std::vector<GrayFrame> frames;
  // Correlated source: neighbouring pixels share a common driver.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < m; ++t) {
    GrayFrame f(4, 4);
    const double common = u(rng);
    for (double& v : f.data) v = std::clamp(0.5 * common + 0.5 * u(rng), 0.0, 1.0);
    frames.push_back(std::move(f));
  }
  WhitenModel model = whiten_fit(frames, eps);
  std::vector<GrayFrame> whitened;
  for (const auto& f : frames) whitened.push_back(whiten_transform(model, f));

  // Empirical covariance of the whitened set, computed by the test.
  std::vector<double> mean(n, 0.0);
  for (const auto& wf : whitened)
    for (int k = 0; k < n; ++k) mean[k] += wf.data[k] / m;
  double max_off = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double cov = 0.0;
      for (const auto& wf : whitened)
        cov += (wf.data[a] - mean[a]) * (wf.data[b] - mean[b]) / (m - 1);
      if (a != b) max_off = std::max(max_off, std::abs(cov));
    }
  CHECK(max_off < 10 * eps);
}

TEST_CASE("whiten: huge epsilon degenerates to scaled mean subtraction") {
  std::mt19937 rng(13);
  std::vector<GrayFrame> frames;
  for (int t = 0; t < 20; ++t) frames.push_back(random_frame(4, 4, rng));
  WhitenModel model = whiten_fit(frames, 1e9);
  GrayFrame raw = whiten_transform(model, frames[0]);
  // Output should be proportional to the mean-subtracted input.
  double ratio = 0.0;
  bool first = true;
  for (size_t k = 0; k < raw.data.size(); ++k) {
    const double centred = frames[0].data[k] - model.mean[k];
    if (std::abs(centred) < 1e-9) continue;
    const double r = raw.data[k] / centred;
    if (first) {
      ratio = r;
      first = false;
    } else {
      CHECK(r == doctest::Approx(ratio).epsilon(1e-6));
    }
  }
  CHECK_FALSE(first);
}

TEST_CASE("whiten: bad inputs are rejected") {
  std::vector<GrayFrame> one(1, GrayFrame(4, 4, 0.5));
  CHECK_THROWS_AS(whiten_fit(one, 1e-5), std::invalid_argument);
  std::vector<GrayFrame> mixed{GrayFrame(4, 4, 0.5), GrayFrame(5, 4, 0.5)};
  CHECK_THROWS_AS(whiten_fit(mixed, 1e-5), std::invalid_argument);
  std::vector<GrayFrame> two(2, GrayFrame(4, 4, 0.5));
  CHECK_THROWS_AS(whiten_fit(two, 0.0), std::invalid_argument);
  WhitenModel model = whiten_fit(two, 1e-5);
  CHECK_THROWS_AS(whiten_apply(model, GrayFrame(5, 5, 0.0)), std::invalid_argument);
}

TEST_CASE("box filter: 1x1 window is the identity") {
  std::mt19937 rng(5);
  GrayFrame f = random_frame(6, 4, rng);
  GrayFrame r = box_filter(f, 1, 1);
  for (size_t k = 0; k < f.data.size(); ++k)
    CHECK(r.data[k] == doctest::Approx(f.data[k]).epsilon(1e-12));
}

TEST_CASE("box filter: interior of a uniform frame stays at the constant") {
  GrayFrame f(5, 5, 1.0);
  GrayFrame r = box_filter(f, 3, 3);
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j) CHECK(r.at(i, j) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("box filter: single hot pixel spreads 1/9 over its neighbourhood") {
  GrayFrame f(5, 5, 0.0);
  f.at(2, 2) = 1.0;
  GrayFrame r = box_filter(f, 3, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const bool near = std::abs(i - 2) <= 1 && std::abs(j - 2) <= 1;
      CHECK(r.at(i, j) == doctest::Approx(near ? 1.0 / 9 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("box filter: even window is rejected") {
  GrayFrame f(5, 5, 0.0);
  CHECK_THROWS_AS(box_filter(f, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(box_filter(f, 3, 4), std::invalid_argument);
}

TEST_CASE("median filter: constant frame unchanged, salt removed") {
  GrayFrame f(5, 5, 0.25);
  GrayFrame r = median_filter(f, 3);
  for (double v : r.data) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  GrayFrame salt(5, 5, 0.0);
  salt.at(2, 2) = 1.0;
  GrayFrame cleaned = median_filter(salt, 3);
  for (double v : cleaned.data) CHECK(v == 0.0);
}

TEST_CASE("median filter: 3x3 window with five ones picks 1") {
  // Window values {0,0,0,0,1,1,1,1,1} at the centre.
  GrayFrame f(3, 3, 0.0);
  f.at(0, 1) = f.at(1, 0) = f.at(1, 1) = f.at(2, 1) = f.at(2, 2) = 1.0;
  GrayFrame r = median_filter(f, 3);
  CHECK(r.at(1, 1) == 1.0);
}

TEST_CASE("median filter: matches a sort-and-pick oracle on random frames") {
  std::mt19937 rng(17);
  GrayFrame f = random_frame(9, 7, rng);
  GrayFrame r = median_filter(f, 3);
  for (int i = 0; i < f.height; ++i)
    for (int j = 0; j < f.width; ++j) {
      std::vector<double> window;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          window.push_back(
              f.at(std::clamp(i + di, 0, f.height - 1), std::clamp(j + dj, 0, f.width - 1)));
      std::sort(window.begin(), window.end());
      CHECK(r.at(i, j) == window[4]);
    }
  CHECK_THROWS_AS(median_filter(f, 4), std::invalid_argument);
}

TEST_CASE("filters preserve the input range") {
  std::mt19937 rng(23);
  GrayFrame f = random_frame(8, 8, rng);
  const auto [lo, hi] = std::minmax_element(f.data.begin(), f.data.end());
  for (const GrayFrame& r : {box_filter(f, 3, 3), median_filter(f, 3)}) {
    for (double v : r.data) {
      CHECK(v >= 0.0);  // box filter zero padding can only pull toward zero
      CHECK(v <= *hi + 1e-12);
    }
  }
  // Median with edge replication also respects the lower bound.
  for (double v : median_filter(f, 3).data) CHECK(v >= *lo - 1e-12);
}

TEST_CASE("dog kernel: weights sum to zero and uniform input gives zero response") {
  Kernel2D k = dog_kernel(3, 0.5);
  double sum = 0.0;
  for (double w : k.weights) sum += w;
  CHECK(std::abs(sum) < 1e-12);

  GrayFrame uniform(7, 7, 0.8);
  GrayFrame r = convolve(uniform, k);
  for (int i = 1; i < 6; ++i)
    for (int j = 1; j < 6; ++j) CHECK(std::abs(r.at(i, j)) < 1e-9);
}

TEST_CASE("dog kernel: symmetric under 90 degree rotation") {
  Kernel2D k = dog_kernel(5, 0.8);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(k.at(i, j) == doctest::Approx(k.at(j, 4 - i)).epsilon(1e-12));
}

TEST_CASE("dog kernel: response magnitude peaks on a step edge") {
  Kernel2D k = dog_kernel(3, 0.5);
  GrayFrame step(8, 7, 0.0);
  for (int i = 0; i < 7; ++i)
    for (int j = 4; j < 8; ++j) step.at(i, j) = 1.0;
  GrayFrame r = convolve(step, k);
  // The edge sits between columns 3 and 4; interior rows must peak there.
  for (int i = 1; i < 6; ++i) {
    int best = 0;
    for (int j = 1; j < 7; ++j)
      if (std::abs(r.at(i, j)) > std::abs(r.at(i, best))) best = j;
    CHECK((best == 3 || best == 4));
  }
  CHECK_THROWS_AS(dog_kernel(4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(dog_kernel(3, -1.0), std::invalid_argument);
}

TEST_CASE("convolve matches the naive oracle") {
  std::mt19937 rng(29);
  GrayFrame f = random_frame(10, 9, rng);
  for (const Kernel2D& k : {dog_kernel(3, 0.5), directional_kernel(Direction::kUp, 3)}) {
    GrayFrame a = convolve(f, k);
    GrayFrame b = naive_convolve(f, k);
    for (size_t i = 0; i < a.data.size(); ++i)
      CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("directional kernels: leftwards is the column ramp [1,0,-1]") {
  Kernel2D left = directional_kernel(Direction::kLeft, 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(left.at(i, 0) == 1.0);
    CHECK(left.at(i, 1) == 0.0);
    CHECK(left.at(i, 2) == -1.0);
  }
}

TEST_CASE("directional kernels: opposite directions negate each other") {
  for (int size : {3, 5}) {
    Kernel2D left = directional_kernel(Direction::kLeft, size);
    Kernel2D right = directional_kernel(Direction::kRight, size);
    Kernel2D up = directional_kernel(Direction::kUp, size);
    Kernel2D down = directional_kernel(Direction::kDown, size);
    for (size_t k = 0; k < left.weights.size(); ++k) {
      CHECK(left.weights[k] + right.weights[k] == 0.0);
      CHECK(up.weights[k] + down.weights[k] == 0.0);
    }
    // Up/down are the row analogues of left/right.
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) CHECK(up.at(i, j) == left.at(j, i));
  }
}

TEST_CASE("directional kernels: zero response on uniform input") {
  GrayFrame uniform(6, 6, 0.4);
  GrayFrame r = convolve(uniform, directional_kernel(Direction::kRight, 3));
  for (int i = 1; i < 5; ++i)
    for (int j = 1; j < 5; ++j) CHECK(std::abs(r.at(i, j)) < 1e-12);
  CHECK_THROWS_AS(directional_kernel(Direction::kRight, 4), std::invalid_argument);
}

TEST_SUITE_END();
