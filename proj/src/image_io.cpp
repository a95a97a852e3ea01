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

#include "smd/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace smd {

RawFrame load_image(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_COLOR);
  if (img.empty()) throw IoError("cannot read image: " + path);
  RawFrame out(img.cols, img.rows);
  for (int i = 0; i < img.rows; ++i) {
    const auto* row = img.ptr<cv::Vec3b>(i);
    for (int j = 0; j < img.cols; ++j) {
      const size_t k = out.idx(i, j);
      out.b[k] = row[j][0];
      out.g[k] = row[j][1];
      out.r[k] = row[j][2];
    }
  }
  return out;
}

GrayFrame load_gray(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (img.empty()) throw IoError("cannot read image: " + path);
  GrayFrame out(img.cols, img.rows);
  for (int i = 0; i < img.rows; ++i) {
    const auto* row = img.ptr<std::uint8_t>(i);
    for (int j = 0; j < img.cols; ++j) out.at(i, j) = row[j] / 255.0;
  }
  return out;
}

void save_gray_png(const std::string& path, const GrayFrame& frame) {
  cv::Mat img(frame.height, frame.width, CV_8UC1);
  for (int i = 0; i < frame.height; ++i) {
    auto* row = img.ptr<std::uint8_t>(i);
    for (int j = 0; j < frame.width; ++j) {
      const double v = std::clamp(frame.at(i, j), 0.0, 1.0);
      row[j] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  if (!cv::imwrite(path, img)) throw IoError("cannot write image: " + path);
}

void save_mask_png(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& binary) {
  if (binary.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("save_mask_png: mask size mismatch");
  cv::Mat img(height, width, CV_8UC1);
  for (int i = 0; i < height; ++i) {
    auto* row = img.ptr<std::uint8_t>(i);
    for (int j = 0; j < width; ++j)
      row[j] = binary[static_cast<size_t>(i) * width + j] ? 255 : 0;
  }
  if (!cv::imwrite(path, img)) throw IoError("cannot write image: " + path);
}

}  // namespace smd
