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

#ifndef SMD_IMAGE_IO_HPP_
#define SMD_IMAGE_IO_HPP_

#include <string>

#include "smd/frame.hpp"

namespace smd {

/// Error for unreadable/unwritable files and malformed directories.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads an 8-bit PNG/JPEG/BMP file into an RGB frame. Grayscale files are
/// replicated across the three planes.
RawFrame load_image(const std::string& path);

/// Reads an image as 8-bit grayscale intensities mapped to [0,1].
GrayFrame load_gray(const std::string& path);

/// Writes a [0,1] frame as 8-bit grayscale PNG.
void save_gray_png(const std::string& path, const GrayFrame& frame);

/// Writes a binary plane (nonzero -> 255) as 8-bit grayscale PNG.
void save_mask_png(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& binary);

}  // namespace smd

#endif  // SMD_IMAGE_IO_HPP_
