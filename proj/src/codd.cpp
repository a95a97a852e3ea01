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

#include "smd/codd.hpp"

#include <stdexcept>

namespace smd {

CoddResult codd_direction(const std::vector<std::uint8_t>& mask, int width, int height,
                          CoddState& state) {
  if (mask.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("codd_direction: mask size mismatch");
  long long n = 0, sum_i = 0, sum_j = 0;
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j)
      if (mask[static_cast<size_t>(i) * width + j]) {
        ++n;
        sum_i += i;
        sum_j += j;
      }

  CoddResult out;
  if (n == 0) return out;  // empty mask: none, previous centre carried over

  const double cm_i = static_cast<double>(sum_i) / n;
  const double cm_j = static_cast<double>(sum_j) / n;
  if (state.has_prev) {
    if (cm_j > state.cm_j) out.horizontal = DirectionLabel::kRightwards;
    else if (cm_j < state.cm_j) out.horizontal = DirectionLabel::kLeftwards;
    if (cm_i > state.cm_i) out.vertical = DirectionLabel::kDownwards;
    else if (cm_i < state.cm_i) out.vertical = DirectionLabel::kUpwards;
  }
  state.has_prev = true;
  state.cm_i = cm_i;
  state.cm_j = cm_j;
  return out;
}

std::pair<double, double> pcc_pwc(long long tp, long long fp) {
  if (tp < 0 || fp < 0) throw std::invalid_argument("pcc_pwc: negative counts");
  if (tp + fp == 0) throw std::invalid_argument("pcc_pwc: tp + fp must be positive");
  const double pcc = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
  return {pcc, 100.0 - pcc};
}

}  // namespace smd
