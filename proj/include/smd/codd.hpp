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

#ifndef SMD_CODD_HPP_
#define SMD_CODD_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "smd/mhsnn.hpp"

namespace smd {

/// Centre of mass carried between frames by the direction-from-centroid
/// baseline.
struct CoddState {
  bool has_prev = false;
  double cm_i = 0.0;
  double cm_j = 0.0;
};

struct CoddResult {
  DirectionLabel horizontal = DirectionLabel::kNone;
  DirectionLabel vertical = DirectionLabel::kNone;
};

/// Direction from the displacement of the foreground centre of mass.
/// Rightwards when cM(j) grows, downwards when cM(i) grows; a stationary or
/// empty mask yields none and an empty mask carries the previous centre
/// over. The first frame primes the state and yields none.
CoddResult codd_direction(const std::vector<std::uint8_t>& mask, int width, int height,
                          CoddState& state);

/// pcc = 100*tp/(tp+fp), pwc = 100*fp/(tp+fp); pcc + pwc == 100 exactly.
std::pair<double, double> pcc_pwc(long long tp, long long fp);

}  // namespace smd

#endif  // SMD_CODD_HPP_
