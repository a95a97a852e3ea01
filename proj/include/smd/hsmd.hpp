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

#ifndef SMD_HSMD_HPP_
#define SMD_HSMD_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smd/bs.hpp"
#include "smd/frame.hpp"
#include "smd/lif.hpp"

namespace smd {

enum class ComputeMode { kDense, kSparse };

/// Configuration of the background-subtraction + 3-layer SNN pipeline.
struct HsmdConfig {
  double c_p2c = 17.5;     // nA per unit intensity
  double w_l2_l3 = 1370.0; // nA per spike
  double w_l2_l4 = 1370.0;
  double w_l3_l4 = 1370.0;
  int steps_per_frame = 10;
  double dt = 1.0;             // ms per inner step
  double mask_threshold = 0.5; // on the normalized mask
  int filter_u = 3;
  int filter_v = 3;
  LifParams lif;
  ComputeMode mode = ComputeMode::kDense;

  void validate() const {
    lif.validate();
    if (steps_per_frame < 1)
      throw std::invalid_argument("HsmdConfig: steps_per_frame must be >= 1");
    if (c_p2c < 0 || w_l2_l3 < 0 || w_l2_l4 < 0 || w_l3_l4 < 0)
      throw std::invalid_argument("HsmdConfig: gains and weights must be non-negative");
    if (!(dt > 0.0) || dt > lif.tau_m)
      throw std::invalid_argument("HsmdConfig: require 0 < dt <= tau_m");
    if (!(mask_threshold >= 0.0 && mask_threshold <= 1.0))
      throw std::invalid_argument("HsmdConfig: mask_threshold must be in [0,1]");
    if (filter_u < 1 || filter_v < 1 || filter_u % 2 == 0 || filter_v % 2 == 0)
      throw std::invalid_argument("HsmdConfig: filter window sizes must be odd");
  }

  /// Refractory-limited maximum spike count one neuron can reach per frame.
  int max_count_per_frame() const {
    const double per_spike = 1.0 + lif.t_ref / dt;
    const int cap = static_cast<int>(std::ceil(steps_per_frame / per_spike));
    return cap > 1 ? cap : 1;
  }
};

/// Per-pixel motion evidence for one frame.
struct MotionMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> spike_sums;
  std::vector<double> normalized;     // in [0,1]
  std::vector<std::uint8_t> binary;   // normalized >= mask_threshold
};

/// The three 1:1-connected LIF populations plus the one-step spike buffer
/// that realises the L3 delay. All layers have n = width*height neurons.
struct SnnState {
  int width = 0;
  int height = 0;
  LifLayer l2, l3, l4;
  std::vector<std::uint8_t> l2_prev;  // L2 spikes from the previous inner step

  SnnState() = default;
  SnnState(int w, int h, const LifParams& params);
  size_t size() const { return static_cast<size_t>(width) * height; }
};

/// i_c(x,y) = I(x,y) * c_p2c.
std::vector<double> encode_currents(const GrayFrame& foreground, const HsmdConfig& cfg);

/// Runs steps_per_frame inner steps over every pixel chain and returns the
/// L4 spike tallies, zeroing the accumulators. Each inner step: L2 fires on
/// the frame currents, L3 on the previous step's L2 spikes, L4 on the current
/// L2 and L3 spikes. Pixels whose input current is zero are pinned to rest
/// for the frame, which lets the sparse mode skip them without changing any
/// result.
std::vector<std::uint32_t> snn_process_frame(SnnState& state, std::span<const double> currents,
                                             const HsmdConfig& cfg);

/// Same contract as snn_process_frame, but each pixel chain is evaluated
/// only where the input current is positive; skipped pixels retain resting
/// state. Output is bit-identical to the dense mode.
std::vector<std::uint32_t> snn_process_frame_sparse(SnnState& state,
                                                    std::span<const double> currents,
                                                    const HsmdConfig& cfg);

/// Serial single-thread version of the dense step, kept as the reference
/// implementation for partition-invariance tests.
std::vector<std::uint32_t> snn_process_frame_serial(SnnState& state,
                                                    std::span<const double> currents,
                                                    const HsmdConfig& cfg);

/// Mean-filters the spike sums, normalizes by the refractory-limited maximum
/// per-frame count and binarizes at cfg.mask_threshold.
MotionMask postprocess(const std::vector<std::uint32_t>& spike_sums, int width, int height,
                       const HsmdConfig& cfg);

/// Wall-clock per pipeline stage for one frame, in milliseconds.
struct StageTimings {
  double grayscale_ms = 0;
  double bs_ms = 0;
  double encode_ms = 0;
  double snn_ms = 0;
  double post_ms = 0;
  double total_ms() const { return grayscale_ms + bs_ms + encode_ms + snn_ms + post_ms; }
};

/// Stateful frame-by-frame pipeline: grayscale -> background subtraction ->
/// current encoding -> SNN -> postprocess. Frames must arrive in order; one
/// instance is a sequential state machine.
class HsmdPipeline {
 public:
  HsmdPipeline(const HsmdConfig& cfg, const BsBackendState& backend);

  MotionMask process(const RawFrame& frame, StageTimings* timings = nullptr);
  MotionMask process_gray(const GrayFrame& gray, StageTimings* timings = nullptr);

  const HsmdConfig& config() const { return cfg_; }

 private:
  HsmdConfig cfg_;
  BsBackendState backend_;
  SnnState snn_;
  bool initialised_ = false;
};

/// Runs the pipeline over an ordered list of image files. Calls sink once
/// per frame. Throws IoError naming the frame index when a file cannot be
/// read; throws std::invalid_argument when the list is empty.
void pipeline_run(const std::vector<std::string>& frame_paths, const HsmdConfig& cfg,
                  const BsBackendState& backend,
                  const std::function<void(size_t, const MotionMask&, const StageTimings&)>& sink);

}  // namespace smd

#endif  // SMD_HSMD_HPP_
