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

#include "smd/hsmd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "smd/image_io.hpp"
#include "smd/imaging.hpp"

namespace smd {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Pins the full chain of one pixel at rest. Stepping a resting chain with
// zero current is an exact no-op, so the sparse mode may skip it afterwards.
inline void pin_pixel_to_rest(SnnState& s, size_t p) {
  const double rest = s.l2.params().e_l;
  s.l2.v_data()[p] = rest;
  s.l2.refractory_data()[p] = 0.0;
  s.l3.v_data()[p] = rest;
  s.l3.refractory_data()[p] = 0.0;
  s.l4.v_data()[p] = rest;
  s.l4.refractory_data()[p] = 0.0;
  s.l2_prev[p] = 0;
}

void check_currents(const SnnState& state, std::span<const double> currents) {
  if (currents.size() != state.size())
    throw std::invalid_argument("snn_process_frame: currents length mismatch");
}

template <bool kSerial>
std::vector<std::uint32_t> process_frame_dense(SnnState& state, std::span<const double> currents,
                                               const HsmdConfig& cfg) {
  cfg.validate();
  check_currents(state, currents);
  const size_t n = state.size();
  for (size_t p = 0; p < n; ++p)
    if (!(currents[p] > 0.0)) pin_pixel_to_rest(state, p);

  std::vector<std::uint8_t> s2(n), s3(n), s4(n);
  std::vector<double> cur3(n), cur4(n);
  for (int step = 0; step < cfg.steps_per_frame; ++step) {
    if constexpr (kSerial)
      state.l2.step_serial(currents, cfg.dt, s2);
    else
      state.l2.step(currents, cfg.dt, s2);

    const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (!kSerial && sn > 4096)
    for (std::int64_t p = 0; p < sn; ++p) cur3[p] = cfg.w_l2_l3 * state.l2_prev[p];
    if constexpr (kSerial)
      state.l3.step_serial(cur3, cfg.dt, s3);
    else
      state.l3.step(cur3, cfg.dt, s3);

#pragma omp parallel for schedule(static) if (!kSerial && sn > 4096)
    for (std::int64_t p = 0; p < sn; ++p)
      cur4[p] = cfg.w_l2_l4 * s2[p] + cfg.w_l3_l4 * s3[p];
    if constexpr (kSerial)
      state.l4.step_serial(cur4, cfg.dt, s4);
    else
      state.l4.step(cur4, cfg.dt, s4);

    std::copy(s2.begin(), s2.end(), state.l2_prev.begin());
  }
  return state.l4.take_spike_counts();
}

}  // namespace

SnnState::SnnState(int w, int h, const LifParams& params)
    : width(w), height(h),
      l2(static_cast<size_t>(w) * h, params),
      l3(static_cast<size_t>(w) * h, params),
      l4(static_cast<size_t>(w) * h, params),
      l2_prev(static_cast<size_t>(w) * h, 0) {
  if (w < 1 || h < 1) throw std::invalid_argument("SnnState: empty size");
}

std::vector<double> encode_currents(const GrayFrame& foreground, const HsmdConfig& cfg) {
  std::vector<double> currents(foreground.size());
  const std::int64_t n = static_cast<std::int64_t>(currents.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::int64_t k = 0; k < n; ++k) currents[k] = foreground.data[k] * cfg.c_p2c;
  return currents;
}

std::vector<std::uint32_t> snn_process_frame(SnnState& state, std::span<const double> currents,
                                             const HsmdConfig& cfg) {
  return process_frame_dense<false>(state, currents, cfg);
}

std::vector<std::uint32_t> snn_process_frame_serial(SnnState& state,
                                                    std::span<const double> currents,
                                                    const HsmdConfig& cfg) {
  return process_frame_dense<true>(state, currents, cfg);
}

std::vector<std::uint32_t> snn_process_frame_sparse(SnnState& state,
                                                    std::span<const double> currents,
                                                    const HsmdConfig& cfg) {
  cfg.validate();
  check_currents(state, currents);
  const std::int64_t n = static_cast<std::int64_t>(state.size());
  const LifParams& p = state.l2.params();

  double* v2 = state.l2.v_data();
  double* r2 = state.l2.refractory_data();
  std::uint32_t* c2 = state.l2.count_data();
  double* v3 = state.l3.v_data();
  double* r3 = state.l3.refractory_data();
  std::uint32_t* c3 = state.l3.count_data();
  double* v4 = state.l4.v_data();
  double* r4 = state.l4.refractory_data();
  std::uint32_t* c4 = state.l4.count_data();

#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::int64_t k = 0; k < n; ++k) {
    if (!(currents[k] > 0.0)) {
      pin_pixel_to_rest(state, static_cast<size_t>(k));
      continue;
    }
    bool prev = state.l2_prev[k] != 0;
    for (int step = 0; step < cfg.steps_per_frame; ++step) {
      const bool s2 = lif_step_neuron(p, cfg.dt, currents[k], v2[k], r2[k]);
      c2[k] += s2 ? 1u : 0u;
      const bool s3 = lif_step_neuron(p, cfg.dt, cfg.w_l2_l3 * (prev ? 1.0 : 0.0), v3[k], r3[k]);
      c3[k] += s3 ? 1u : 0u;
      const bool s4 = lif_step_neuron(
          p, cfg.dt, cfg.w_l2_l4 * (s2 ? 1.0 : 0.0) + cfg.w_l3_l4 * (s3 ? 1.0 : 0.0), v4[k], r4[k]);
      c4[k] += s4 ? 1u : 0u;
      prev = s2;
    }
    state.l2_prev[k] = prev ? 1 : 0;
  }
  return state.l4.take_spike_counts();
}

MotionMask postprocess(const std::vector<std::uint32_t>& spike_sums, int width, int height,
                       const HsmdConfig& cfg) {
  cfg.validate();
  if (spike_sums.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("postprocess: spike_sums size mismatch");
  MotionMask m;
  m.width = width;
  m.height = height;
  m.spike_sums = spike_sums;

  GrayFrame sums(width, height);
  for (size_t k = 0; k < spike_sums.size(); ++k) sums.data[k] = spike_sums[k];
  GrayFrame filtered = box_filter(sums, cfg.filter_u, cfg.filter_v);

  const double divisor = cfg.max_count_per_frame();
  m.normalized.resize(spike_sums.size());
  m.binary.resize(spike_sums.size());
  for (size_t k = 0; k < spike_sums.size(); ++k) {
    const double v = std::clamp(filtered.data[k] / divisor, 0.0, 1.0);
    m.normalized[k] = v;
    m.binary[k] = v >= cfg.mask_threshold ? 1 : 0;
  }
  return m;
}

HsmdPipeline::HsmdPipeline(const HsmdConfig& cfg, const BsBackendState& backend)
    : cfg_(cfg), backend_(backend) {
  cfg_.validate();
  backend_.validate();
}

MotionMask HsmdPipeline::process(const RawFrame& frame, StageTimings* timings) {
  const auto t0 = Clock::now();
  GrayFrame gray = to_grayscale(frame);
  StageTimings local;
  local.grayscale_ms = ms_since(t0);
  MotionMask mask = process_gray(gray, &local);
  if (timings) *timings = local;
  return mask;
}

MotionMask HsmdPipeline::process_gray(const GrayFrame& gray, StageTimings* timings) {
  if (!initialised_) {
    snn_ = SnnState(gray.width, gray.height, cfg_.lif);
    initialised_ = true;
  } else if (snn_.width != gray.width || snn_.height != gray.height) {
    throw std::invalid_argument("HsmdPipeline: frame dimensions changed mid-sequence");
  }

  StageTimings local = timings ? *timings : StageTimings{};
  auto t = Clock::now();
  GrayFrame fg = bs_apply(backend_, gray);
  local.bs_ms = ms_since(t);

  t = Clock::now();
  std::vector<double> currents = encode_currents(fg, cfg_);
  local.encode_ms = ms_since(t);

  t = Clock::now();
  std::vector<std::uint32_t> sums = cfg_.mode == ComputeMode::kSparse
                                        ? snn_process_frame_sparse(snn_, currents, cfg_)
                                        : snn_process_frame(snn_, currents, cfg_);
  local.snn_ms = ms_since(t);

  t = Clock::now();
  MotionMask mask = postprocess(sums, gray.width, gray.height, cfg_);
  local.post_ms = ms_since(t);

  if (timings) *timings = local;
  return mask;
}

void pipeline_run(const std::vector<std::string>& frame_paths, const HsmdConfig& cfg,
                  const BsBackendState& backend,
                  const std::function<void(size_t, const MotionMask&, const StageTimings&)>& sink) {
  if (frame_paths.empty()) throw std::invalid_argument("pipeline_run: no frames");
  HsmdPipeline pipeline(cfg, backend);
  for (size_t i = 0; i < frame_paths.size(); ++i) {
    RawFrame frame;
    try {
      frame = load_image(frame_paths[i]);
    } catch (const IoError& e) {
      throw IoError("frame " + std::to_string(i) + ": " + e.what());
    }
    StageTimings timings;
    MotionMask mask = pipeline.process(frame, &timings);
    sink(i, mask, timings);
  }
}

}  // namespace smd
