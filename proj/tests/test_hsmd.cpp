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

#include <cmath>
#include <random>

#include "smd/hsmd.hpp"

using namespace smd;

namespace {

std::vector<double> random_currents(size_t n, double density, double max_current,
                                    std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n, 0.0);
  for (double& c : out)
    if (u(rng) < density) c = u(rng) * max_current;
  return out;
}

// Independent scalar oracle for one pixel chain, written against the layer
// semantics rather than the production kernel.
struct ScalarChainOracle {
  LifParams p;
  double v2, v3, v4, r2 = 0, r3 = 0, r4 = 0;
  bool prev_l2 = false;
  int l4_count = 0;

  explicit ScalarChainOracle(const LifParams& params) : p(params), v2(p.e_l), v3(p.e_l), v4(p.e_l) {}

  static bool neuron(const LifParams& p, double dt, double current, double& v, double& refr) {
    if (refr > 0) {
      refr = refr > dt ? refr - dt : 0.0;
      return false;
    }
    double u = v + (dt / p.tau_m) * ((p.e_l - v) + p.r_m * current);
    if (u < p.v_min) u = p.v_min;
    if (u >= p.v_th) {
      v = p.v_reset;
      refr = p.t_ref;
      return true;
    }
    v = u;
    return false;
  }

  void frame(double current, const HsmdConfig& cfg) {
    if (!(current > 0)) {
      v2 = v3 = v4 = p.e_l;
      r2 = r3 = r4 = 0;
      prev_l2 = false;
      return;
    }
    for (int s = 0; s < cfg.steps_per_frame; ++s) {
      const bool s2 = neuron(p, cfg.dt, current, v2, r2);
      const bool s3 = neuron(p, cfg.dt, cfg.w_l2_l3 * (prev_l2 ? 1.0 : 0.0), v3, r3);
      const bool s4 = neuron(
          p, cfg.dt, cfg.w_l2_l4 * (s2 ? 1.0 : 0.0) + cfg.w_l3_l4 * (s3 ? 1.0 : 0.0), v4, r4);
      if (s4) ++l4_count;
      prev_l2 = s2;
    }
  }
};

}  // namespace

TEST_SUITE_BEGIN("hsmd");

TEST_CASE("frame diff: identical frames give all zeros") {
  BsBackendState state;
  state.kind = BsKind::kFrameDiff;
  GrayFrame f(4, 4, 0.3);
  GrayFrame first = bs_frame_diff(state, f);
  for (double v : first.data) CHECK(v == 0.0);
  GrayFrame second = bs_frame_diff(state, f);
  for (double v : second.data) CHECK(v == 0.0);
}

TEST_CASE("frame diff: threshold keeps 0.3 and zeroes 0.05") {
  BsBackendState state;
  state.kind = BsKind::kFrameDiff;
  state.diff_threshold = 0.1;
  GrayFrame a(3, 3, 0.2);
  bs_frame_diff(state, a);
  GrayFrame b(3, 3, 0.2);
  b.at(0, 0) = 0.5;   // delta 0.3
  b.at(1, 1) = 0.25;  // delta 0.05
  GrayFrame out = bs_frame_diff(state, b);
  CHECK(out.at(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(out.at(1, 1) == 0.0);
  CHECK(out.at(2, 2) == 0.0);
}

TEST_CASE("frame diff: dimension change mid-sequence is rejected") {
  BsBackendState state;
  state.kind = BsKind::kFrameDiff;
  bs_frame_diff(state, GrayFrame(4, 4, 0.1));
  CHECK_THROWS_AS(bs_frame_diff(state, GrayFrame(5, 4, 0.1)), std::invalid_argument);
}

TEST_CASE("running gaussian: constant scene is empty after burn-in") {
  BsBackendState state;
  GrayFrame f(4, 4, 0.5);
  GrayFrame out;
  for (int t = 0; t < 220; ++t) out = bs_running_gaussian(state, f);
  for (double v : out.data) CHECK(v == 0.0);

  // An abrupt 0.5 -> 1.0 pixel after burn-in becomes foreground.
  GrayFrame changed = f;
  changed.at(2, 2) = 1.0;
  out = bs_running_gaussian(state, changed);
  CHECK(out.at(2, 2) == 1.0);
  CHECK(out.at(0, 0) == 0.0);
}

TEST_CASE("running gaussian: alpha=1 behaves like frame diff against the last frame") {
  BsBackendState state;
  state.alpha = 1.0;
  GrayFrame a(3, 3, 0.2);
  bs_running_gaussian(state, a);
  GrayFrame b(3, 3, 0.2);
  b.at(1, 1) = 0.9;
  GrayFrame out = bs_running_gaussian(state, b);
  CHECK(out.at(1, 1) == 0.9);  // deviation against mean == previous frame
  CHECK(out.at(0, 0) == 0.0);
  // And the next identical frame is empty again.
  GrayFrame out2 = bs_running_gaussian(state, b);
  for (double v : out2.data) CHECK(v == 0.0);
}

TEST_CASE("encode_currents: i = I * c") {
  HsmdConfig cfg;
  GrayFrame f(3, 3, 0.0);
  f.at(0, 0) = 1.0;
  f.at(0, 1) = 0.4;
  auto currents = encode_currents(f, cfg);
  CHECK(currents[0] == doctest::Approx(17.5).epsilon(1e-12));
  CHECK(currents[1] == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(currents[2] == 0.0);
}

TEST_CASE("snn: all-zero currents give all-zero spike sums") {
  HsmdConfig cfg;
  SnnState state(6, 5, cfg.lif);
  std::vector<double> zeros(state.size(), 0.0);
  for (int f = 0; f < 3; ++f) {
    auto sums = snn_process_frame(state, zeros, cfg);
    for (auto s : sums) CHECK(s == 0);
  }
}

TEST_CASE("snn: zero-input pixels stay silent across a driven run") {
  HsmdConfig cfg;
  SnnState state(8, 8, cfg.lif);
  std::mt19937 rng(5);
  for (int f = 0; f < 20; ++f) {
    auto currents = random_currents(state.size(), 0.5, 17.5, rng);
    currents[10] = 0.0;  // pixel 10 never driven
    snn_process_frame(state, currents, cfg);
  }
  CHECK(state.l2.spike_counts()[10] == 0);
  CHECK(state.l3.spike_counts()[10] == 0);
  auto l4 = state.l4.take_spike_counts();
  CHECK(l4[10] == 0);
}

TEST_CASE("snn: dense and sparse modes are bit-identical on random frames") {
  HsmdConfig cfg;
  SnnState dense(16, 12, cfg.lif);
  SnnState sparse(16, 12, cfg.lif);
  std::mt19937 rng(77);
  const double densities[] = {0.0, 0.01, 0.3, 0.7, 1.0};
  for (int f = 0; f < 50; ++f) {
    auto currents = random_currents(dense.size(), densities[f % 5], 17.5, rng);
    auto a = snn_process_frame(dense, currents, cfg);
    auto b = snn_process_frame_sparse(sparse, currents, cfg);
    CHECK(a == b);
  }
  // Full internal state must agree as well.
  CHECK(std::equal(dense.l2.potentials().begin(), dense.l2.potentials().end(),
                   sparse.l2.potentials().begin()));
  CHECK(std::equal(dense.l3.potentials().begin(), dense.l3.potentials().end(),
                   sparse.l3.potentials().begin()));
  CHECK(std::equal(dense.l4.potentials().begin(), dense.l4.potentials().end(),
                   sparse.l4.potentials().begin()));
  CHECK(dense.l2_prev == sparse.l2_prev);
}

TEST_CASE("snn: parallel dense kernel matches the serial reference") {
  HsmdConfig cfg;
  SnnState parallel(80, 70, cfg.lif);  // above the parallel threshold
  SnnState serial(80, 70, cfg.lif);
  std::mt19937 rng(99);
  for (int f = 0; f < 10; ++f) {
    auto currents = random_currents(parallel.size(), 0.4, 17.5, rng);
    auto a = snn_process_frame(parallel, currents, cfg);
    auto b = snn_process_frame_serial(serial, currents, cfg);
    CHECK(a == b);
  }
  CHECK(std::equal(parallel.l4.potentials().begin(), parallel.l4.potentials().end(),
                   serial.l4.potentials().begin()));
}

TEST_CASE("snn: one hot pixel matches the scalar chain oracle") {
  HsmdConfig cfg;
  SnnState state(5, 5, cfg.lif);
  ScalarChainOracle oracle(cfg.lif);
  std::vector<double> currents(state.size(), 0.0);
  const size_t hot = 12;
  currents[hot] = 17.5;  // full-intensity pixel at default gain

  std::uint32_t total = 0;
  for (int f = 0; f < 1; ++f) {
    auto sums = snn_process_frame(state, currents, cfg);
    total += sums[hot];
    oracle.frame(17.5, cfg);
  }
  CHECK(total == static_cast<std::uint32_t>(oracle.l4_count));
  CHECK(total >= 1);
  const auto cap = static_cast<std::uint32_t>(
      std::ceil(cfg.steps_per_frame / (1.0 + cfg.lif.t_ref / cfg.dt)));
  CHECK(total <= cap);
}

TEST_CASE("snn: multi-frame run agrees with the oracle on a mixed schedule") {
  HsmdConfig cfg;
  SnnState state(4, 4, cfg.lif);
  ScalarChainOracle oracle(cfg.lif);
  std::vector<double> currents(state.size(), 0.0);
  const size_t hot = 5;
  const double schedule[] = {17.5, 17.5, 0.0, 9.0, 17.5, 0.0, 0.0, 17.5};
  std::uint32_t total = 0;
  for (double c : schedule) {
    currents[hot] = c;
    total += snn_process_frame(state, currents, cfg)[hot];
    oracle.frame(c, cfg);
  }
  CHECK(total == static_cast<std::uint32_t>(oracle.l4_count));
}

TEST_CASE("snn: raising one pixel's drive never lowers its L2 count for the frame") {
  HsmdConfig cfg;
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(0.0, 17.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double lo = u(rng);
    const double hi = lo + u(rng) / 4.0;
    SnnState a(3, 3, cfg.lif), b(3, 3, cfg.lif);
    std::vector<double> ca(9, 0.0), cb(9, 0.0);
    ca[4] = lo;
    cb[4] = hi;
    snn_process_frame(a, ca, cfg);
    snn_process_frame(b, cb, cfg);
    CHECK(b.l2.spike_counts()[4] >= a.l2.spike_counts()[4]);
  }
}

TEST_CASE("snn: pixel histories are local, permuting them permutes outputs") {
  HsmdConfig cfg;
  SnnState a(4, 3, cfg.lif), b(4, 3, cfg.lif);
  std::mt19937 rng(31);
  const size_t p = 2, q = 9;
  std::vector<std::uint32_t> sa, sb;
  for (int f = 0; f < 12; ++f) {
    auto currents = random_currents(a.size(), 0.6, 17.5, rng);
    auto swapped = currents;
    std::swap(swapped[p], swapped[q]);
    sa = snn_process_frame(a, currents, cfg);
    sb = snn_process_frame(b, swapped, cfg);
    CHECK(sa[p] == sb[q]);
    CHECK(sa[q] == sb[p]);
    for (size_t k = 0; k < sa.size(); ++k)
      if (k != p && k != q) CHECK(sa[k] == sb[k]);
  }
}

TEST_CASE("postprocess: zero sums give an empty mask") {
  HsmdConfig cfg;
  std::vector<std::uint32_t> sums(25, 0);
  MotionMask m = postprocess(sums, 5, 5, cfg);
  for (double v : m.normalized) CHECK(v == 0.0);
  for (auto b : m.binary) CHECK(b == 0);
}

TEST_CASE("postprocess: uniform maximum sums normalize to 1 everywhere") {
  HsmdConfig cfg;
  const auto cap = static_cast<std::uint32_t>(cfg.max_count_per_frame());
  CHECK(cap == 4);  // ceil(10 / (1 + 2/1))
  std::vector<std::uint32_t> sums(25, cap);
  MotionMask m = postprocess(sums, 5, 5, cfg);
  // Zero padding erodes the border; the interior must saturate.
  CHECK(m.normalized[12] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.binary[12] == 1);
}

TEST_CASE("postprocess: single max-count pixel filtered at 3x3 stays below 0.5") {
  HsmdConfig cfg;
  std::vector<std::uint32_t> sums(25, 0);
  sums[12] = static_cast<std::uint32_t>(cfg.max_count_per_frame());
  MotionMask m = postprocess(sums, 5, 5, cfg);
  CHECK(m.normalized[12] == doctest::Approx(1.0 / 9).epsilon(1e-12));
  for (auto b : m.binary) CHECK(b == 0);  // 1/9 < 0.5
}

TEST_CASE("pipeline_run: empty input list is rejected") {
  HsmdConfig cfg;
  BsBackendState backend;
  CHECK_THROWS_WITH_AS(pipeline_run({}, cfg, backend, [](size_t, const MotionMask&,
                                                         const StageTimings&) {}),
                       "pipeline_run: no frames", std::invalid_argument);
}

TEST_CASE("pipeline: identical input and config reproduce identical masks") {
  HsmdConfig cfg;
  cfg.mask_threshold = 0.1;
  BsBackendState backend;
  backend.kind = BsKind::kFrameDiff;

  auto run = [&]() {
    HsmdPipeline pipe(cfg, backend);
    std::vector<std::vector<std::uint8_t>> masks;
    for (int t = 0; t < 8; ++t) {
      GrayFrame f(12, 10, 0.1);
      for (int i = 2; i < 6; ++i)
        for (int j = 2 + t; j < 5 + t; ++j) f.at(i, j) = 1.0;
      masks.push_back(pipe.process_gray(f).binary);
    }
    return masks;
  };
  CHECK(run() == run());
}

TEST_CASE("pipeline: dimension change mid-sequence is rejected") {
  HsmdPipeline pipe(HsmdConfig{}, BsBackendState{});
  pipe.process_gray(GrayFrame(8, 8, 0.2));
  CHECK_THROWS_AS(pipe.process_gray(GrayFrame(9, 8, 0.2)), std::invalid_argument);
}

TEST_CASE("config validation rejects bad values") {
  HsmdConfig cfg;
  cfg.steps_per_frame = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = HsmdConfig{};
  cfg.w_l2_l3 = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = HsmdConfig{};
  cfg.filter_u = 2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = HsmdConfig{};
  cfg.mask_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
