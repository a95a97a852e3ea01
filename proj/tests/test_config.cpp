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

#include <filesystem>
#include <fstream>

#include "smd/config.hpp"
#include "smd/image_io.hpp"

using namespace smd;
namespace fs = std::filesystem;

namespace {

std::string write_config(const std::string& text) {
  const fs::path p = fs::temp_directory_path() / "smd_config_test.cfg";
  std::ofstream f(p);
  f << text;
  return p.string();
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("empty file yields the documented defaults") {
  ToolConfig cfg = parse_config(write_config(""));
  CHECK(cfg.hsmd.c_p2c == 17.5);
  CHECK(cfg.hsmd.w_l2_l3 == 1370.0);
  CHECK(cfg.hsmd.w_l2_l4 == 1370.0);
  CHECK(cfg.hsmd.w_l3_l4 == 1370.0);
  CHECK(cfg.hsmd.steps_per_frame == 10);
  CHECK(cfg.hsmd.dt == 1.0);
  CHECK(cfg.hsmd.mask_threshold == 0.5);
  CHECK(cfg.hsmd.filter_u == 3);
  CHECK(cfg.hsmd.lif.e_l == -55.0);
  CHECK(cfg.hsmd.lif.v_th == -50.0);
  CHECK(cfg.hsmd.lif.v_reset == -70.0);
  CHECK(cfg.hsmd.lif.t_ref == 2.0);
  CHECK(cfg.hsmd.mode == ComputeMode::kDense);
  CHECK(cfg.backend.kind == BsKind::kRunningGaussian);
  CHECK(cfg.mhsnn.input_threshold == 0.85);
  CHECK(cfg.mhsnn.resume.tau_d == 20.0);
  CHECK(cfg.mhsnn.resume.a_d == 0.01);
  CHECK(cfg.mhsnn.train_iterations == 10000);
  CHECK(cfg.jobs == 1);
}

TEST_CASE("comments, blanks and overrides") {
  ToolConfig cfg = parse_config(write_config(
      "# pipeline tuning\n"
      "\n"
      "c_p2c = 17.5\n"
      "mask_threshold=0.25   # binarisation\n"
      "mode=sparse\n"
      "backend=diff\n"));
  CHECK(cfg.hsmd.c_p2c == 17.5);
  CHECK(cfg.hsmd.mask_threshold == 0.25);
  CHECK(cfg.hsmd.mode == ComputeMode::kSparse);
  CHECK(cfg.backend.kind == BsKind::kFrameDiff);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config(write_config("banana=1\n")),
                       doctest::Contains("banana"), std::invalid_argument);
}

TEST_CASE("invariant violations name the failing area") {
  CHECK_THROWS_AS(parse_config(write_config("steps_per_frame=0\n")), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config(write_config("steps_per_frame=0\n")),
                       doctest::Contains("steps_per_frame"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(write_config("bs_alpha=2.0\n")), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(write_config("lif_v_th=-70.0\nlif_v_reset=-70.0\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(write_config("mode=banana\n")), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(write_config("c_p2c=abc\n")), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(write_config("jobs=0\n")), std::invalid_argument);
}

TEST_CASE("flag-style overrides go through the same validation") {
  ToolConfig cfg = default_config();
  apply_config_pairs(cfg, {{"mask_threshold", "0.2"}, {"jobs", "4"}});
  CHECK(cfg.hsmd.mask_threshold == 0.2);
  CHECK(cfg.jobs == 4);
  CHECK_THROWS_AS(apply_config_pairs(cfg, {{"nope", "1"}}), std::invalid_argument);
}

TEST_CASE("missing config file is an I/O error") {
  CHECK_THROWS_AS(parse_config("/nonexistent/smd.cfg"), IoError);
}

TEST_SUITE_END();
