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

#include "smd/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "smd/image_io.hpp"

namespace smd {
namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': not a number: " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': not an integer: " + value);
  }
}

using Setter = std::function<void(ToolConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> kSetters = {
      // pipeline
      {"c_p2c", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.c_p2c = parse_double(k, v); }},
      {"w_l2_l3", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.w_l2_l3 = parse_double(k, v); }},
      {"w_l2_l4", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.w_l2_l4 = parse_double(k, v); }},
      {"w_l3_l4", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.w_l3_l4 = parse_double(k, v); }},
      {"steps_per_frame",
       [](ToolConfig& c, auto& k, auto& v) { c.hsmd.steps_per_frame = parse_int(k, v); }},
      {"dt", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.dt = parse_double(k, v); }},
      {"mask_threshold",
       [](ToolConfig& c, auto& k, auto& v) { c.hsmd.mask_threshold = parse_double(k, v); }},
      {"filter_u", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.filter_u = parse_int(k, v); }},
      {"filter_v", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.filter_v = parse_int(k, v); }},
      {"mode",
       [](ToolConfig& c, auto& k, auto& v) {
         if (v == "dense") c.hsmd.mode = ComputeMode::kDense;
         else if (v == "sparse") c.hsmd.mode = ComputeMode::kSparse;
         else throw std::invalid_argument("config key '" + k + "': expected dense|sparse");
       }},
      // LIF (shared by the pipeline layers)
      {"lif_c_m", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.c_m = parse_double(k, v); }},
      {"lif_r_m", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.r_m = parse_double(k, v); }},
      {"lif_e_l", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.e_l = parse_double(k, v); }},
      {"lif_v_reset",
       [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.v_reset = parse_double(k, v); }},
      {"lif_v_min",
       [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.v_min = parse_double(k, v); }},
      {"lif_v_th", [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.v_th = parse_double(k, v); }},
      {"lif_tau_m",
       [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.tau_m = parse_double(k, v); }},
      {"lif_t_ref",
       [](ToolConfig& c, auto& k, auto& v) { c.hsmd.lif.t_ref = parse_double(k, v); }},
      // background subtraction
      {"backend",
       [](ToolConfig& c, auto& k, auto& v) {
         if (v == "diff") c.backend.kind = BsKind::kFrameDiff;
         else if (v == "gauss") c.backend.kind = BsKind::kRunningGaussian;
         else throw std::invalid_argument("config key '" + k + "': expected diff|gauss");
       }},
      {"bs_alpha", [](ToolConfig& c, auto& k, auto& v) { c.backend.alpha = parse_double(k, v); }},
      {"bs_diff_threshold",
       [](ToolConfig& c, auto& k, auto& v) { c.backend.diff_threshold = parse_double(k, v); }},
      {"bs_k_sigma",
       [](ToolConfig& c, auto& k, auto& v) { c.backend.k_sigma = parse_double(k, v); }},
      // direction-sensitive network
      {"mhsnn_length", [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.length = parse_int(k, v); }},
      {"mhsnn_width", [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.width = parse_int(k, v); }},
      {"mhsnn_input_threshold",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.input_threshold = parse_double(k, v); }},
      {"mhsnn_edge_gain",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.edge_gain = parse_double(k, v); }},
      {"mhsnn_dir_gain",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.dir_gain = parse_double(k, v); }},
      {"mhsnn_l3_gain",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.l3_gain = parse_double(k, v); }},
      {"mhsnn_v_th_l4",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.lif_output.v_th = parse_double(k, v); }},
      {"mhsnn_dog_sigma",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.dog_sigma_center = parse_double(k, v); }},
      {"mhsnn_dog_ratio",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.dog_ratio = parse_double(k, v); }},
      {"mhsnn_iterations",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.train_iterations = parse_int(k, v); }},
      // remote-supervision learning
      {"resume_a_d", [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.resume.a_d = parse_double(k, v); }},
      {"resume_a_l", [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.resume.a_l = parse_double(k, v); }},
      {"resume_tau_d",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.resume.tau_d = parse_double(k, v); }},
      {"resume_tau_l",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.resume.tau_l = parse_double(k, v); }},
      {"resume_a_bias",
       [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.resume.a_bias = parse_double(k, v); }},
      {"resume_lr", [](ToolConfig& c, auto& k, auto& v) { c.mhsnn.resume.lr = parse_double(k, v); }},
      // misc
      {"whiten_epsilon",
       [](ToolConfig& c, auto& k, auto& v) {
         c.whiten_epsilon = parse_double(k, v);
         if (!(c.whiten_epsilon > 0))
           throw std::invalid_argument("config key '" + k + "': must be positive");
       }},
      {"jobs",
       [](ToolConfig& c, auto& k, auto& v) {
         c.jobs = parse_int(k, v);
         if (c.jobs < 1) throw std::invalid_argument("config key '" + k + "': must be >= 1");
       }},
  };
  return kSetters;
}

}  // namespace

void ToolConfig::validate() const {
  try {
    hsmd.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config (pipeline): ") + e.what());
  }
  try {
    backend.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config (backend): ") + e.what());
  }
  try {
    mhsnn.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config (mhsnn): ") + e.what());
  }
  if (!(whiten_epsilon > 0))
    throw std::invalid_argument("config key 'whiten_epsilon': must be positive");
  if (jobs < 1) throw std::invalid_argument("config key 'jobs': must be >= 1");
}

ToolConfig default_config() { return ToolConfig{}; }

void apply_config_pairs(ToolConfig& cfg, const std::map<std::string, std::string>& pairs) {
  const auto& table = setters();
  for (const auto& [key, value] : pairs) {
    auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    it->second(cfg, key, value);
  }
  cfg.validate();
}

ToolConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file: " + path);
  ToolConfig cfg;
  const auto& table = setters();
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r\n");
    line = line.substr(first, last - first + 1);
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kl = key.find_last_not_of(" \t");
    key = key.substr(0, kl == std::string::npos ? 0 : kl + 1);
    const auto vf = value.find_first_not_of(" \t");
    value = vf == std::string::npos ? "" : value.substr(vf);
    auto it = table.find(key);
    if (it == table.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

}  // namespace smd
