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

#ifndef SMD_CONFIG_HPP_
#define SMD_CONFIG_HPP_

#include <map>
#include <string>

#include "smd/bs.hpp"
#include "smd/hsmd.hpp"
#include "smd/mhsnn.hpp"

namespace smd {

/// Tool-wide configuration backed by a flat key=value file. Unknown keys
/// are rejected; every value is validated against the module invariants at
/// load. The CLI applies flag overrides on top.
struct ToolConfig {
  HsmdConfig hsmd;            // includes the shared LIF parameters
  BsBackendState backend;     // kind + backend parameters
  MhsnnParams mhsnn;          // includes ResumeParams
  double whiten_epsilon = 1e-5;
  int jobs = 1;

  void validate() const;
};

/// Parses a key=value file ('#' comments, blank lines allowed). Absent keys
/// keep their documented defaults. Throws std::invalid_argument naming the
/// offending key on unknown keys or invariant violations.
ToolConfig parse_config(const std::string& path);

/// Same parser over explicit pairs; used for flag overrides.
void apply_config_pairs(ToolConfig& cfg, const std::map<std::string, std::string>& pairs);

ToolConfig default_config();

}  // namespace smd

#endif  // SMD_CONFIG_HPP_
