// Copyright 2026 The slicecad Authors.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "slicecad/constraints.hpp"
#include "slicecad/extrude.hpp"
#include "slicecad/plane_detect.hpp"
#include "slicecad/sketch_fit.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

/// Every tunable of the reconstruction pipeline and the evaluation harness.
///
/// Text form is one `key = value` per line; `#` starts a comment. The key set
/// is listed by `config_keys()` and documented in the README.
struct PipelineConfig {
  SliceConfig slice;
  DetectConfig detect;
  FitConfig fit;
  ToleranceSet tol;
  SolveOptions solve;
  OptConfig opt;
  int image_size = 128;
  int voxel_res = 64;
  int eval_points = 8192;
  int edge_points = 4096;
  std::uint64_t seed = 0;
  bool constraints = true;
  bool single_axis = true;
};

const std::vector<std::string>& config_keys();

/// Throws InvalidArgument for an unknown key or a malformed value.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value);

PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

/// Canonical text form; keys in `config_keys()` order.
std::string describe(const PipelineConfig& cfg);

/// Hex digest of `describe(cfg)`.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace slicecad
