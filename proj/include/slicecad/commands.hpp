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

#include <filesystem>
#include <optional>
#include <string>

#include "slicecad/config.hpp"

namespace slicecad {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitInvalid = 2 };

struct GlobalOptions {
  PipelineConfig config;
  int jobs = 1;
  bool verbose = false;
};

struct GenArgs {
  int count = 200;
  int max_prims = 8;
  double arc_weight = 0.3;
  double height = 0.3;
  bool displace = false;
  double displacement_norm = 0.05;
  std::filesystem::path out;
};

/// Maps an error to its process exit code: malformed input is 1, anything
/// that prevents a valid reconstruction is 2.
int exit_code_for(const std::exception& e);

int cmd_gen(const GenArgs& args, const GlobalOptions& g);
int cmd_slice(const std::filesystem::path& mesh, const std::filesystem::path& out, const GlobalOptions& g);
int cmd_detect(const std::filesystem::path& mesh, const std::optional<std::filesystem::path>& gt,
               const std::filesystem::path& out, const GlobalOptions& g);
int cmd_fit(const std::filesystem::path& mesh, const std::filesystem::path& out, const GlobalOptions& g);
int cmd_optimize(const std::filesystem::path& mesh, const std::filesystem::path& out, const GlobalOptions& g);
int cmd_reconstruct(const std::filesystem::path& mesh, const std::filesystem::path& out, const GlobalOptions& g);
int cmd_eval(const std::filesystem::path& manifest, const std::filesystem::path& out, const GlobalOptions& g);
int cmd_displace(const std::filesystem::path& corpus, const std::filesystem::path& out, const GlobalOptions& g);

}  // namespace slicecad
