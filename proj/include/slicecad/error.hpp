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

#include <stdexcept>
#include <string>
#include <string_view>

namespace slicecad {

enum class ErrorCode {
  ParseError,
  EmptyMesh,
  DegenerateSlice,
  ZeroExtent,
  NoSameAxisCandidate,
  LengthMismatch,
  EmptyForeground,
  DimensionMismatch,
  OpenChain,
  NonConvergence,
  InconsistentPins,
  UnsupportedConstraint,
  CrossingLoops,
  NoSpecs,
  NoSamples,
  IndexMismatch,
  NoSteps,
  TriangulationFailure,
  SchemaError,
  NoEdges,
  EmptyOccupancy,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this exception. `module()` names
/// the component that raised it so front ends can print qualified messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + std::string(to_string(code)) + ": " + message),
        code_(code),
        module_(std::move(module)),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string module_;
  std::string message_;
};

}  // namespace slicecad
