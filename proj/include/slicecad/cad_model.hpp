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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicecad/extrude.hpp"
#include "slicecad/serialize.hpp"
#include "slicecad/sketch.hpp"
#include "slicecad/sketch_fit.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

/// One sketch-extrude feature. The sketch lives in the unit box of its slice;
/// `norm` maps plane-local coordinates (the plane's two in-plane world axes in
/// cyclic order) into that box.
struct CadStep {
  ConstrainedSketch sketch;
  Plane plane;
  ExtrudeType type = ExtrudeType::New;
  Vec3 direction{0, 0, 1};
  double length = 0.0;  // 0 for cuts, which are unbounded along the direction
  Norm2D norm;
  int slice_index = 0;
  int loop_ordinal = 0;
  int parent = -1;  // step index of the enclosing loop on the same plane

  Axis axis() const;
  bool operator==(const CadStep&) const = default;
};

struct CadModel {
  std::vector<CadStep> steps;
  std::string source;
  std::string config_hash;
  bool operator==(const CadModel&) const = default;
};

/// Builds the ordered model from key slices and per-loop sketches and
/// extrusions. `to_original` undoes the mesh load normalization.
CadModel assemble(std::span<const SliceRecord> slices, const std::vector<std::vector<ConstrainedSketch>>& sketches,
                  const std::vector<std::vector<ExtrusionSpec>>& specs, const BBoxTransform* to_original = nullptr);

/// Profile loop of a step in plane-local coordinates.
std::vector<Vec2> step_profile(const CadStep& step, const TessellationOptions& opt = {});

/// World position of a plane-local point at height `h` along the step direction.
Point3 step_point(const CadStep& step, Vec2 plane_local, double h = 0.0);

Mesh tessellate(const CadModel& model, const TessellationOptions& opt = {});

struct VoxelGrid {
  int res = 0;  // per axis
  BoundingBox frame;
  std::vector<std::uint8_t> occ;  // x fastest, then y, then z

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * res + j) * res + i;
  }
  bool at(int i, int j, int k) const { return occ[index(i, j, k)] != 0; }
  std::size_t count() const;
  double voxel_volume() const;
  Point3 center(int i, int j, int k) const;
};

/// Axis-aligned bounds of all new-step prisms.
BoundingBox model_bounds(const CadModel& model, const TessellationOptions& opt = {});

/// Occupancy by parity ray casting of each prism along its direction; new
/// steps are unioned in order, cross-plane cuts subtract their unbounded prism.
VoxelGrid voxelize(const CadModel& model, int res = 64, const std::optional<BoundingBox>& frame = std::nullopt,
                   const TessellationOptions& opt = {});

Json model_to_json(const CadModel& model);
CadModel model_from_json(const Json& j);
void save_model(const CadModel& model, const std::filesystem::path& path);
CadModel load_model(const std::filesystem::path& path);

std::string_view to_string(ExtrudeType t);

}  // namespace slicecad
