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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slicecad/cad_model.hpp"
#include "slicecad/geometry.hpp"

namespace slicecad {

using PointSet = std::vector<std::array<double, 3>>;

/// Centre each set on its bounding-box centre and scale its largest extent to 1.
PointSet normalize_unit(std::span<const Point3> pts);

/// Half-weighted bidirectional mean of squared nearest distances (k-d tree).
double chamfer_points(std::span<const std::array<double, 3>> a, std::span<const std::array<double, 3>> b);

/// Surface chamfer distance; each mesh is sampled with a seed mixed from its
/// content hash, so the value is symmetric and zero for identical meshes.
double chamfer_distance(const Mesh& a, const Mesh& b, std::size_t n = 8192, std::uint64_t seed = 0);

struct EdgeSet {
  std::vector<Segment3> segments;
  double length() const;
};

/// Base and cap profile curves of every step plus straight side edges at the
/// sketch corners.
EdgeSet model_edges(const CadModel& model, const TessellationOptions& opt = {});

std::vector<Point3> sample_edges(const EdgeSet& edges, std::size_t m, std::uint64_t seed);

double edge_chamfer_distance(const CadModel& a, const CadModel& b, std::size_t m = 4096, std::uint64_t seed = 0);

/// Voxel IoU in a shared grid spanning both models.
double iou(const CadModel& a, const CadModel& b, int res = 64, const TessellationOptions& opt = {});

/// A model is valid when it tessellates to a non-empty watertight mesh.
bool is_valid_model(const CadModel& model);

double invalidity(std::span<const std::optional<CadModel>> attempts);

struct EvalReport {
  double cd = 0.0;
  double ecd = 0.0;
  double iou = 0.0;
  bool valid = false;
};

std::uint64_t model_hash(const CadModel& model);

}  // namespace slicecad
