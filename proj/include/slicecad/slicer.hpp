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

#include <span>
#include <vector>

#include "slicecad/geometry.hpp"

namespace slicecad {

struct Segment3 {
  Point3 a;
  Point3 b;
};

/// Closed loops repeat no point: the last point connects back to the first.
struct Loop3D {
  std::vector<Point3> points;
  bool is_closed = true;
};

enum class Orientation { Ccw, Cw };

struct LoopSource {
  Axis axis = Axis::Z;
  int index = 0;
  int ordinal = 0;
};

struct Loop2D {
  std::vector<Vec2> points;
  Orientation orientation = Orientation::Ccw;
  LoopSource source;
};

/// Slice-level 2D normalization: u = s * (p - t).
struct Norm2D {
  double t_x = 0.0;
  double t_y = 0.0;
  double s = 1.0;

  Vec2 apply(Vec2 p) const { return {s * (p.x - t_x), s * (p.y - t_y)}; }
  Vec2 invert(Vec2 u) const { return {u.x / s + t_x, u.y / s + t_y}; }
  bool operator==(const Norm2D&) const = default;
};

struct SliceRecord {
  Plane plane;
  Axis axis = Axis::Z;
  int index = 0;
  std::vector<Loop3D> loops;        // closed loops only
  std::vector<Loop3D> open_chains;  // scan artifacts, reported but unused
  Norm2D norm;
};

struct StitchResult {
  std::vector<Loop3D> closed;
  std::vector<std::vector<Point3>> open;
};

struct SliceConfig {
  int n_per_axis = 40;
  double stitch_tol = 1e-5;
  double collinear_deg = 0.5;
};

/// Candidate planes, `n_per_axis` per axis at cell centres of the bounding box,
/// ordered x planes first, then y, then z.
std::vector<Plane> sample_planes(const Mesh& mesh, int n_per_axis);

/// One segment per triangle crossing the plane. Vertices exactly on the plane
/// count as positive. Segments are oriented so closed outer loops run
/// counter-clockwise seen from the +normal side.
std::vector<Segment3> slice_mesh(const Mesh& mesh, const Plane& plane);

/// Chains segments whose endpoints match within `tol`. Output is independent
/// of input order.
StitchResult stitch_loops(std::span<const Segment3> segments, double tol, double collinear_deg = 0.5);

struct Projection {
  std::vector<Loop2D> loops;
  Norm2D norm;
};

/// Projects loops on an axis-aligned plane into its 2D frame and fits their
/// joint bounding box into the unit square with a 5% margin.
Projection project_and_normalize(std::span<const Loop3D> loops, const Plane& plane, LoopSource source = {});

/// Slices, stitches and projects every candidate plane.
std::vector<SliceRecord> slice_all(const Mesh& mesh, const SliceConfig& cfg = {});

/// Single record for an arbitrary offset along `axis`.
SliceRecord slice_at(const Mesh& mesh, Axis axis, double offset, int index, const SliceConfig& cfg = {});

/// Plane-local 2D coordinates of a loop (not normalized).
std::vector<Vec2> to_plane_2d(const Loop3D& loop, Axis axis);

}  // namespace slicecad
