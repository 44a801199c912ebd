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

#include <optional>
#include <string_view>
#include <vector>

#include "slicecad/geometry.hpp"

namespace slicecad {

enum class PrimitiveKind { Line, Circle, Arc };

/// A sketch curve in the unit-box sketch frame (y up).
///   Line:   a = start, b = end
///   Arc:    a = start, b = a point on the arc between the ends, c = end
///   Circle: a = center, r = radius
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Line;
  Vec2 a, b, c;
  double r = 0.0;

  static Primitive line(Vec2 start, Vec2 end) { return {PrimitiveKind::Line, start, end, {}, 0.0}; }
  static Primitive arc(Vec2 start, Vec2 mid, Vec2 end) { return {PrimitiveKind::Arc, start, mid, end, 0.0}; }
  static Primitive circle(Vec2 center, double radius) { return {PrimitiveKind::Circle, center, {}, {}, radius}; }

  bool is_curve() const { return kind != PrimitiveKind::Line; }
  Vec2 start() const;
  Vec2 end() const;
  Vec2 mid() const;     // line midpoint, arc middle point, circle center
  Vec2 center() const;  // arc circumcenter, circle center
  double radius() const;
  double length() const;  // line length
  bool operator==(const Primitive&) const = default;
};

enum class Anchor { Start, Mid, End, Center, Whole };

enum class ConstraintKind {
  Coincident,
  Concentric,
  Equal,
  Horizontal,
  Vertical,
  Parallel,
  Perpendicular,
  Tangent,
  Midpoint,
  // Parsed for forward compatibility, rejected by the solver.
  Fix,
  Offset,
  Normal,
  Quadrant,
};

struct ConstraintRef {
  int prim = 0;
  Anchor anchor = Anchor::Whole;
  bool operator==(const ConstraintRef&) const = default;
};

struct Constraint {
  ConstraintKind kind = ConstraintKind::Coincident;
  std::vector<ConstraintRef> refs;
  bool operator==(const Constraint&) const = default;
};

struct ConstrainedSketch {
  std::vector<Primitive> primitives;
  std::vector<Constraint> constraints;
  bool operator==(const ConstrainedSketch&) const = default;
};

std::string_view to_string(PrimitiveKind k);
std::string_view to_string(Anchor a);
std::string_view to_string(ConstraintKind k);
PrimitiveKind primitive_kind_from_string(std::string_view s);
Anchor anchor_from_string(std::string_view s);
ConstraintKind constraint_kind_from_string(std::string_view s);

bool is_unary(ConstraintKind k);
bool is_supported(ConstraintKind k);

/// Position of a point-like anchor on a primitive (Whole has no position).
std::optional<Vec2> anchor_point(const Primitive& p, Anchor a);

/// Circle through three points; nullopt when they are (nearly) collinear.
struct Circle2 {
  Vec2 center;
  double radius = 0.0;
};
std::optional<Circle2> circumcircle(Vec2 a, Vec2 b, Vec2 c);

/// Arc sweep helpers: start angle and signed sweep (positive = ccw) that runs
/// from start through mid to end.
struct ArcSweep {
  Vec2 center;
  double radius = 0.0;
  double start_angle = 0.0;
  double sweep = 0.0;
};
std::optional<ArcSweep> arc_sweep(const Primitive& arc);

/// Exact distance from a point to a primitive curve.
double distance_to_primitive(Vec2 q, const Primitive& p);

}  // namespace slicecad
