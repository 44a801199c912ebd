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

#include "slicecad/sketch.hpp"

#include <fmt/format.h>

#include <numbers>

#include "slicecad/error.hpp"

namespace slicecad {

Vec2 Primitive::start() const { return kind == PrimitiveKind::Circle ? a + Vec2{r, 0} : a; }
Vec2 Primitive::end() const {
  switch (kind) {
    case PrimitiveKind::Line: return b;
    case PrimitiveKind::Arc: return c;
    case PrimitiveKind::Circle: return a + Vec2{r, 0};
  }
  return a;
}
Vec2 Primitive::mid() const {
  switch (kind) {
    case PrimitiveKind::Line: return (a + b) * 0.5;
    case PrimitiveKind::Arc: return b;
    case PrimitiveKind::Circle: return a;
  }
  return a;
}
Vec2 Primitive::center() const {
  if (kind == PrimitiveKind::Circle) return a;
  if (kind == PrimitiveKind::Arc) {
    if (auto cc = circumcircle(a, b, c)) return cc->center;
  }
  return mid();
}
double Primitive::radius() const {
  if (kind == PrimitiveKind::Circle) return r;
  if (kind == PrimitiveKind::Arc) {
    if (auto cc = circumcircle(a, b, c)) return cc->radius;
  }
  return 0.0;
}
double Primitive::length() const { return kind == PrimitiveKind::Line ? norm(b - a) : 0.0; }

std::string_view to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Line: return "line";
    case PrimitiveKind::Circle: return "circle";
    case PrimitiveKind::Arc: return "arc";
  }
  return "?";
}

std::string_view to_string(Anchor a) {
  switch (a) {
    case Anchor::Start: return "start";
    case Anchor::Mid: return "mid";
    case Anchor::End: return "end";
    case Anchor::Center: return "center";
    case Anchor::Whole: return "whole";
  }
  return "?";
}

namespace {
constexpr std::pair<ConstraintKind, std::string_view> kConstraintNames[] = {
    {ConstraintKind::Coincident, "coincident"},   {ConstraintKind::Concentric, "concentric"},
    {ConstraintKind::Equal, "equal"},             {ConstraintKind::Horizontal, "horizontal"},
    {ConstraintKind::Vertical, "vertical"},       {ConstraintKind::Parallel, "parallel"},
    {ConstraintKind::Perpendicular, "perpendicular"}, {ConstraintKind::Tangent, "tangent"},
    {ConstraintKind::Midpoint, "midpoint"},       {ConstraintKind::Fix, "fix"},
    {ConstraintKind::Offset, "offset"},           {ConstraintKind::Normal, "normal"},
    {ConstraintKind::Quadrant, "quadrant"},
};
}  // namespace

std::string_view to_string(ConstraintKind k) {
  for (const auto& [kind, name] : kConstraintNames)
    if (kind == k) return name;
  return "?";
}

PrimitiveKind primitive_kind_from_string(std::string_view s) {
  if (s == "line") return PrimitiveKind::Line;
  if (s == "circle") return PrimitiveKind::Circle;
  if (s == "arc") return PrimitiveKind::Arc;
  throw Error(ErrorCode::SchemaError, "sketch", fmt::format("unknown primitive kind '{}'", s));
}

Anchor anchor_from_string(std::string_view s) {
  for (auto a : {Anchor::Start, Anchor::Mid, Anchor::End, Anchor::Center, Anchor::Whole})
    if (to_string(a) == s) return a;
  throw Error(ErrorCode::SchemaError, "sketch", fmt::format("unknown anchor '{}'", s));
}

ConstraintKind constraint_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kConstraintNames)
    if (name == s) return kind;
  throw Error(ErrorCode::SchemaError, "sketch", fmt::format("unknown constraint kind '{}'", s));
}

bool is_unary(ConstraintKind k) {
  return k == ConstraintKind::Horizontal || k == ConstraintKind::Vertical || k == ConstraintKind::Fix;
}

bool is_supported(ConstraintKind k) {
  return k != ConstraintKind::Fix && k != ConstraintKind::Offset && k != ConstraintKind::Normal &&
         k != ConstraintKind::Quadrant;
}

std::optional<Vec2> anchor_point(const Primitive& p, Anchor a) {
  switch (a) {
    case Anchor::Start: return p.kind == PrimitiveKind::Circle ? std::nullopt : std::optional(p.start());
    case Anchor::End: return p.kind == PrimitiveKind::Circle ? std::nullopt : std::optional(p.end());
    case Anchor::Mid: return p.mid();
    case Anchor::Center: return p.kind == PrimitiveKind::Line ? std::nullopt : std::optional(p.center());
    case Anchor::Whole: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Circle2> circumcircle(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double scale = std::max(norm2(ab), norm2(ac));
  if (std::abs(d) <= 1e-12 * scale || scale == 0.0) return std::nullopt;
  const Vec2 off{(ac.y * norm2(ab) - ab.y * norm2(ac)) / d, (ab.x * norm2(ac) - ac.x * norm2(ab)) / d};
  return Circle2{a + off, norm(off)};
}

std::optional<ArcSweep> arc_sweep(const Primitive& arc) {
  const auto cc = circumcircle(arc.a, arc.b, arc.c);
  if (!cc) return std::nullopt;
  ArcSweep s;
  s.center = cc->center;
  s.radius = cc->radius;
  auto ang = [&](Vec2 p) { return std::atan2(p.y - s.center.y, p.x - s.center.x); };
  const double two_pi = 2.0 * std::numbers::pi;
  s.start_angle = ang(arc.a);
  auto ccw_delta = [&](double from, double to) {
    double d = std::fmod(to - from, two_pi);
    if (d < 0) d += two_pi;
    return d;
  };
  const double to_mid = ccw_delta(s.start_angle, ang(arc.b));
  const double to_end = ccw_delta(s.start_angle, ang(arc.c));
  // Mid lies on the ccw path to end iff it is reached first going ccw.
  s.sweep = to_mid <= to_end ? to_end : -(two_pi - to_end);
  return s;
}

double distance_to_primitive(Vec2 q, const Primitive& p) {
  switch (p.kind) {
    case PrimitiveKind::Line: return point_segment_distance(q, p.a, p.b);
    case PrimitiveKind::Circle: return std::abs(norm(q - p.a) - p.r);
    case PrimitiveKind::Arc: {
      const auto s = arc_sweep(p);
      if (!s) return std::min(point_segment_distance(q, p.a, p.b), point_segment_distance(q, p.b, p.c));
      const double two_pi = 2.0 * std::numbers::pi;
      double rel = std::atan2(q.y - s->center.y, q.x - s->center.x) - s->start_angle;
      if (s->sweep < 0) rel = -rel;
      rel = std::fmod(rel, two_pi);
      if (rel < 0) rel += two_pi;
      if (rel <= std::abs(s->sweep)) return std::abs(norm(q - s->center) - s->radius);
      return std::min(norm(q - p.a), norm(q - p.c));
    }
  }
  return INFINITY;
}

}  // namespace slicecad
