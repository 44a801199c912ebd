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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "slicecad/cad_model.hpp"
#include "slicecad/geometry.hpp"
#include "slicecad/sketch.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad::testing {

inline constexpr double kPi = 3.14159265358979323846;

/// Closed box with outward-facing triangles.
inline Mesh box_mesh(Vec3 lo, Vec3 hi) {
  Mesh m;
  m.vertices = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  m.faces = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
             {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return m;
}

inline Mesh unit_cube() { return box_mesh({0, 0, 0}, {1, 1, 1}); }

/// Concatenation of two meshes without welding.
inline Mesh merge_meshes(const Mesh& a, const Mesh& b) {
  Mesh m = a;
  const auto off = static_cast<std::uint32_t>(a.vertices.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (auto f : b.faces) {
    for (auto& i : f) i += off;
    m.faces.push_back(f);
  }
  return m;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("slicecad_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Square [x0,x1]x[y0,y1] as n points per side, counter-clockwise.
inline std::vector<Vec2> square_points(double x0, double y0, double x1, double y1, int per_side) {
  const Vec2 c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  std::vector<Vec2> out;
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < per_side; ++i) out.push_back(c[s] + (c[(s + 1) % 4] - c[s]) * (static_cast<double>(i) / per_side));
  return out;
}

inline std::vector<Vec2> circle_points(Vec2 c, double r, int n, double phase = 0.0) {
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2.0 * kPi * i / n;
    out.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return out;
}

inline std::vector<Primitive> square_lines(double x0, double y0, double x1, double y1) {
  return {Primitive::line({x0, y0}, {x1, y0}), Primitive::line({x1, y0}, {x1, y1}),
          Primitive::line({x1, y1}, {x0, y1}), Primitive::line({x0, y1}, {x0, y0})};
}

/// Stadium: bottom line, right semicircle, top line, left semicircle.
inline std::vector<Primitive> stadium(Vec2 c, double half_len, double r) {
  const Vec2 bl{c.x - half_len, c.y - r}, br{c.x + half_len, c.y - r};
  const Vec2 tr{c.x + half_len, c.y + r}, tl{c.x - half_len, c.y + r};
  return {Primitive::line(bl, br), Primitive::arc(br, {c.x + half_len + r, c.y}, tr), Primitive::line(tr, tl),
          Primitive::arc(tl, {c.x - half_len - r, c.y}, bl)};
}

inline std::vector<Vec2> stadium_points(Vec2 c, double half_len, double r, int n) {
  // Arc-length uniform sampling of the stadium boundary, starting at the bottom-left.
  const double per = 4.0 * half_len + 2.0 * kPi * r;
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) {
    double s = per * i / n;
    if (s < 2 * half_len) {
      out.push_back({c.x - half_len + s, c.y - r});
      continue;
    }
    s -= 2 * half_len;
    if (s < kPi * r) {
      const double t = -kPi / 2 + s / r;
      out.push_back({c.x + half_len + r * std::cos(t), c.y + r * std::sin(t)});
      continue;
    }
    s -= kPi * r;
    if (s < 2 * half_len) {
      out.push_back({c.x + half_len - s, c.y + r});
      continue;
    }
    s -= 2 * half_len;
    const double t = kPi / 2 + s / r;
    out.push_back({c.x - half_len + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return out;
}

/// One-step model extruding `prims` from z = 0 by h along +z, identity frame.
inline CadModel prism(std::vector<Primitive> prims, double h) {
  CadStep s;
  s.sketch.primitives = std::move(prims);
  s.plane = {{0, 0, 0}, {0, 0, 1}};
  s.direction = {0, 0, 1};
  s.length = h;
  CadModel m;
  m.steps.push_back(std::move(s));
  return m;
}

}  // namespace slicecad::testing
