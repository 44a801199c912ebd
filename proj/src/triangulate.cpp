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

#include "slicecad/triangulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <list>
#include <numeric>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

Error failure(const std::string& msg) { return Error(ErrorCode::TriangulationFailure, "cad_model", msg); }

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, bool inclusive) {
  const double d1 = orient(a, b, p), d2 = orient(b, c, p), d3 = orient(c, a, p);
  if (inclusive) return d1 >= 0 && d2 >= 0 && d3 >= 0;
  return d1 > 0 && d2 > 0 && d3 > 0;
}

// Splices hole (clockwise) into poly (counter-clockwise) through a visible bridge.
void bridge_hole(std::vector<std::uint32_t>& poly, const std::vector<std::uint32_t>& hole, std::span<const Vec2> pts) {
  std::size_t mi = 0;
  for (std::size_t i = 1; i < hole.size(); ++i) {
    const Vec2 a = pts[hole[i]], b = pts[hole[mi]];
    if (a.x > b.x || (a.x == b.x && a.y < b.y)) mi = i;
  }
  const Vec2 M = pts[hole[mi]];

  // Closest edge hit by the ray from M towards +x.
  double best_x = INFINITY;
  std::size_t best_edge = poly.size();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = pts[poly[i]], b = pts[poly[(i + 1) % poly.size()]];
    if ((a.y > M.y && b.y > M.y) || (a.y < M.y && b.y < M.y)) continue;
    double x;
    if (a.y == b.y) {
      x = std::min(a.x, b.x);
      if (std::max(a.x, b.x) < M.x) continue;
      x = std::max(x, M.x);
    } else {
      x = a.x + (M.y - a.y) * (b.x - a.x) / (b.y - a.y);
    }
    if (x < M.x) continue;
    if (x < best_x) {
      best_x = x;
      best_edge = i;
    }
  }
  if (best_edge == poly.size()) throw failure("hole is not inside the outer boundary");
  const Vec2 I{best_x, M.y};
  const std::size_t ea = best_edge, eb = (best_edge + 1) % poly.size();
  std::size_t pi = pts[poly[ea]].x >= pts[poly[eb]].x ? ea : eb;
  if (pts[poly[ea]] == I) pi = ea;
  if (pts[poly[eb]] == I) pi = eb;
  const Vec2 P = pts[poly[pi]];

  if (P != I) {
    // A reflex vertex inside (M, I, P) would block the bridge; take the one
    // closest in angle to the ray.
    double best_angle = INFINITY, best_dist = INFINITY;
    std::size_t chosen = pi;
    const bool ccw = orient(M, I, P) > 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 v = pts[poly[i]];
      if (i == pi || v == P) continue;
      const Vec2 prev = pts[poly[(i + poly.size() - 1) % poly.size()]], next = pts[poly[(i + 1) % poly.size()]];
      if (orient(prev, v, next) > 0) continue;  // convex
      const bool inside = ccw ? in_triangle(v, M, I, P, true) : in_triangle(v, M, P, I, true);
      if (!inside) continue;
      const Vec2 d = v - M;
      const double ang = std::atan2(std::abs(d.y), d.x);
      const double dist = norm2(d);
      if (ang < best_angle || (ang == best_angle && dist < best_dist)) {
        best_angle = ang;
        best_dist = dist;
        chosen = i;
      }
    }
    pi = chosen;
  }

  std::vector<std::uint32_t> out;
  out.reserve(poly.size() + hole.size() + 2);
  out.insert(out.end(), poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(pi) + 1);
  for (std::size_t k = 0; k <= hole.size(); ++k) out.push_back(hole[(mi + k) % hole.size()]);
  out.push_back(poly[pi]);
  out.insert(out.end(), poly.begin() + static_cast<std::ptrdiff_t>(pi) + 1, poly.end());
  poly = std::move(out);
}

}  // namespace

std::vector<Vec2> clean_ring(std::span<const Vec2> ring) {
  std::vector<Vec2> r;
  for (auto p : ring)
    if (r.empty() || p != r.back()) r.push_back(p);
  while (r.size() > 1 && r.front() == r.back()) r.pop_back();
  bool changed = true;
  while (changed && r.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < r.size() && r.size() > 3; ++i) {
      const Vec2 a = r[(i + r.size() - 1) % r.size()], b = r[i], c = r[(i + 1) % r.size()];
      const double scale = norm(b - a) * norm(c - b);
      if (std::abs(orient(a, b, c)) <= 1e-14 * scale && dot(b - a, c - b) > 0) {
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return r;
}

std::vector<std::array<std::uint32_t, 3>> triangulate_polygon(std::span<const Vec2> outer,
                                                               std::span<const std::vector<Vec2>> holes) {
  if (outer.size() < 3) throw failure("outer boundary needs >= 3 vertices");
  if (!is_simple_polygon(outer)) throw failure("outer boundary self-intersects");
  std::vector<Vec2> pts(outer.begin(), outer.end());
  std::vector<std::uint32_t> poly(outer.size());
  std::iota(poly.begin(), poly.end(), 0u);
  if (signed_area(outer) < 0) std::reverse(poly.begin(), poly.end());

  struct HoleIdx {
    std::vector<std::uint32_t> idx;
    double max_x;
  };
  std::vector<HoleIdx> hs;
  for (const auto& h : holes) {
    if (h.size() < 3) throw failure("hole needs >= 3 vertices");
    if (!is_simple_polygon(h)) throw failure("hole self-intersects");
    HoleIdx hi{{}, -INFINITY};
    for (auto p : h) {
      hi.idx.push_back(static_cast<std::uint32_t>(pts.size()));
      pts.push_back(p);
      hi.max_x = std::max(hi.max_x, p.x);
    }
    if (signed_area(h) > 0) std::reverse(hi.idx.begin(), hi.idx.end());
    hs.push_back(std::move(hi));
  }
  std::stable_sort(hs.begin(), hs.end(), [](const HoleIdx& a, const HoleIdx& b) { return a.max_x > b.max_x; });
  for (const auto& h : hs) bridge_hole(poly, h.idx, pts);

  std::vector<std::array<std::uint32_t, 3>> tris;
  tris.reserve(poly.size());
  std::vector<std::uint32_t> v = poly;
  auto is_ear = [&](std::size_t i, bool inclusive) {
    const std::size_t n = v.size();
    const Vec2 a = pts[v[(i + n - 1) % n]], b = pts[v[i]], c = pts[v[(i + 1) % n]];
    if (orient(a, b, c) <= 0) return false;
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 p = pts[v[k]];
      if (p == a || p == b || p == c) continue;
      if (in_triangle(p, a, b, c, inclusive)) return false;
    }
    return true;
  };
  while (v.size() > 3) {
    std::size_t ear = v.size();
    for (int pass = 0; pass < 2 && ear == v.size(); ++pass)
      for (std::size_t i = 0; i < v.size(); ++i)
        if (is_ear(i, pass == 0)) {
          ear = i;
          break;
        }
    if (ear == v.size()) {
      // Zero-area spikes left behind by collinear bridges.
      for (std::size_t i = 0; i < v.size() && ear == v.size(); ++i) {
        const std::size_t n = v.size();
        if (orient(pts[v[(i + n - 1) % n]], pts[v[i]], pts[v[(i + 1) % n]]) == 0.0) ear = i;
      }
      if (ear == v.size()) throw failure(fmt::format("no ear found with {} vertices left", v.size()));
    }
    const std::size_t n = v.size();
    tris.push_back({v[(ear + n - 1) % n], v[ear], v[(ear + 1) % n]});
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(ear));
  }
  tris.push_back({v[0], v[1], v[2]});
  return tris;
}

}  // namespace slicecad
