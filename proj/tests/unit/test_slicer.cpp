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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "slicecad/error.hpp"
#include "slicecad/slicer.hpp"

using namespace slicecad;
using namespace slicecad::testing;

TEST_CASE("sample_planes spaces planes at cell centers") {
  const Mesh cube = unit_cube();
  const auto planes = sample_planes(cube, 40);
  REQUIRE(planes.size() == 120);
  std::vector<double> z;
  for (const auto& p : planes) {
    const Vec3 n = p.normal;
    const bool axis_aligned = (n == Vec3{1, 0, 0}) || (n == Vec3{0, 1, 0}) || (n == Vec3{0, 0, 1});
    CHECK(axis_aligned);
    if (n == Vec3{0, 0, 1}) z.push_back(p.origin.z);
  }
  REQUIRE(z.size() == 40);
  std::sort(z.begin(), z.end());
  for (int k = 0; k < 40; ++k) CHECK(z[k] == doctest::Approx((k + 0.5) / 40.0).epsilon(1e-12));

  const auto single = sample_planes(cube, 1);
  REQUIRE(single.size() == 3);
  for (const auto& p : single) CHECK(p.offset() == doctest::Approx(0.5));
}

TEST_CASE("slicing the unit cube") {
  const Mesh cube = unit_cube();
  const auto segs = slice_mesh(cube, {{0, 0, 0.5}, {0, 0, 1}});
  // Oracle: every side-wall triangle spans z in [0,1] and so crosses z = 0.5 once.
  int crossing = 0;
  for (const auto& f : cube.faces) {
    double lo = 1e9, hi = -1e9;
    for (auto i : f) {
      lo = std::min(lo, cube.vertices[i].z);
      hi = std::max(hi, cube.vertices[i].z);
    }
    crossing += lo < 0.5 && hi > 0.5;
  }
  CHECK(segs.size() == static_cast<std::size_t>(crossing));
  CHECK(segs.size() == 8);
  for (const auto& s : segs) {
    CHECK(s.a.z == doctest::Approx(0.5));
    CHECK(s.b.z == doctest::Approx(0.5));
  }
  CHECK(slice_mesh(cube, {{0, 0, 1.5}, {0, 0, 1}}).empty());
}

TEST_CASE("triangle touching the plane at a vertex") {
  Mesh tri;
  tri.vertices = {{0, 0, 0.5}, {1, 0, 0}, {1, 0, 1}};
  tri.faces = {{0, 1, 2}};
  const auto segs = slice_mesh(tri, {{0, 0, 0.5}, {0, 0, 1}});
  REQUIRE(segs.size() == 1);
  const bool through_vertex = norm(segs[0].a - Vec3{0, 0, 0.5}) < 1e-12 || norm(segs[0].b - Vec3{0, 0, 0.5}) < 1e-12;
  CHECK(through_vertex);
}

TEST_CASE("stitching shuffled cube segments gives one square") {
  auto segs = slice_mesh(unit_cube(), {{0, 0, 0.5}, {0, 0, 1}});
  std::mt19937 rng(3);
  std::shuffle(segs.begin(), segs.end(), rng);
  for (std::size_t i = 0; i < segs.size(); i += 2) std::swap(segs[i].a, segs[i].b);
  const StitchResult r = stitch_loops(segs, 1e-5);
  REQUIRE(r.closed.size() == 1);
  CHECK(r.open.empty());
  CHECK(r.closed[0].points.size() == 4);
  for (const auto& p : r.closed[0].points) {
    const bool corner = (std::abs(p.x) < 1e-9 || std::abs(p.x - 1) < 1e-9) && (std::abs(p.y) < 1e-9 || std::abs(p.y - 1) < 1e-9);
    CHECK(corner);
  }
}

TEST_CASE("two disjoint squares and an open chain") {
  auto square = [](double x0) {
    std::vector<Segment3> s;
    const Vec3 c[4] = {{x0, 0, 0}, {x0 + 1, 0, 0}, {x0 + 1, 1, 0}, {x0, 1, 0}};
    for (int i = 0; i < 4; ++i) s.push_back({c[i], c[(i + 1) % 4]});
    return s;
  };
  auto segs = square(0);
  const auto more = square(3);
  segs.insert(segs.end(), more.begin(), more.end());
  const StitchResult two = stitch_loops(segs, 1e-5);
  CHECK(two.closed.size() == 2);
  CHECK(two.open.empty());

  const std::vector<Segment3> chain{{{0, 0, 0}, {1, 0, 0}}, {{1, 0, 0}, {1, 1, 0}}, {{1, 1, 0}, {2, 3, 0}}};
  const StitchResult open = stitch_loops(chain, 1e-5);
  CHECK(open.closed.empty());
  REQUIRE(open.open.size() == 1);
  CHECK(open.open[0].size() == 4);
}

TEST_CASE("project_and_normalize fits the joint bbox into the margin box") {
  Loop3D sq;
  sq.points = {{0.2, 0.2, 0.3}, {0.8, 0.2, 0.3}, {0.8, 0.8, 0.3}, {0.2, 0.8, 0.3}};
  const Plane plane{{0, 0, 0.3}, {0, 0, 1}};
  const Projection p = project_and_normalize({&sq, 1}, plane);
  CHECK(p.norm.s == doctest::Approx(0.9 / 0.6));
  REQUIRE(p.loops.size() == 1);
  CHECK(p.loops[0].orientation == Orientation::Ccw);
  double lo = 1, hi = 0;
  for (auto q : p.loops[0].points) {
    lo = std::min({lo, q.x, q.y});
    hi = std::max({hi, q.x, q.y});
  }
  CHECK(lo == doctest::Approx(0.05));
  CHECK(hi == doctest::Approx(0.95));
  for (std::size_t i = 0; i < sq.points.size(); ++i) {
    const Vec2 back = p.norm.invert(p.loops[0].points[i]);
    CHECK(norm(back - drop(sq.points[i], Axis::Z)) < 1e-9);
  }

  Loop3D unit;
  unit.points = {{0.05, 0.05, 0}, {0.95, 0.05, 0}, {0.95, 0.95, 0}, {0.05, 0.95, 0}};
  const Projection id = project_and_normalize({&unit, 1}, {{0, 0, 0}, {0, 0, 1}});
  CHECK(id.norm.s == doctest::Approx(1.0));
  CHECK(std::abs(id.norm.t_x) < 1e-12);
  CHECK(std::abs(id.norm.t_y) < 1e-12);
}

TEST_CASE("in-plane axes follow cyclic order") {
  Loop3D l;
  l.points = {{0.5, 0.1, 0.2}, {0.5, 0.9, 0.2}, {0.5, 0.9, 0.7}};
  const auto uv = to_plane_2d(l, Axis::X);
  CHECK(uv[1].x == doctest::Approx(0.9));  // y
  CHECK(uv[2].y == doctest::Approx(0.7));  // z
  const auto zx = to_plane_2d(l, Axis::Y);
  CHECK(zx[0].x == doctest::Approx(0.2));  // z
  CHECK(zx[0].y == doctest::Approx(0.5));  // x
}

TEST_CASE("slice_all records closed loops per plane") {
  const auto slices = slice_all(unit_cube(), {});
  CHECK(slices.size() == 120);
  for (const auto& s : slices) {
    CHECK(s.loops.size() == 1);
    CHECK(s.open_chains.empty());
  }
}
