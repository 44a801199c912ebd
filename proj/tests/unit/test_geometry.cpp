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

#include <cstring>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "slicecad/error.hpp"
#include "slicecad/geometry.hpp"

using namespace slicecad;
using namespace slicecad::testing;

namespace {

std::string cube_obj() {
  const Mesh m = unit_cube();
  std::string s;
  for (const auto& v : m.vertices) s += "v " + std::to_string(v.x) + " " + std::to_string(v.y) + " " + std::to_string(v.z) + "\n";
  for (const auto& f : m.faces)
    s += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  return s;
}

std::string cube_stl_binary() {
  const Mesh m = unit_cube();
  std::string s(80, '\0');
  const auto count = static_cast<std::uint32_t>(m.faces.size());
  s.append(reinterpret_cast<const char*>(&count), 4);
  for (const auto& f : m.faces) {
    float rec[12] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = m.vertices[f[k]];
      rec[3 + 3 * k] = static_cast<float>(v.x);
      rec[4 + 3 * k] = static_cast<float>(v.y);
      rec[5 + 3 * k] = static_cast<float>(v.z);
    }
    s.append(reinterpret_cast<const char*>(rec), sizeof rec);
    s.append(2, '\0');
  }
  return s;
}

std::string cube_stl_ascii() {
  const Mesh m = unit_cube();
  std::string s = "solid cube\n";
  for (const auto& f : m.faces) {
    s += " facet normal 0 0 0\n  outer loop\n";
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = m.vertices[f[k]];
      s += "   vertex " + std::to_string(v.x) + " " + std::to_string(v.y) + " " + std::to_string(v.z) + "\n";
    }
    s += "  endloop\n endfacet\n";
  }
  return s + "endsolid cube\n";
}

}  // namespace

TEST_CASE("point_segment_distance clamps to the segment") {
  const Vec3 a{0, 0, 0}, b{0, 0, 1};
  CHECK(point_segment_distance(Vec3{0, 0, 2}, a, b) == doctest::Approx(1.0));
  CHECK(point_segment_distance(Vec3{1, 0, 0.5}, a, b) == doctest::Approx(1.0));
  CHECK(point_segment_distance(Vec3{0, 0, -0.5}, a, b) == doctest::Approx(0.5));
  CHECK(point_segment_distance(Vec3{3, 4, 0}, a, a) == doctest::Approx(5.0));
  CHECK(point_segment_distance(Vec2{0.5, 2}, Vec2{0, 0}, Vec2{1, 0}) == doctest::Approx(2.0));
}

TEST_CASE("OBJ cube loads with 8 vertices and unit bounds") {
  const auto dir = temp_dir("geom_obj");
  write_file(dir / "cube.obj", cube_obj());
  const LoadedMesh lm = load_mesh(dir / "cube.obj");
  CHECK(lm.mesh.vertices.size() == 8);
  CHECK(lm.mesh.faces.size() == 12);
  const BoundingBox bb = lm.mesh.bounds();
  for (int i = 0; i < 3; ++i) {
    CHECK(bb.min[i] == doctest::Approx(0.0));
    CHECK(bb.max[i] == doctest::Approx(1.0));
  }
  CHECK(lm.mesh.is_watertight());
  CHECK(lm.mesh.volume() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("binary and ASCII STL vertices are welded") {
  const auto dir = temp_dir("geom_stl");
  write_file(dir / "cube_bin.stl", cube_stl_binary());
  write_file(dir / "cube_ascii.stl", cube_stl_ascii());
  // Oracle: distinct coordinates among all facet corners.
  std::set<std::array<double, 3>> distinct;
  const Mesh ref = unit_cube();
  for (const auto& f : ref.faces)
    for (auto i : f) distinct.insert({ref.vertices[i].x, ref.vertices[i].y, ref.vertices[i].z});
  CHECK(detect_format(dir / "cube_bin.stl") == MeshFormat::StlBinary);
  CHECK(detect_format(dir / "cube_ascii.stl") == MeshFormat::StlAscii);
  const LoadedMesh bin = load_mesh(dir / "cube_bin.stl");
  const LoadedMesh asc = load_mesh(dir / "cube_ascii.stl");
  CHECK(bin.mesh.vertices.size() == distinct.size());
  CHECK(asc.mesh.vertices.size() == distinct.size());
  CHECK(bin.mesh.is_watertight());
  CHECK(asc.mesh.volume() == doctest::Approx(1.0));
}

TEST_CASE("malformed and empty meshes are rejected") {
  const auto dir = temp_dir("geom_bad");
  write_file(dir / "oob.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  write_file(dir / "empty.obj", "# nothing\n");
  write_file(dir / "bad.obj", "v 0 zero 0\n");
  auto code_of = [](const std::filesystem::path& p) {
    try {
      load_mesh(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code_of(dir / "oob.obj") == ErrorCode::ParseError);
  CHECK(code_of(dir / "empty.obj") == ErrorCode::EmptyMesh);
  CHECK(code_of(dir / "bad.obj") == ErrorCode::ParseError);
  CHECK_THROWS_AS(load_mesh(dir / "missing.obj"), Error);
}

TEST_CASE("normalization maps the longest axis onto [0,1]") {
  const Mesh box = box_mesh({2, 0, 0}, {4, 1, 1});
  const LoadedMesh lm = normalize_mesh(box.vertices, box.faces);
  CHECK(lm.transform.scale == doctest::Approx(0.5));
  const BoundingBox bb = lm.mesh.bounds();
  CHECK(bb.min.x == doctest::Approx(0.0));
  CHECK(bb.max.x == doctest::Approx(1.0));
  CHECK(bb.extent().y == doctest::Approx(0.5));
  CHECK(bb.center().y == doctest::Approx(0.5));
  for (const auto& v : box.vertices) {
    const Vec3 back = lm.transform.invert(lm.transform.apply(v));
    CHECK(norm(back - v) < 1e-12);
  }
}

TEST_CASE("surface samples follow face areas") {
  const Mesh cube = unit_cube();
  const std::size_t n = 8192;
  const auto pts = sample_surface_points(cube, n, 7);
  REQUIRE(pts.size() == n);
  std::map<int, int> per_side;  // which axis-aligned face each point lies on
  for (const auto& p : pts) {
    int side = -1;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(p[a]) < 1e-12) side = 2 * a;
      if (std::abs(p[a] - 1.0) < 1e-12) side = 2 * a + 1;
    }
    REQUIRE(side >= 0);
    ++per_side[side];
  }
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (int s = 0; s < 6; ++s) CHECK(std::abs(per_side[s] - n * p) < 3.0 * sigma);
  CHECK(sample_surface_points(cube, n, 7) == pts);
}

TEST_CASE("samples on a single triangle are inside it") {
  Mesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.faces = {{0, 1, 2}};
  for (const auto& p : sample_surface_points(tri, 3, 11)) {
    CHECK(p.x >= 0.0);
    CHECK(p.y >= 0.0);
    CHECK(p.x + p.y <= 1.0 + 1e-12);
    CHECK(p.z == 0.0);
  }
}

TEST_CASE("polygon predicates") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == doctest::Approx(1.0));
  std::vector<Vec2> cw(sq.rbegin(), sq.rend());
  CHECK(signed_area(cw) == doctest::Approx(-1.0));
  CHECK(point_in_polygon({0.5, 0.5}, sq));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, sq));
  CHECK(is_simple_polygon(sq));
  const std::vector<Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(is_simple_polygon(bowtie));
  CHECK(segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  CHECK(distance_to_ring({0.5, 2.0}, sq) == doctest::Approx(1.0));
}

TEST_CASE("mesh topology helpers") {
  Mesh two = box_mesh({0, 0, 0}, {1, 1, 1});
  two.append(box_mesh({2, 0, 0}, {3, 1, 1}));
  CHECK(two.connected_components() == 2);
  CHECK(two.is_watertight());
  CHECK(two.volume() == doctest::Approx(2.0));
  Mesh open = unit_cube();
  open.faces.pop_back();
  CHECK_FALSE(open.is_watertight());
  CHECK(two.content_hash() != unit_cube().content_hash());
}

TEST_CASE("OBJ writer round-trips") {
  const auto dir = temp_dir("geom_rt");
  const Mesh cube = unit_cube();
  save_obj(cube, dir / "out.obj");
  const LoadedMesh back = load_mesh(dir / "out.obj");
  CHECK(back.mesh.faces.size() == cube.faces.size());
  CHECK(back.mesh.volume() == doctest::Approx(cube.volume()));
}
