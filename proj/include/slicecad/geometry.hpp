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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace slicecad {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
Vec3 normalized(const Vec3& a);
Vec2 normalized(Vec2 a);  // zero stays zero

enum class Axis : int { X = 0, Y = 1, Z = 2 };

constexpr int index(Axis a) { return static_cast<int>(a); }
constexpr Vec3 axis_unit(Axis a) {
  return a == Axis::X ? Vec3{1, 0, 0} : (a == Axis::Y ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
}
// In-plane coordinates for an axis-aligned plane keep the remaining two axes in
// cyclic order, so (u, v, axis) is always right-handed.
constexpr int in_plane_u(Axis a) { return (index(a) + 1) % 3; }
constexpr int in_plane_v(Axis a) { return (index(a) + 2) % 3; }
char axis_name(Axis a);
Axis axis_from_name(char c);

/// Lift plane-local coordinates `p` onto the axis-aligned plane at `offset`.
Vec3 lift(Vec2 p, Axis axis, double offset);
Vec2 drop(const Vec3& p, Axis axis);

struct Plane {
  Point3 origin;
  Vec3 normal{0, 0, 1};

  /// Axis of an axis-aligned normal (either sign), if any.
  std::optional<Axis> axis() const;
  double offset() const;  // signed distance of the plane from the world origin along its normal
  double signed_distance(const Point3& p) const { return dot(p - origin, normal); }
  bool operator==(const Plane&) const = default;
};

struct BoundingBox {
  Vec3 min{INFINITY, INFINITY, INFINITY};
  Vec3 max{-INFINITY, -INFINITY, -INFINITY};

  void extend(const Vec3& p);
  void extend(const BoundingBox& b);
  bool empty() const { return min.x > max.x; }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
  double max_extent() const;
};

/// Load-time normalization: normalized = p * scale + translate.
struct BBoxTransform {
  Vec3 translate;
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return p * scale + translate; }
  Vec3 invert(const Vec3& p) const { return (p - translate) / scale; }
};

using Face = std::array<std::uint32_t, 3>;

struct Mesh {
  std::vector<Point3> vertices;
  std::vector<Face> faces;

  BoundingBox bounds() const;
  double face_area(std::size_t f) const;
  double surface_area() const;
  /// Signed enclosed volume by the divergence theorem; positive for outward normals.
  double volume() const;
  /// Every undirected edge is used by exactly two faces.
  bool is_watertight() const;
  std::size_t connected_components() const;
  std::uint64_t content_hash() const;
  /// Hash of the geometry after centring and unit-extent scaling, quantised
  /// so that translated or uniformly scaled copies hash alike.
  std::uint64_t shape_hash() const;
  void append(const Mesh& other);
};

enum class MeshFormat { Obj, StlAscii, StlBinary };

struct LoadStats {
  std::size_t merged_vertices = 0;
  std::size_t dropped_degenerate_faces = 0;
};

struct LoadedMesh {
  Mesh mesh;
  BBoxTransform transform;
  LoadStats stats;
};

/// Guess the format from the extension and, for STL, the header contents.
MeshFormat detect_format(const std::filesystem::path& path);

LoadedMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
LoadedMesh load_mesh(const std::filesystem::path& path);

/// Normalize into the unit box, merge vertices closer than `merge_tol`, drop
/// zero-area faces. Throws EmptyMesh when nothing usable remains.
LoadedMesh normalize_mesh(std::vector<Point3> vertices, std::vector<Face> faces,
                          double merge_tol = 1e-7);

void save_obj(const Mesh& mesh, const std::filesystem::path& path);
std::string to_obj_string(const Mesh& mesh);

double point_segment_distance(const Point3& q, const Point3& a, const Point3& b);
double point_segment_distance(Vec2 q, Vec2 a, Vec2 b);

/// Area-uniform surface samples; deterministic for a fixed seed.
std::vector<Point3> sample_surface_points(const Mesh& mesh, std::size_t n, std::uint64_t seed);

// Small helpers shared by several modules.
double signed_area(std::span<const Vec2> ring);
bool point_in_polygon(Vec2 p, std::span<const Vec2> ring);  // even-odd
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);    // closed segments
bool is_simple_polygon(std::span<const Vec2> ring);
double distance_to_ring(Vec2 p, std::span<const Vec2> ring);

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace slicecad
