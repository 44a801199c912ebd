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

#include "slicecad/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include "slicecad/error.hpp"

namespace slicecad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::DegenerateSlice: return "DegenerateSlice";
    case ErrorCode::ZeroExtent: return "ZeroExtent";
    case ErrorCode::NoSameAxisCandidate: return "NoSameAxisCandidate";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyForeground: return "EmptyForeground";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OpenChain: return "OpenChain";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InconsistentPins: return "InconsistentPins";
    case ErrorCode::UnsupportedConstraint: return "UnsupportedConstraint";
    case ErrorCode::CrossingLoops: return "CrossingLoops";
    case ErrorCode::NoSpecs: return "NoSpecs";
    case ErrorCode::NoSamples: return "NoSamples";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::NoSteps: return "NoSteps";
    case ErrorCode::TriangulationFailure: return "TriangulationFailure";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::EmptyOccupancy: return "EmptyOccupancy";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, "geometry", msg); }

}  // namespace

Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  if (n == 0.0) return a;
  return a / n;
}

Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  if (n == 0.0) return a;
  return a / n;
}

char axis_name(Axis a) { return "xyz"[index(a)]; }

Axis axis_from_name(char c) {
  switch (c) {
    case 'x': case 'X': case '0': return Axis::X;
    case 'y': case 'Y': case '1': return Axis::Y;
    case 'z': case 'Z': case '2': return Axis::Z;
    default: throw Error(ErrorCode::InvalidArgument, "geometry", fmt::format("unknown axis '{}'", c));
  }
}

Vec3 lift(Vec2 p, Axis axis, double offset) {
  Vec3 out;
  out[in_plane_u(axis)] = p.x;
  out[in_plane_v(axis)] = p.y;
  out[index(axis)] = offset;
  return out;
}

Vec2 drop(const Vec3& p, Axis axis) { return {p[in_plane_u(axis)], p[in_plane_v(axis)]}; }

std::optional<Axis> Plane::axis() const {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(std::abs(normal[i]) - 1.0) < 1e-9) return static_cast<Axis>(i);
  }
  return std::nullopt;
}

double Plane::offset() const { return dot(origin, normal); }

void BoundingBox::extend(const Vec3& p) {
  for (int i = 0; i < 3; ++i) {
    min[i] = std::min(min[i], p[i]);
    max[i] = std::max(max[i], p[i]);
  }
}

void BoundingBox::extend(const BoundingBox& b) {
  if (b.empty()) return;
  extend(b.min);
  extend(b.max);
}

double BoundingBox::max_extent() const {
  const Vec3 e = extent();
  return std::max({e.x, e.y, e.z});
}

BoundingBox Mesh::bounds() const {
  BoundingBox b;
  for (const auto& v : vertices) b.extend(v);
  return b;
}

double Mesh::face_area(std::size_t f) const {
  const auto& t = faces[f];
  return 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
}

double Mesh::surface_area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(f);
  return a;
}

double Mesh::volume() const {
  double v = 0.0;
  for (const auto& t : faces) {
    v += dot(vertices[t[0]], cross(vertices[t[1]], vertices[t[2]]));
  }
  return v / 6.0;
}

bool Mesh::is_watertight() const {
  if (faces.empty()) return false;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
  for (const auto& t : faces) {
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++uses[{a, b}];
    }
  }
  return std::all_of(uses.begin(), uses.end(), [](const auto& e) { return e.second == 2; });
}

std::size_t Mesh::connected_components() const {
  std::vector<std::uint32_t> parent(vertices.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& t : faces) {
    parent[find(t[1])] = find(t[0]);
    parent[find(t[2])] = find(t[0]);
  }
  std::vector<bool> used(vertices.size(), false);
  for (const auto& t : faces)
    for (auto i : t) used[i] = true;
  std::size_t count = 0;
  for (std::uint32_t i = 0; i < vertices.size(); ++i)
    if (used[i] && find(i) == i) ++count;
  return count;
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combination
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Mesh::content_hash() const {
  std::uint64_t h = fnv1a(vertices.data(), vertices.size() * sizeof(Point3));
  return fnv1a(faces.data(), faces.size() * sizeof(Face), h);
}

std::uint64_t Mesh::shape_hash() const {
  const BoundingBox bb = bounds();
  const Vec3 c = bb.center();
  const double e = bb.max_extent();
  const double k = e > 0 ? std::ldexp(1.0, 24) / e : 1.0;
  std::vector<std::int64_t> q;
  q.reserve(vertices.size() * 3);
  for (const auto& v : vertices)
    for (double x : {v.x - c.x, v.y - c.y, v.z - c.z}) q.push_back(std::llround(x * k));
  const std::uint64_t h = fnv1a(q.data(), q.size() * sizeof(std::int64_t));
  return fnv1a(faces.data(), faces.size() * sizeof(Face), h);
}

void Mesh::append(const Mesh& other) {
  const auto base = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& f : other.faces) faces.push_back({f[0] + base, f[1] + base, f[2] + base});
}

// ---------------------------------------------------------------------------
// Loading

MeshFormat detect_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return MeshFormat::Obj;
  if (ext != ".stl") fail(ErrorCode::ParseError, fmt::format("unsupported mesh extension '{}'", ext));
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  const auto size = std::filesystem::file_size(path);
  char header[84] = {};
  in.read(header, 84);
  if (size >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, header + 80, 4);
    if (84 + static_cast<std::uint64_t>(count) * 50 == size) return MeshFormat::StlBinary;
  }
  return std::string_view(header, 5) == "solid" ? MeshFormat::StlAscii : MeshFormat::StlBinary;
}

namespace {

void parse_obj(std::istream& in, std::vector<Point3>& verts, std::vector<Face>& faces) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<long> poly;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Point3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        fail(ErrorCode::ParseError, fmt::format("line {}: malformed vertex", lineno));
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        fail(ErrorCode::ParseError, fmt::format("line {}: non-finite vertex", lineno));
      verts.push_back(p);
    } else if (tag == "f") {
      poly.clear();
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        long idx = 0;
        try {
          idx = std::stol(tok.substr(0, slash));
        } catch (const std::exception&) {
          fail(ErrorCode::ParseError, fmt::format("line {}: bad face index '{}'", lineno, tok));
        }
        if (idx < 0) idx = static_cast<long>(verts.size()) + idx + 1;
        if (idx < 1 || idx > static_cast<long>(verts.size()))
          fail(ErrorCode::ParseError, fmt::format("line {}: face index {} out of range", lineno, idx));
        poly.push_back(idx - 1);
      }
      if (poly.size() < 3) fail(ErrorCode::ParseError, fmt::format("line {}: face with < 3 vertices", lineno));
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        faces.push_back({static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[k]),
                         static_cast<std::uint32_t>(poly[k + 1])});
      }
    }
  }
}

void parse_stl_ascii(std::istream& in, std::vector<Point3>& verts, std::vector<Face>& faces) {
  std::string tok;
  std::vector<Point3> facet;
  bool saw_solid = false;
  while (in >> tok) {
    if (tok == "solid") {
      saw_solid = true;
      std::string rest;
      std::getline(in, rest);
    } else if (tok == "vertex") {
      Point3 p;
      if (!(in >> p.x >> p.y >> p.z)) fail(ErrorCode::ParseError, "malformed STL vertex");
      facet.push_back(p);
    } else if (tok == "endfacet") {
      if (facet.size() != 3) fail(ErrorCode::ParseError, "STL facet without exactly 3 vertices");
      const auto base = static_cast<std::uint32_t>(verts.size());
      verts.insert(verts.end(), facet.begin(), facet.end());
      faces.push_back({base, base + 1, base + 2});
      facet.clear();
    }
  }
  if (!saw_solid) fail(ErrorCode::ParseError, "ASCII STL missing 'solid' header");
}

void parse_stl_binary(std::istream& in, std::vector<Point3>& verts, std::vector<Face>& faces) {
  char header[80];
  if (!in.read(header, 80)) fail(ErrorCode::ParseError, "binary STL shorter than header");
  std::uint32_t count = 0;
  if (!in.read(reinterpret_cast<char*>(&count), 4)) fail(ErrorCode::ParseError, "binary STL missing facet count");
  if constexpr (std::endian::native == std::endian::big) count = __builtin_bswap32(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    char rec[50];
    if (!in.read(rec, 50)) fail(ErrorCode::ParseError, fmt::format("binary STL truncated at facet {}", i));
    const auto base = static_cast<std::uint32_t>(verts.size());
    for (int k = 0; k < 3; ++k) {
      float xyz[3];
      std::memcpy(xyz, rec + 12 + 12 * k, 12);
      verts.push_back({xyz[0], xyz[1], xyz[2]});
    }
    faces.push_back({base, base + 1, base + 2});
  }
}

struct CellHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& c) const {
    return static_cast<std::size_t>(fnv1a(c.data(), sizeof(c)));
  }
};

}  // namespace

LoadedMesh normalize_mesh(std::vector<Point3> vertices, std::vector<Face> faces, double merge_tol) {
  for (const auto& f : faces)
    for (auto i : f)
      if (i >= vertices.size()) fail(ErrorCode::ParseError, fmt::format("face index {} out of range", i));
  if (faces.empty()) fail(ErrorCode::EmptyMesh, "mesh has no faces");

  BoundingBox box;
  for (const auto& f : faces)
    for (auto i : f) box.extend(vertices[i]);
  const double ext = box.max_extent();
  if (!(ext > 0.0) || !std::isfinite(ext)) fail(ErrorCode::EmptyMesh, "mesh bounding box is degenerate");

  LoadedMesh out;
  out.transform.scale = 1.0 / ext;
  const Vec3 e = box.extent() * out.transform.scale;
  // Centered: the longest axis spans [0,1], shorter ones sit in the middle.
  for (int i = 0; i < 3; ++i) out.transform.translate[i] = 0.5 * (1.0 - e[i]) - box.min[i] * out.transform.scale;

  // Hash-grid vertex welding, deterministic in input order.
  std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, CellHash> grid;
  std::vector<std::uint32_t> remap(vertices.size());
  auto cell_of = [&](const Vec3& p) {
    return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor(p.x / merge_tol)),
                                       static_cast<std::int64_t>(std::floor(p.y / merge_tol)),
                                       static_cast<std::int64_t>(std::floor(p.z / merge_tol))};
  };
  for (std::uint32_t i = 0; i < vertices.size(); ++i) {
    const Vec3 p = out.transform.apply(vertices[i]);
    const auto c = cell_of(p);
    std::optional<std::uint32_t> hit;
    for (int dx = -1; dx <= 1 && !hit; ++dx)
      for (int dy = -1; dy <= 1 && !hit; ++dy)
        for (int dz = -1; dz <= 1 && !hit; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (auto j : it->second) {
            if (norm(out.mesh.vertices[j] - p) <= merge_tol) {
              hit = j;
              break;
            }
          }
        }
    if (hit) {
      remap[i] = *hit;
      ++out.stats.merged_vertices;
    } else {
      remap[i] = static_cast<std::uint32_t>(out.mesh.vertices.size());
      grid[c].push_back(remap[i]);
      out.mesh.vertices.push_back(p);
    }
  }

  for (const auto& f : faces) {
    const Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
    const auto& v = out.mesh.vertices;
    const double area2 = norm(cross(v[g[1]] - v[g[0]], v[g[2]] - v[g[0]]));
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2] || area2 < 1e-14) {
      ++out.stats.dropped_degenerate_faces;
      continue;
    }
    out.mesh.faces.push_back(g);
  }
  if (out.mesh.faces.empty()) fail(ErrorCode::EmptyMesh, "no non-degenerate faces");

  // Drop vertices no face references.
  std::vector<std::int64_t> keep(out.mesh.vertices.size(), -1);
  std::vector<Point3> compact;
  for (auto& f : out.mesh.faces)
    for (auto& i : f) {
      if (keep[i] < 0) {
        keep[i] = static_cast<std::int64_t>(compact.size());
        compact.push_back(out.mesh.vertices[i]);
      }
      i = static_cast<std::uint32_t>(keep[i]);
    }
  out.mesh.vertices = std::move(compact);
  return out;
}

LoadedMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path, format == MeshFormat::StlBinary ? std::ios::binary : std::ios::in);
  if (!in) fail(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::vector<Point3> verts;
  std::vector<Face> faces;
  switch (format) {
    case MeshFormat::Obj: parse_obj(in, verts, faces); break;
    case MeshFormat::StlAscii: parse_stl_ascii(in, verts, faces); break;
    case MeshFormat::StlBinary: parse_stl_binary(in, verts, faces); break;
  }
  return normalize_mesh(std::move(verts), std::move(faces));
}

LoadedMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, detect_format(path)); }

std::string to_obj_string(const Mesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
  for (const auto& v : mesh.vertices) out += fmt::format("v {} {} {}\n", v.x, v.y, v.z);
  for (const auto& f : mesh.faces) out += fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
  return out;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out << to_obj_string(mesh);
}

// ---------------------------------------------------------------------------
// Predicates

double point_segment_distance(const Point3& q, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = norm2(ab);
  if (len2 == 0.0) return norm(q - a);
  const double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
  return norm(q - (a + ab * t));
}

double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  if (len2 == 0.0) return norm(q - a);
  const double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
  return norm(q - (a + ab * t));
}

std::vector<Point3> sample_surface_points(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.faces.empty()) fail(ErrorCode::EmptyMesh, "cannot sample an empty mesh");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "geometry", "sample count must be >= 1");
  std::vector<double> cdf(mesh.faces.size());
  double acc = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    acc += mesh.face_area(f);
    cdf[f] = acc;
  }
  if (!(acc > 0.0)) fail(ErrorCode::EmptyMesh, "mesh has zero surface area");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = unit(rng) * acc;
    auto f = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    f = std::min(f, cdf.size() - 1);
    const double s = std::sqrt(unit(rng));
    const double t = unit(rng);
    const auto& tri = mesh.faces[f];
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    out.push_back(a * (1.0 - s) + b * (s * (1.0 - t)) + c * (s * t));
  }
  return out;
}

double signed_area(std::span<const Vec2> ring) {
  double a = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) a += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * a;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> ring) {
  bool inside = false;
  for (std::size_t i = 0, n = ring.size(), j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i], b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {
int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}
bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}
}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple_polygon(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i], b = ring[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share an endpoint by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

double distance_to_ring(Vec2 p, std::span<const Vec2> ring) {
  double d = INFINITY;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i)
    d = std::min(d, point_segment_distance(p, ring[i], ring[(i + 1) % n]));
  return d;
}

}  // namespace slicecad
