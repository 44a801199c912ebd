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

#include "slicecad/slicer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};
struct CellKeyHash {
  std::size_t operator()(const CellKey& c) const { return static_cast<std::size_t>(fnv1a(&c, sizeof(c))); }
};

// Drop vertices whose turning angle (against the current neighbours) is below
// the threshold. Runs to a fixed point; the start vertex is fixed.
void remove_collinear(std::vector<Point3>& pts, double max_deg) {
  const double limit = max_deg * std::numbers::pi / 180.0;
  bool changed = true;
  while (changed && pts.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size() && pts.size() > 3;) {
      const std::size_t n = pts.size();
      const Vec3& prev = pts[(i + n - 1) % n];
      const Vec3& cur = pts[i];
      const Vec3& next = pts[(i + 1) % n];
      const Vec3 d0 = cur - prev, d1 = next - cur;
      const double angle = std::atan2(norm(cross(d0, d1)), dot(d0, d1));
      if (angle < limit) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
  }
}

void rotate_to_min(std::vector<Point3>& pts) {
  auto it = std::min_element(pts.begin(), pts.end(), lex_less);
  std::rotate(pts.begin(), it, pts.end());
}

}  // namespace

std::vector<Plane> sample_planes(const Mesh& mesh, int n_per_axis) {
  if (n_per_axis < 1) throw Error(ErrorCode::InvalidArgument, "slicer", "n_per_axis must be >= 1");
  const BoundingBox box = mesh.bounds();
  const Vec3 center = box.center();
  std::vector<Plane> planes;
  planes.reserve(3 * static_cast<std::size_t>(n_per_axis));
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < n_per_axis; ++k) {
      Plane p;
      p.normal = axis_unit(static_cast<Axis>(a));
      p.origin = center;
      p.origin[a] = box.min[a] + (k + 0.5) / n_per_axis * (box.max[a] - box.min[a]);
      planes.push_back(p);
    }
  }
  return planes;
}

std::vector<Segment3> slice_mesh(const Mesh& mesh, const Plane& plane) {
  std::vector<Segment3> out;
  for (const auto& f : mesh.faces) {
    std::array<Vec3, 3> v{mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]};
    std::array<double, 3> d{};
    std::array<bool, 3> pos{};
    for (int k = 0; k < 3; ++k) {
      d[k] = plane.signed_distance(v[k]);
      pos[k] = d[k] >= 0.0;
    }
    if (pos[0] == pos[1] && pos[1] == pos[2]) continue;
    // The lone vertex is the one whose side differs from the other two.
    int lone = 0;
    if (pos[1] != pos[0] && pos[1] != pos[2]) lone = 1;
    if (pos[2] != pos[0] && pos[2] != pos[1]) lone = 2;
    const int i1 = (lone + 1) % 3, i2 = (lone + 2) % 3;
    auto cut = [&](int a, int b) {
      const double t = d[a] / (d[a] - d[b]);
      Vec3 p = v[a] + (v[b] - v[a]) * t;
      // Snap exactly onto the plane to remove drift in the normal direction.
      p = p - plane.normal * plane.signed_distance(p);
      return p;
    };
    Vec3 p = cut(lone, i1), q = cut(lone, i2);
    const Vec3 fn = cross(v[1] - v[0], v[2] - v[0]);
    const Vec3 dir = cross(plane.normal, fn);
    if (dot(q - p, dir) < 0) std::swap(p, q);
    out.push_back({p, q});
  }
  return out;
}

StitchResult stitch_loops(std::span<const Segment3> segments, double tol, double collinear_deg) {
  StitchResult result;
  std::vector<Segment3> segs;
  segs.reserve(segments.size());
  for (const auto& s : segments)
    if (norm(s.b - s.a) > 1e-12) segs.push_back(s);
  if (segs.empty()) return result;

  // Union-find over endpoints closer than tol.
  const std::size_t m = segs.size() * 2;
  auto endpoint = [&](std::size_t e) -> const Vec3& { return e % 2 == 0 ? segs[e / 2].a : segs[e / 2].b; };
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> grid;
  auto cell = [&](const Vec3& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x / tol)), static_cast<std::int64_t>(std::floor(p.y / tol)),
                   static_cast<std::int64_t>(std::floor(p.z / tol))};
  };
  for (std::size_t e = 0; e < m; ++e) grid[cell(endpoint(e))].push_back(e);
  for (std::size_t e = 0; e < m; ++e) {
    const CellKey c = cell(endpoint(e));
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == grid.end()) continue;
          for (auto o : it->second)
            if (o != e && norm(endpoint(o) - endpoint(e)) <= tol) parent[find(o)] = find(e);
        }
  }

  // Clusters get ids in lexicographic order of their smallest member, which
  // makes everything below independent of the input order.
  std::map<std::size_t, Vec3> rep_of_root;
  for (std::size_t e = 0; e < m; ++e) {
    const std::size_t r = find(e);
    auto it = rep_of_root.find(r);
    if (it == rep_of_root.end() || lex_less(endpoint(e), it->second)) rep_of_root[r] = endpoint(e);
  }
  std::vector<std::pair<Vec3, std::size_t>> reps;
  for (const auto& [root, p] : rep_of_root) reps.emplace_back(p, root);
  std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
  std::map<std::size_t, int> id_of_root;
  std::vector<Vec3> node_pos(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    id_of_root[reps[i].second] = static_cast<int>(i);
    node_pos[i] = reps[i].first;
  }

  struct Edge {
    int u, v;
    bool used = false;
  };
  std::vector<Edge> edges;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const int u = id_of_root[find(2 * s)], v = id_of_root[find(2 * s + 1)];
    if (u != v) edges.push_back({u, v});
  }
  // Canonical edge order so that parallel edges are interchangeable.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    const auto ka = std::minmax(a.u, a.v), kb = std::minmax(b.u, b.v);
    if (ka != kb) return ka < kb;
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  std::vector<std::vector<std::size_t>> adj(node_pos.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back(i);
    adj[edges[i].v].push_back(i);
  }
  for (auto& a : adj) {
    std::stable_sort(a.begin(), a.end(), [&](std::size_t x, std::size_t y) { return x < y; });
  }

  auto walk = [&](int start, std::vector<int>& nodes, int& vote) {
    nodes.assign(1, start);
    vote = 0;
    int cur = start;
    for (;;) {
      std::size_t pick = edges.size();
      int next_node = -1;
      for (auto ei : adj[cur]) {
        if (edges[ei].used) continue;
        const int other = edges[ei].u == cur ? edges[ei].v : edges[ei].u;
        if (next_node < 0 || other < next_node) {
          next_node = other;
          pick = ei;
        }
      }
      if (pick == edges.size()) break;
      edges[pick].used = true;
      vote += edges[pick].u == cur ? 1 : -1;
      nodes.push_back(next_node);
      cur = next_node;
      if (cur == start) break;
    }
  };

  auto to_points = [&](const std::vector<int>& ids) {
    std::vector<Point3> pts;
    pts.reserve(ids.size());
    for (int id : ids) pts.push_back(node_pos[id]);
    return pts;
  };

  std::vector<int> nodes;
  int vote = 0;
  // Open chains start at odd-degree nodes.
  for (std::size_t n = 0; n < adj.size(); ++n) {
    if (adj[n].size() % 2 == 0) continue;
    bool any = std::any_of(adj[n].begin(), adj[n].end(), [&](std::size_t e) { return !edges[e].used; });
    if (!any) continue;
    walk(static_cast<int>(n), nodes, vote);
    auto pts = to_points(nodes);
    if (vote < 0 || (vote == 0 && lex_less(pts.back(), pts.front()))) std::reverse(pts.begin(), pts.end());
    result.open.push_back(std::move(pts));
  }
  for (std::size_t n = 0; n < adj.size(); ++n) {
    for (;;) {
      bool any = std::any_of(adj[n].begin(), adj[n].end(), [&](std::size_t e) { return !edges[e].used; });
      if (!any) break;
      walk(static_cast<int>(n), nodes, vote);
      if (nodes.size() < 2) break;
      if (nodes.front() != nodes.back()) {
        auto pts = to_points(nodes);
        if (vote < 0 || (vote == 0 && lex_less(pts.back(), pts.front()))) std::reverse(pts.begin(), pts.end());
        result.open.push_back(std::move(pts));
        continue;
      }
      nodes.pop_back();
      auto pts = to_points(nodes);
      if (pts.size() < 3) continue;
      if (vote < 0) std::reverse(pts.begin(), pts.end());
      if (vote == 0) {
        rotate_to_min(pts);
        if (lex_less(pts.back(), pts[1])) std::reverse(pts.begin() + 1, pts.end());
      }
      rotate_to_min(pts);
      remove_collinear(pts, collinear_deg);
      rotate_to_min(pts);
      if (pts.size() >= 3) result.closed.push_back({std::move(pts), true});
    }
  }
  std::sort(result.closed.begin(), result.closed.end(),
            [](const Loop3D& a, const Loop3D& b) { return lex_less(a.points.front(), b.points.front()); });
  std::sort(result.open.begin(), result.open.end(),
            [](const auto& a, const auto& b) { return lex_less(a.front(), b.front()); });
  return result;
}

std::vector<Vec2> to_plane_2d(const Loop3D& loop, Axis axis) {
  std::vector<Vec2> out;
  out.reserve(loop.points.size());
  for (const auto& p : loop.points) out.push_back(drop(p, axis));
  return out;
}

Projection project_and_normalize(std::span<const Loop3D> loops, const Plane& plane, LoopSource source) {
  const auto axis = plane.axis();
  if (!axis) throw Error(ErrorCode::InvalidArgument, "slicer", "projection requires an axis-aligned plane");
  Projection out;
  std::vector<std::vector<Vec2>> flat;
  double xmin = INFINITY, ymin = INFINITY, xmax = -INFINITY, ymax = -INFINITY;
  bool usable = false;
  for (const auto& l : loops) {
    auto pts = to_plane_2d(l, *axis);
    double lx0 = INFINITY, ly0 = INFINITY, lx1 = -INFINITY, ly1 = -INFINITY;
    for (auto p : pts) {
      lx0 = std::min(lx0, p.x);
      ly0 = std::min(ly0, p.y);
      lx1 = std::max(lx1, p.x);
      ly1 = std::max(ly1, p.y);
    }
    if (std::hypot(lx1 - lx0, ly1 - ly0) >= 1e-6) usable = true;
    xmin = std::min(xmin, lx0);
    ymin = std::min(ymin, ly0);
    xmax = std::max(xmax, lx1);
    ymax = std::max(ymax, ly1);
    flat.push_back(std::move(pts));
  }
  if (!usable) throw Error(ErrorCode::DegenerateSlice, "slicer", "no loop with a usable extent");
  const double ext = std::max(xmax - xmin, ymax - ymin);
  out.norm.s = 0.9 / ext;
  out.norm.t_x = 0.5 * (xmin + xmax) - 0.5 / out.norm.s;
  out.norm.t_y = 0.5 * (ymin + ymax) - 0.5 / out.norm.s;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    Loop2D l;
    l.points.reserve(flat[i].size());
    for (auto p : flat[i]) l.points.push_back(out.norm.apply(p));
    l.orientation = signed_area(l.points) >= 0 ? Orientation::Ccw : Orientation::Cw;
    l.source = source;
    l.source.ordinal = static_cast<int>(i);
    out.loops.push_back(std::move(l));
  }
  return out;
}

SliceRecord slice_at(const Mesh& mesh, Axis axis, double offset, int index, const SliceConfig& cfg) {
  SliceRecord rec;
  rec.axis = axis;
  rec.index = index;
  rec.plane.normal = axis_unit(axis);
  rec.plane.origin = mesh.bounds().center();
  rec.plane.origin[static_cast<int>(axis)] = offset;
  const auto segs = slice_mesh(mesh, rec.plane);
  auto stitched = stitch_loops(segs, cfg.stitch_tol, cfg.collinear_deg);
  rec.loops = std::move(stitched.closed);
  for (auto& o : stitched.open) rec.open_chains.push_back({std::move(o), false});
  if (!rec.loops.empty()) {
    try {
      rec.norm = project_and_normalize(rec.loops, rec.plane).norm;
    } catch (const Error&) {
      rec.loops.clear();  // tangent slivers only
    }
  }
  return rec;
}

std::vector<SliceRecord> slice_all(const Mesh& mesh, const SliceConfig& cfg) {
  const auto planes = sample_planes(mesh, cfg.n_per_axis);
  std::vector<SliceRecord> out;
  out.reserve(planes.size());
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto axis = static_cast<Axis>(i / cfg.n_per_axis);
    const int k = static_cast<int>(i % cfg.n_per_axis);
    out.push_back(slice_at(mesh, axis, planes[i].origin[index(axis)], k, cfg));
  }
  return out;
}

}  // namespace slicecad
