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

#include "slicecad/cad_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "slicecad/error.hpp"
#include "slicecad/triangulate.hpp"

namespace slicecad {

namespace {

constexpr const char* kModule = "cad_model";

Axis require_axis(const Plane& p) {
  const auto a = p.axis();
  if (!a) throw Error(ErrorCode::InvalidArgument, kModule, "only axis-aligned sketch planes are supported");
  return *a;
}

// Extent of the prism along the plane axis, always lo <= hi.
std::pair<double, double> prism_range(const CadStep& s) {
  const Axis a = s.axis();
  const double base = s.plane.origin[index(a)];
  const double top = base + s.length * (s.direction[index(a)] >= 0 ? 1.0 : -1.0);
  return {std::min(base, top), std::max(base, top)};
}

std::vector<std::vector<Vec2>> hole_rings(const CadModel& m, std::size_t parent, const TessellationOptions& opt) {
  std::vector<std::vector<Vec2>> holes;
  for (std::size_t j = 0; j < m.steps.size(); ++j)
    if (m.steps[j].type == ExtrudeType::Cut && m.steps[j].parent == static_cast<int>(parent))
      holes.push_back(step_profile(m.steps[j], opt));
  return holes;
}

// Even-odd crossing count over all rings.
bool inside_rings(Vec2 p, const std::vector<std::vector<Vec2>>& rings) {
  bool in = false;
  for (const auto& r : rings)
    if (point_in_polygon(p, r)) in = !in;
  return in;
}

}  // namespace

std::string_view to_string(ExtrudeType t) { return t == ExtrudeType::New ? "new" : "cut"; }

Axis CadStep::axis() const { return require_axis(plane); }

CadModel assemble(std::span<const SliceRecord> slices, const std::vector<std::vector<ConstrainedSketch>>& sketches,
                  const std::vector<std::vector<ExtrusionSpec>>& specs, const BBoxTransform* to_original) {
  if (sketches.size() != slices.size() || specs.size() != slices.size())
    throw Error(ErrorCode::IndexMismatch, kModule,
                fmt::format("{} slices, {} sketch lists, {} spec lists", slices.size(), sketches.size(), specs.size()));
  struct Item {
    std::size_t slice, loop;
    int depth;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (sketches[i].size() != specs[i].size())
      throw Error(ErrorCode::IndexMismatch, kModule,
                  fmt::format("slice {}: {} sketches but {} extrusions", i, sketches[i].size(), specs[i].size()));
    for (std::size_t l = 0; l < specs[i].size(); ++l) {
      int depth = 0;
      for (int p = specs[i][l].loop_parent; p >= 0 && depth <= static_cast<int>(specs[i].size()); ++depth) {
        if (static_cast<std::size_t>(p) >= specs[i].size())
          throw Error(ErrorCode::IndexMismatch, kModule, fmt::format("slice {} loop {}: bad parent {}", i, l, p));
        p = specs[i][p].loop_parent;
      }
      items.push_back({i, l, depth});
    }
  }
  if (items.empty()) throw Error(ErrorCode::NoSteps, kModule, "no sketch loops to assemble");
  std::stable_sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
    const auto& sa = slices[a.slice];
    const auto& sb = slices[b.slice];
    return std::tuple(index(sa.axis), sa.index, a.depth, a.loop) < std::tuple(index(sb.axis), sb.index, b.depth, b.loop);
  });

  CadModel model;
  std::map<std::pair<std::size_t, std::size_t>, int> step_of;
  for (const auto& it : items) {
    const SliceRecord& rec = slices[it.slice];
    const ExtrusionSpec& spec = specs[it.slice][it.loop];
    CadStep s;
    s.sketch = sketches[it.slice][it.loop];
    s.plane = spec.plane;
    s.type = spec.type;
    s.direction = spec.direction;
    s.length = spec.type == ExtrudeType::New ? spec.length : 0.0;
    s.norm = rec.norm;
    s.slice_index = rec.index;
    s.loop_ordinal = static_cast<int>(it.loop);
    if (spec.loop_parent >= 0) {
      const auto found = step_of.find({it.slice, static_cast<std::size_t>(spec.loop_parent)});
      s.parent = found == step_of.end() ? -1 : found->second;
    }
    if (to_original) {
      const Axis a = require_axis(s.plane);
      const double k = to_original->scale;
      s.plane.origin = to_original->invert(s.plane.origin);
      s.length /= k;
      const Vec2 tr = drop(to_original->translate, a);
      s.norm = {(s.norm.t_x - tr.x) / k, (s.norm.t_y - tr.y) / k, s.norm.s * k};
    }
    step_of[{it.slice, it.loop}] = static_cast<int>(model.steps.size());
    model.steps.push_back(std::move(s));
  }
  return model;
}

std::vector<Vec2> step_profile(const CadStep& step, const TessellationOptions& opt) {
  const Loop2D loop = sketch_to_loop(step.sketch.primitives, opt);
  std::vector<Vec2> out;
  out.reserve(loop.points.size());
  for (auto p : loop.points) out.push_back(step.norm.invert(p));
  return out;
}

Point3 step_point(const CadStep& step, Vec2 plane_local, double h) {
  const Axis a = step.axis();
  const double sign = step.direction[index(a)] >= 0 ? 1.0 : -1.0;
  return lift(plane_local, a, step.plane.origin[index(a)] + sign * h);
}

Mesh tessellate(const CadModel& model, const TessellationOptions& opt) {
  Mesh out;
  for (std::size_t i = 0; i < model.steps.size(); ++i) {
    const CadStep& s = model.steps[i];
    if (s.type != ExtrudeType::New || !(s.length > 0.0)) continue;
    const Axis a = s.axis();
    const auto [lo, hi] = prism_range(s);
    std::vector<std::vector<Vec2>> rings;
    rings.push_back(clean_ring(step_profile(s, opt)));
    for (auto& h : hole_rings(model, i, opt)) rings.push_back(clean_ring(h));
    const auto tris = triangulate_polygon(rings[0], std::span(rings).subspan(1));

    Mesh prism;
    std::size_t n = 0;
    for (const auto& r : rings) n += r.size();
    for (double level : {lo, hi})
      for (const auto& r : rings)
        for (auto p : r) prism.vertices.push_back(lift(p, a, level));
    const auto N = static_cast<std::uint32_t>(n);
    for (const auto& t : tris) {
      prism.faces.push_back({t[0], t[2], t[1]});
      prism.faces.push_back({t[0] + N, t[1] + N, t[2] + N});
    }
    std::uint32_t base = 0;
    for (std::size_t r = 0; r < rings.size(); ++r) {
      const auto m = static_cast<std::uint32_t>(rings[r].size());
      // Outer ring walks counter-clockwise, holes clockwise.
      const bool ccw = signed_area(rings[r]) > 0;
      const bool forward = (r == 0) == ccw;
      for (std::uint32_t k = 0; k < m; ++k) {
        std::uint32_t p = base + k, q = base + (k + 1) % m;
        if (!forward) std::swap(p, q);
        prism.faces.push_back({p, q, q + N});
        prism.faces.push_back({p, q + N, p + N});
      }
      base += m;
    }
    out.append(prism);
  }
  return out;
}

std::size_t VoxelGrid::count() const {
  return static_cast<std::size_t>(std::count(occ.begin(), occ.end(), std::uint8_t{1}));
}

double VoxelGrid::voxel_volume() const {
  if (frame.empty() || res <= 0) return 0.0;
  const Vec3 e = frame.extent();
  return e.x * e.y * e.z / (static_cast<double>(res) * res * res);
}

Point3 VoxelGrid::center(int i, int j, int k) const {
  const Vec3 e = frame.extent();
  return {frame.min.x + (i + 0.5) * e.x / res, frame.min.y + (j + 0.5) * e.y / res, frame.min.z + (k + 0.5) * e.z / res};
}

BoundingBox model_bounds(const CadModel& model, const TessellationOptions& opt) {
  BoundingBox bb;
  for (const auto& s : model.steps) {
    if (s.type != ExtrudeType::New || !(s.length > 0.0)) continue;
    const Axis a = s.axis();
    const auto [lo, hi] = prism_range(s);
    for (auto p : step_profile(s, opt)) {
      bb.extend(lift(p, a, lo));
      bb.extend(lift(p, a, hi));
    }
  }
  return bb;
}

VoxelGrid voxelize(const CadModel& model, int res, const std::optional<BoundingBox>& frame,
                   const TessellationOptions& opt) {
  if (res < 1) throw Error(ErrorCode::InvalidArgument, kModule, "voxel resolution must be >= 1");
  VoxelGrid g;
  g.res = res;
  g.frame = frame ? *frame : model_bounds(model, opt);
  g.occ.assign(static_cast<std::size_t>(res) * res * res, 0);
  if (g.frame.empty()) return g;
  const Vec3 e = g.frame.extent();
  auto coord = [&](int axis, int i) { return g.frame.min[axis] + (i + 0.5) * e[axis] / res; };

  for (std::size_t si = 0; si < model.steps.size(); ++si) {
    const CadStep& s = model.steps[si];
    const bool is_new = s.type == ExtrudeType::New;
    if (!is_new && s.parent >= 0) continue;  // already a hole in its parent
    if (is_new && !(s.length > 0.0)) continue;
    const Axis a = s.axis();
    const int ai = index(a), ui = in_plane_u(a), vi = in_plane_v(a);
    std::vector<std::vector<Vec2>> rings{step_profile(s, opt)};
    if (is_new)
      for (auto& h : hole_rings(model, si, opt)) rings.push_back(std::move(h));
    const auto [lo, hi] = prism_range(s);
    int idx[3];
    for (int u = 0; u < res; ++u)
      for (int v = 0; v < res; ++v) {
        if (!inside_rings({coord(ui, u), coord(vi, v)}, rings)) continue;
        idx[ui] = u;
        idx[vi] = v;
        for (int w = 0; w < res; ++w) {
          idx[ai] = w;
          if (is_new) {
            const double c = coord(ai, w);
            if (c >= lo && c <= hi) g.occ[g.index(idx[0], idx[1], idx[2])] = 1;
          } else {
            g.occ[g.index(idx[0], idx[1], idx[2])] = 0;
          }
        }
      }
  }
  return g;
}

Json model_to_json(const CadModel& model) {
  Json steps = Json::array();
  for (const auto& s : model.steps) {
    steps.push_back({
        {"plane", {{"origin", to_json(s.plane.origin)}, {"normal", to_json(s.plane.normal)}}},
        {"type", std::string(to_string(s.type))},
        {"direction", to_json(s.direction)},
        {"length", s.length},
        {"sketch", to_json(s.sketch)},
        {"norm", {{"t_x", s.norm.t_x}, {"t_y", s.norm.t_y}, {"s", s.norm.s}}},
        {"slice_index", s.slice_index},
        {"loop_ordinal", s.loop_ordinal},
        {"parent", s.parent},
    });
  }
  return {{"format", "slicecad-model"}, {"version", 1}, {"source", model.source},
          {"config_hash", model.config_hash}, {"steps", steps}};
}

CadModel model_from_json(const Json& j) {
  CadModel m;
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, kModule, "/: expected an object");
  const Json& steps = require(j, "steps", "");
  if (!steps.is_array()) throw Error(ErrorCode::SchemaError, kModule, "/steps: expected an array");
  if (j.contains("source") && j["source"].is_string()) m.source = j["source"].get<std::string>();
  if (j.contains("config_hash") && j["config_hash"].is_string()) m.config_hash = j["config_hash"].get<std::string>();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string p = "/steps/" + std::to_string(i);
    const Json& sj = steps[i];
    CadStep s;
    const Json& plane = require(sj, "plane", p);
    s.plane.origin = vec3_from_json(require(plane, "origin", p + "/plane"), p + "/plane/origin");
    s.plane.normal = vec3_from_json(require(plane, "normal", p + "/plane"), p + "/plane/normal");
    if (!s.plane.axis())
      throw Error(ErrorCode::SchemaError, kModule, p + "/plane/normal: must be an axis direction");
    const std::string type = require_string(sj, "type", p);
    if (type == "new") s.type = ExtrudeType::New;
    else if (type == "cut") s.type = ExtrudeType::Cut;
    else throw Error(ErrorCode::SchemaError, kModule, p + "/type: expected \"new\" or \"cut\"");
    s.direction = vec3_from_json(require(sj, "direction", p), p + "/direction");
    s.length = require_number(sj, "length", p);
    if (s.length < 0) throw Error(ErrorCode::SchemaError, kModule, p + "/length: must be >= 0");
    s.sketch = sketch_from_json(require(sj, "sketch", p), p + "/sketch");
    if (sj.contains("norm")) {
      const Json& nj = sj["norm"];
      s.norm = {require_number(nj, "t_x", p + "/norm"), require_number(nj, "t_y", p + "/norm"),
                require_number(nj, "s", p + "/norm")};
    }
    if (!(s.norm.s > 0)) throw Error(ErrorCode::SchemaError, kModule, p + "/norm/s: must be > 0");
    s.slice_index = sj.value("slice_index", 0);
    s.loop_ordinal = sj.value("loop_ordinal", static_cast<int>(i));
    s.parent = sj.value("parent", -1);
    if (s.parent >= static_cast<int>(steps.size()))
      throw Error(ErrorCode::SchemaError, kModule, p + "/parent: step index out of range");
    m.steps.push_back(std::move(s));
  }
  return m;
}

void save_model(const CadModel& model, const std::filesystem::path& path) { write_json_file(model_to_json(model), path); }

CadModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

}  // namespace slicecad
