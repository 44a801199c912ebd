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

#include "slicecad/metrics.hpp"

#include <algorithm>
#include <random>

#include "slicecad/error.hpp"
#include "slicecad/kdtree.hpp"

namespace slicecad {

PointSet normalize_unit(std::span<const Point3> pts) {
  BoundingBox bb;
  for (const auto& p : pts) bb.extend(p);
  const Vec3 c = bb.center();
  const double s = bb.max_extent();
  const double inv = s > 0 ? 1.0 / s : 1.0;
  PointSet out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({(p.x - c.x) * inv, (p.y - c.y) * inv, (p.z - c.z) * inv});
  return out;
}

double chamfer_points(std::span<const std::array<double, 3>> a, std::span<const std::array<double, 3>> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyMesh, "metrics", "empty point set");
  const KdTree<3> ta(PointSet(a.begin(), a.end())), tb(PointSet(b.begin(), b.end()));
  return 0.5 * mean_nearest_sq<3>(a, tb) + 0.5 * mean_nearest_sq<3>(b, ta);
}

double chamfer_distance(const Mesh& a, const Mesh& b, std::size_t n, std::uint64_t seed) {
  if (a.faces.empty() || b.faces.empty()) throw Error(ErrorCode::EmptyMesh, "metrics", "mesh has no faces");
  const auto pa = normalize_unit(sample_surface_points(a, n, mix_seed(seed, a.shape_hash())));
  const auto pb = normalize_unit(sample_surface_points(b, n, mix_seed(seed, b.shape_hash())));
  return chamfer_points(pa, pb);
}

double EdgeSet::length() const {
  double l = 0.0;
  for (const auto& s : segments) l += norm(s.b - s.a);
  return l;
}

EdgeSet model_edges(const CadModel& model, const TessellationOptions& opt) {
  EdgeSet out;
  auto add_ring = [&](const CadStep& s, const std::vector<Vec2>& ring, double h) {
    for (std::size_t i = 0; i < ring.size(); ++i)
      out.segments.push_back({step_point(s, ring[i], h), step_point(s, ring[(i + 1) % ring.size()], h)});
  };
  for (const auto& s : model.steps) {
    double h = s.length;
    bool capped = s.type == ExtrudeType::New;
    if (s.type == ExtrudeType::Cut && s.parent >= 0 && static_cast<std::size_t>(s.parent) < model.steps.size()) {
      h = model.steps[s.parent].length;
      capped = true;
    }
    const auto ring = step_profile(s, opt);
    add_ring(s, ring, 0.0);
    if (!capped || !(h > 0.0)) continue;
    add_ring(s, ring, h);
    for (auto c : chain_corners(s.sketch.primitives)) {
      const Vec2 p = s.norm.invert(c);
      out.segments.push_back({step_point(s, p, 0.0), step_point(s, p, h)});
    }
  }
  return out;
}

std::vector<Point3> sample_edges(const EdgeSet& edges, std::size_t m, std::uint64_t seed) {
  std::vector<double> cdf;
  cdf.reserve(edges.segments.size());
  double total = 0.0;
  for (const auto& s : edges.segments) cdf.push_back(total += norm(s.b - s.a));
  if (!(total > 0.0)) throw Error(ErrorCode::NoEdges, "metrics", "model has no edge length");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Point3> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = U(rng) * total;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    i = std::min(i, cdf.size() - 1);
    const double start = i == 0 ? 0.0 : cdf[i - 1];
    const double len = cdf[i] - start;
    const double f = len > 0 ? std::clamp((u - start) / len, 0.0, 1.0) : 0.0;
    out.push_back(edges.segments[i].a + (edges.segments[i].b - edges.segments[i].a) * f);
  }
  return out;
}

std::uint64_t model_hash(const CadModel& model) {
  const std::string s = model_to_json(model).dump();
  return fnv1a(s.data(), s.size());
}

double edge_chamfer_distance(const CadModel& a, const CadModel& b, std::size_t m, std::uint64_t seed) {
  const auto pa = normalize_unit(sample_edges(model_edges(a), m, mix_seed(seed, model_hash(a))));
  const auto pb = normalize_unit(sample_edges(model_edges(b), m, mix_seed(seed, model_hash(b))));
  return chamfer_points(pa, pb);
}

double iou(const CadModel& a, const CadModel& b, int res, const TessellationOptions& opt) {
  BoundingBox frame = model_bounds(a, opt);
  frame.extend(model_bounds(b, opt));
  if (frame.empty()) throw Error(ErrorCode::EmptyOccupancy, "metrics", "both models are empty");
  const VoxelGrid ga = voxelize(a, res, frame, opt), gb = voxelize(b, res, frame, opt);
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < ga.occ.size(); ++i) {
    inter += ga.occ[i] && gb.occ[i];
    uni += ga.occ[i] || gb.occ[i];
  }
  if (uni == 0) throw Error(ErrorCode::EmptyOccupancy, "metrics", "both occupancy grids are empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool is_valid_model(const CadModel& model) {
  try {
    const Mesh m = tessellate(model);
    return !m.faces.empty() && m.is_watertight();
  } catch (const Error&) {
    return false;
  }
}

double invalidity(std::span<const std::optional<CadModel>> attempts) {
  if (attempts.empty()) return 0.0;
  std::size_t bad = 0;
  for (const auto& a : attempts) bad += !a || !is_valid_model(*a);
  return static_cast<double>(bad) / static_cast<double>(attempts.size());
}

}  // namespace slicecad
