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

#include "slicecad/extrude.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

constexpr const char* kModule = "extrude";

struct Box2 {
  Vec2 lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
  void add(Vec2 p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  bool overlaps(const Box2& o) const { return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y; }
};

bool rings_cross(std::span<const Vec2> a, std::span<const Vec2> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 a0 = a[i], a1 = a[(i + 1) % a.size()];
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a0, a1, b[j], b[(j + 1) % b.size()])) return true;
  }
  return false;
}

}  // namespace

NestingTree build_nesting(std::span<const Loop2D> loops) {
  const std::size_t n = loops.size();
  std::vector<Box2> boxes(n);
  std::vector<double> areas(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto p : loops[i].points) boxes[i].add(p);
    areas[i] = std::abs(signed_area(loops[i].points));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (boxes[i].overlaps(boxes[j]) && rings_cross(loops[i].points, loops[j].points))
        throw Error(ErrorCode::CrossingLoops, kModule, fmt::format("loops {} and {} intersect", i, j));

  NestingTree t{std::vector<int>(n, -1), std::vector<int>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (loops[i].points.empty()) continue;
    const Vec2 rep = loops[i].points.front();
    double best = INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || areas[j] <= areas[i]) continue;
      if (!point_in_polygon(rep, loops[j].points)) continue;
      if (areas[j] < best) {
        best = areas[j];
        t.parent[i] = static_cast<int>(j);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    int d = 0;
    for (int p = t.parent[i]; p >= 0 && d <= static_cast<int>(n); p = t.parent[p]) ++d;
    t.depth[i] = d;
  }
  return t;
}

std::vector<ExtrudeType> assign_types(const NestingTree& tree) {
  std::vector<ExtrudeType> out;
  out.reserve(tree.depth.size());
  for (int d : tree.depth) out.push_back(d % 2 == 0 ? ExtrudeType::New : ExtrudeType::Cut);
  return out;
}

std::vector<Point3> sample_anchors(const Loop3D& loop, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, kModule, "anchor count must be >= 1");
  const auto& p = loop.points;
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, kModule, "empty loop");
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i < p.size(); ++i) cum.push_back(cum.back() + norm(p[(i + 1) % p.size()] - p[i]));
  const double total = cum.back();
  std::vector<Point3> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double s = total * k / n;
    while (seg + 1 < p.size() && cum[seg + 1] <= s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double f = len > 0 ? (s - cum[seg]) / len : 0.0;
    const Point3 a = p[seg], b = p[(seg + 1) % p.size()];
    out.push_back(a + (b - a) * f);
  }
  return out;
}

Segment3 extrusion_vector(const Point3& anchor, double h, const Vec3& v) { return {anchor, anchor + v * h}; }

LossGrad loss_and_grad(std::span<const Point3> samples, std::span<const ExtrusionSpec> specs, double lambda) {
  if (samples.empty()) throw Error(ErrorCode::NoSamples, kModule, "no mesh samples");
  struct Vec {
    Point3 r;
    Vec3 v;
    double h;
    std::size_t spec;
  };
  std::vector<Vec> vecs;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (specs[j].type != ExtrudeType::New) continue;
    for (const auto& r : specs[j].anchors) vecs.push_back({r, specs[j].direction, specs[j].length, j});
  }
  if (vecs.empty()) throw Error(ErrorCode::NoSpecs, kModule, "no new-typed extrusion with anchors");

  LossGrad out;
  out.grad.assign(specs.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  double data = 0.0;
  for (const auto& q : samples) {
    double best = INFINITY;
    const Vec* arg = nullptr;
    bool at_tip = false;
    for (const auto& e : vecs) {
      const Vec3 w = q - e.r;
      const double proj = dot(w, e.v);
      const double t = std::clamp(proj, 0.0, e.h);
      const double d2 = norm2(w - e.v * t);
      if (d2 < best) {
        best = d2;
        arg = &e;
        at_tip = proj >= e.h;
      }
    }
    data += best;
    if (at_tip) {
      const Vec3 resid = q - arg->r - arg->v * arg->h;
      out.grad[arg->spec] += -2.0 * dot(resid, arg->v) * inv_n;
    }
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (specs[j].type != ExtrudeType::New) continue;
    reg += specs[j].length * specs[j].length;
    out.grad[j] += 2.0 * lambda * specs[j].length;
  }
  out.loss = data * inv_n + lambda * reg;
  return out;
}

std::vector<Point3> footprint_samples(std::span<const Point3> samples, std::span<const ExtrusionSpec> specs) {
  struct Foot {
    Axis axis;
    std::vector<Vec2> ring;
  };
  std::vector<Foot> feet;
  for (const auto& s : specs) {
    if (s.type != ExtrudeType::New || s.boundary.size() < 3) continue;
    const auto ax = s.plane.axis();
    if (!ax) continue;
    Foot f{*ax, {}};
    for (const auto& p : s.boundary) f.ring.push_back(drop(p, *ax));
    feet.push_back(std::move(f));
  }
  if (feet.empty()) return {samples.begin(), samples.end()};
  std::vector<Point3> out;
  for (const auto& q : samples) {
    for (const auto& f : feet) {
      const Vec2 p = drop(q, f.axis);
      if (point_in_polygon(p, f.ring) || distance_to_ring(p, f.ring) <= 1e-3) {
        out.push_back(q);
        break;
      }
    }
  }
  return out;
}

namespace {

std::vector<ExtrusionSpec> optimize_local(std::span<const Point3> samples, std::vector<ExtrusionSpec> specs,
                                          double extent, const OptConfig& cfg, OptTrace* trace) {
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < specs.size(); ++j)
    if (specs[j].type == ExtrudeType::New) free.push_back(j);
  if (free.empty()) throw Error(ErrorCode::NoSpecs, kModule, "no new-typed extrusion to optimize");
  if (samples.empty()) throw Error(ErrorCode::NoSamples, kModule, "no mesh samples");

  // Coordinate-wise grid search over (0, extent].
  const int nc = std::max(1, cfg.grid_candidates);
  auto candidate = [&](int k) { return extent * (k + 1) / nc; };
  for (auto j : free) specs[j].length = candidate(nc / 2);
  for (int sweep = 0; sweep < cfg.grid_sweeps; ++sweep)
    for (auto j : free) {
      double best = INFINITY, best_h = specs[j].length;
      for (int k = 0; k < nc; ++k) {
        specs[j].length = candidate(k);
        const double l = loss_and_grad(samples, specs, cfg.lambda).loss;
        if (l < best) {
          best = l;
          best_h = specs[j].length;
        }
      }
      specs[j].length = best_h;
    }
  if (trace) {
    trace->init_lengths.clear();
    for (auto j : free) trace->init_lengths.push_back(specs[j].length);
    trace->losses.clear();
    trace->increases = 0;
    trace->samples_used = samples.size();
  }

  std::vector<double> m(specs.size(), 0.0), v(specs.size(), 0.0);
  LossGrad cur = loss_and_grad(samples, specs, cfg.lambda);
  for (int it = 1; it <= cfg.iters; ++it) {
    std::vector<double> step(specs.size(), 0.0);
    const double bc1 = 1.0 - std::pow(cfg.beta1, it), bc2 = 1.0 - std::pow(cfg.beta2, it);
    for (auto j : free) {
      const double g = cur.grad[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      step[j] = cfg.lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg.eps);
    }
    const std::vector<ExtrusionSpec> before = specs;
    double scale = 1.0;
    LossGrad next;
    bool accepted = false;
    for (int half = 0; half <= cfg.max_halvings; ++half, scale *= 0.5) {
      for (auto j : free) specs[j].length = std::max(0.0, before[j].length - scale * step[j]);
      next = loss_and_grad(samples, specs, cfg.lambda);
      if (next.loss <= cur.loss) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (trace) ++trace->increases;
      specs = before;
      next = cur;
    }
    cur = std::move(next);
    if (trace) trace->losses.push_back(cur.loss);
  }
  return specs;
}

}  // namespace

std::vector<ExtrusionSpec> optimize_lengths_on(std::span<const Point3> samples, std::vector<ExtrusionSpec> specs,
                                               double extent, const OptConfig& cfg, OptTrace* trace) {
  if (samples.empty()) throw Error(ErrorCode::NoSamples, kModule, "no mesh samples");
  // Work relative to the sample bounds so results do not depend on placement.
  Point3 o = samples[0];
  for (const auto& p : samples) o = {std::min(o.x, p.x), std::min(o.y, p.y), std::min(o.z, p.z)};
  std::vector<Point3> local(samples.begin(), samples.end());
  for (auto& p : local) p = p - o;
  std::vector<ExtrusionSpec> shifted = specs;
  for (auto& s : shifted) {
    s.plane.origin = s.plane.origin - o;
    for (auto& a : s.anchors) a = a - o;
    for (auto& b : s.boundary) b = b - o;
  }
  shifted = optimize_local(local, std::move(shifted), extent, cfg, trace);
  for (std::size_t j = 0; j < specs.size(); ++j) specs[j].length = shifted[j].length;
  return specs;
}

std::vector<ExtrusionSpec> optimize_lengths(const Mesh& mesh, std::vector<ExtrusionSpec> specs, const OptConfig& cfg,
                                            OptTrace* trace) {
  if (std::none_of(specs.begin(), specs.end(), [](const auto& s) { return s.type == ExtrudeType::New; }))
    throw Error(ErrorCode::NoSpecs, kModule, "no new-typed extrusion to optimize");
  auto samples = sample_surface_points(mesh, static_cast<std::size_t>(cfg.n_samples), cfg.seed);
  if (cfg.scope == LossScope::Footprint) samples = footprint_samples(samples, specs);
  if (samples.empty()) throw Error(ErrorCode::NoSamples, kModule, "no mesh samples inside the sketch footprints");
  // Longest reach along any spec direction inside the mesh bounds.
  const BoundingBox bb = mesh.bounds();
  double extent = 0.0;
  for (const auto& s : specs) {
    if (s.type != ExtrudeType::New) continue;
    const Vec3& d = s.direction;
    const double o = dot(s.plane.origin, d);
    double hi = -INFINITY;
    for (int corner = 0; corner < 8; ++corner) {
      const Vec3 c{corner & 1 ? bb.max.x : bb.min.x, corner & 2 ? bb.max.y : bb.min.y, corner & 4 ? bb.max.z : bb.min.z};
      hi = std::max(hi, dot(c, d));
    }
    extent = std::max(extent, hi - o);
  }
  if (!(extent > 0.0)) extent = bb.max_extent();
  return optimize_lengths_on(samples, std::move(specs), extent, cfg, trace);
}

}  // namespace slicecad
