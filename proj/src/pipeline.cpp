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

#include "slicecad/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "slicecad/error.hpp"
#include "slicecad/metrics.hpp"

namespace slicecad {
namespace {

constexpr const char* kModule = "pipeline";

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

Loop3D flatten_onto(const Loop3D& loop, Axis a, double offset) {
  Loop3D out = loop;
  for (auto& p : out.points) p[index(a)] = offset;
  return out;
}

}  // namespace

std::vector<KeyPlane> select_key_axis(std::span<const KeyPlane> keys, const Mesh& mesh) {
  const BoundingBox bb = mesh.bounds();
  int chosen = -1;
  for (int a = 2; a >= 0; --a) {
    if (std::none_of(keys.begin(), keys.end(), [&](const KeyPlane& k) { return index(k.axis) == a; })) continue;
    if (chosen < 0 || bb.extent()[a] < bb.extent()[chosen] - 1e-9) chosen = a;
  }
  std::vector<KeyPlane> out;
  for (const auto& k : keys)
    if (index(k.axis) == chosen) out.push_back(k);
  return out;
}

std::vector<KeyPlane> pipeline_keys(const Detection& detection, const Mesh& mesh, const PipelineConfig& cfg) {
  if (cfg.single_axis) return select_key_axis(detection.keys, mesh);
  return detection.keys;
}

std::vector<LoopResult> fit_key_loops(std::span<const KeyPlane> keys, const PipelineConfig& cfg,
                                      std::vector<KeyFrame>* frames) {
  std::vector<LoopResult> out;
  std::vector<KeyFrame> local;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const KeyPlane& key = keys[k];
    KeyFrame frame;
    frame.record = key.profile;
    frame.record.plane.origin[index(key.axis)] = key.offset;
    for (auto& l : frame.record.loops) l = flatten_onto(l, key.axis, key.offset);
    frame.record.open_chains.clear();

    Projection proj;
    NestingTree tree;
    try {
      proj = project_and_normalize(frame.record.loops, frame.record.plane,
                                   LoopSource{key.axis, frame.record.index, 0});
      tree = build_nesting(proj.loops);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSlice) throw;
      local.push_back(std::move(frame));
      continue;
    }
    frame.record.norm = proj.norm;
    const auto types = assign_types(tree);

    for (std::size_t l = 0; l < proj.loops.size(); ++l) {
      LoopResult r;
      r.key = static_cast<int>(k);
      r.ordinal = static_cast<int>(l);
      r.loop = proj.loops[l];
      r.boundary = frame.record.loops[l];
      r.type = types[l];
      r.parent = tree.parent[l];
      FitResult fit = fit_primitives(r.loop, cfg.fit);
      r.fit = std::move(fit.report);
      if (cfg.constraints) {
        ReconstructedSketch rs = reconstruct_constraints(fit.primitives, cfg.tol, cfg.solve);
        r.sketch = std::move(rs.sketch);
        r.solved = rs.solved;
        r.reduced = rs.reduced;
      } else {
        r.sketch.primitives = std::move(fit.primitives);
        r.solved = true;
      }
      frame.loops.push_back(static_cast<int>(out.size()));
      out.push_back(std::move(r));
    }
    local.push_back(std::move(frame));
  }
  if (frames) *frames = std::move(local);
  return out;
}

std::vector<ExtrusionSpec> build_specs(const std::vector<LoopResult>& loops, std::span<const KeyPlane> keys,
                                       int n_anchors) {
  std::vector<ExtrusionSpec> specs;
  specs.reserve(loops.size());
  for (const auto& r : loops) {
    const KeyPlane& key = keys[static_cast<std::size_t>(r.key)];
    ExtrusionSpec s;
    s.plane.normal = axis_unit(key.axis);
    s.plane.origin = key.profile.plane.origin;
    s.plane.origin[index(key.axis)] = key.offset;
    s.type = r.type;
    s.direction = axis_unit(key.axis);
    s.anchors = sample_anchors(r.boundary, n_anchors);
    s.boundary = r.boundary.points;
    s.loop_parent = r.parent;
    specs.push_back(std::move(s));
  }
  return specs;
}

CadModel assemble_model(const std::vector<KeyFrame>& frames, const std::vector<LoopResult>& loops,
                        const std::vector<ExtrusionSpec>& specs, const BBoxTransform& to_original) {
  if (loops.size() != specs.size())
    throw Error(ErrorCode::IndexMismatch, kModule,
                fmt::format("{} loops but {} extrusion specs", loops.size(), specs.size()));
  std::vector<SliceRecord> records;
  std::vector<std::vector<ConstrainedSketch>> sketches;
  std::vector<std::vector<ExtrusionSpec>> grouped;
  for (const auto& f : frames) {
    if (f.loops.empty()) continue;
    records.push_back(f.record);
    auto& sk = sketches.emplace_back();
    auto& sp = grouped.emplace_back();
    for (int li : f.loops) {
      sk.push_back(loops.at(static_cast<std::size_t>(li)).sketch);
      sp.push_back(specs.at(static_cast<std::size_t>(li)));
    }
  }
  return assemble(records, sketches, grouped, &to_original);
}

Reconstruction reconstruct(const LoadedMesh& input, const PipelineConfig& cfg, std::string source) {
  if (input.mesh.faces.empty()) throw Error(ErrorCode::EmptyMesh, kModule, "mesh has no faces");
  Reconstruction r;
  Stopwatch clock;
  r.slices = slice_all(input.mesh, cfg.slice);
  r.timings.slice = clock.lap();

  r.detection = detect_key_planes(input.mesh, r.slices, cfg.detect, cfg.slice);
  r.timings.detect = clock.lap();

  r.keys = pipeline_keys(r.detection, input.mesh, cfg);
  r.loops = fit_key_loops(r.keys, cfg, &r.frames);
  r.timings.fit = clock.lap();

  if (r.loops.empty()) throw Error(ErrorCode::NoSteps, kModule, "no closed profile loop on any key plane");
  OptConfig opt = cfg.opt;
  opt.seed = cfg.seed;
  r.specs = optimize_lengths(input.mesh, build_specs(r.loops, r.keys, opt.n_anchors), opt, &r.trace);
  r.timings.optimize = clock.lap();

  r.model = assemble_model(r.frames, r.loops, r.specs, input.transform);
  r.model.source = std::move(source);
  r.model.config_hash = config_hash(cfg);
  try {
    const Mesh solid = tessellate(r.model);
    if (solid.faces.empty()) r.invalid_reason = "tessellation produced no faces";
    else if (!solid.is_watertight()) r.invalid_reason = "tessellated solid is not watertight";
  } catch (const Error& e) {
    r.invalid_reason = e.what();
  }
  r.valid = r.invalid_reason.empty();
  r.timings.assemble = clock.lap();
  return r;
}

std::vector<Plane> canonical_planes(const CadModel& model, const BBoxTransform* to_frame) {
  std::vector<Plane> out;
  for (const auto& s : model.steps) {
    Plane p;
    if (s.type == ExtrudeType::New && s.length > 0.0) {
      p = canonicalize_extrusion_plane(s.plane.origin, s.direction, s.length, 0.0, ExtentType::OneSided);
    } else {
      p.origin = s.plane.origin;
      p.normal = {std::abs(s.plane.normal.x), std::abs(s.plane.normal.y), std::abs(s.plane.normal.z)};
    }
    if (to_frame) p.origin = to_frame->apply(p.origin);
    const auto same = [&](const Plane& q) {
      return q.normal == p.normal && std::abs(dot(q.origin - p.origin, p.normal)) < 1e-9;
    };
    if (std::none_of(out.begin(), out.end(), same)) out.push_back(p);
  }
  return out;
}

DisplaceOutcome apply_displacement(const CadModel& reconstructed, const Displacement& d,
                                   const CadModel& gt_displaced, const Mesh& gt_displaced_solid,
                                   const PipelineConfig& cfg) {
  DisplaceOutcome out;
  const auto n_eval = static_cast<std::size_t>(cfg.eval_points);
  try {
    out.cd_base = chamfer_distance(tessellate(reconstructed), gt_displaced_solid, n_eval, cfg.seed);

    const Axis sketch_axis = gt_displaced.steps.empty() ? Axis::Z : gt_displaced.steps.front().axis();
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_u;
    for (std::size_t i = 0; i < reconstructed.steps.size(); ++i) {
      const CadStep& s = reconstructed.steps[i];
      if (s.type != ExtrudeType::New || s.axis() != sketch_axis) continue;
      for (std::size_t p = 0; p < s.sketch.primitives.size(); ++p) {
        const Primitive& prim = s.sketch.primitives[p];
        const std::vector<Anchor> anchors = prim.kind == PrimitiveKind::Circle
                                                ? std::vector<Anchor>{Anchor::Center}
                                                : std::vector<Anchor>{Anchor::Start, Anchor::Mid, Anchor::End};
        for (Anchor a : anchors) {
          const auto u = anchor_point(prim, a);
          if (!u) continue;
          const double dist = norm(s.norm.invert(*u) - d.point);
          if (dist < best) {
            best = dist;
            best_u = *u;
            out.step = static_cast<int>(i);
            out.anchor = {static_cast<int>(p), a};
          }
        }
      }
    }
    if (out.step < 0) throw Error(ErrorCode::NoSteps, kModule, "reconstruction has no new step on the sketch axis");

    const CadStep& step = reconstructed.steps[static_cast<std::size_t>(out.step)];
    const Pin pin{out.anchor, best_u + d.vector * step.norm.s};

    CadModel constrained = reconstructed;
    SolveReport rep;
    try {
      constrained.steps[static_cast<std::size_t>(out.step)].sketch = solve(step.sketch, {&pin, 1}, cfg.solve, &rep);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonConvergence) out.nonconvergence = true;
      throw;
    }
    out.iterations = rep.iterations;
    out.max_residual = rep.max_residual;

    out.cd_constrained = chamfer_distance(tessellate(constrained), gt_displaced_solid, n_eval, cfg.seed);
    out.iou_constrained = iou(constrained, gt_displaced, cfg.voxel_res);

    CadModel stripped = reconstructed;
    ConstrainedSketch bare{step.sketch.primitives, {}};
    stripped.steps[static_cast<std::size_t>(out.step)].sketch = solve(bare, {&pin, 1}, cfg.solve);
    TessellationOptions gaps;
    gaps.allow_gaps = true;
    try {
      out.cd_unconstrained = chamfer_distance(tessellate(stripped, gaps), gt_displaced_solid, n_eval, cfg.seed);
      out.iou_unconstrained = iou(stripped, gt_displaced, cfg.voxel_res, gaps);
      out.unconstrained_valid = true;
    } catch (const Error& e) {
      out.unconstrained_error = e.what();
    }
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace slicecad
