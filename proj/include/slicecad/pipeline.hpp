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

#include <span>
#include <string>
#include <vector>

#include "slicecad/cad_model.hpp"
#include "slicecad/config.hpp"
#include "slicecad/constraints.hpp"
#include "slicecad/datagen.hpp"
#include "slicecad/extrude.hpp"
#include "slicecad/geometry.hpp"
#include "slicecad/plane_detect.hpp"
#include "slicecad/sketch_fit.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

/// One closed profile loop of a key plane, fitted and constrained.
struct LoopResult {
  int key = 0;      // index into the key list the loops were fitted on
  int ordinal = 0;  // loop index within the key profile
  Loop2D loop;      // normalized to the key's unit frame
  Loop3D boundary;  // loop on the key plane, normalized mesh frame
  FitReport fit;
  ConstrainedSketch sketch;
  bool solved = false;
  bool reduced = false;
  ExtrudeType type = ExtrudeType::New;
  int parent = -1;  // loop ordinal of the enclosing loop on the same key
};

struct KeyFrame {
  SliceRecord record;  // profile moved onto the base level, with its unit-frame normalization
  std::vector<int> loops;  // indices into the loop list
};

struct StageTimings {
  double slice = 0.0, detect = 0.0, fit = 0.0, optimize = 0.0, assemble = 0.0;
  double total() const { return slice + detect + fit + optimize + assemble; }
};

struct Reconstruction {
  std::vector<SliceRecord> slices;
  Detection detection;
  std::vector<KeyPlane> keys;    // subset of detection.keys that was fitted
  std::vector<KeyFrame> frames;  // aligned with keys
  std::vector<LoopResult> loops;
  std::vector<ExtrusionSpec> specs;  // aligned with loops, normalized mesh frame
  OptTrace trace;
  CadModel model;  // input mesh frame
  bool valid = false;
  std::string invalid_reason;
  StageTimings timings;
};

/// Keys of one axis. Each keyed axis decomposes the whole solid into bands on
/// its own, so mixing axes only duplicates material. Ties go to the axis with
/// the thinnest mesh extent, then to the highest axis index.
std::vector<KeyPlane> select_key_axis(std::span<const KeyPlane> keys, const Mesh& mesh);

/// Moves every key profile onto its base level and fits each loop.
/// Keys whose profile cannot be normalized contribute no loops.
std::vector<LoopResult> fit_key_loops(std::span<const KeyPlane> keys, const PipelineConfig& cfg,
                                      std::vector<KeyFrame>* frames = nullptr);

std::vector<ExtrusionSpec> build_specs(const std::vector<LoopResult>& loops, std::span<const KeyPlane> keys,
                                       int n_anchors);

/// Keys the pipeline fits: all detected keys, or one axis of them when
/// `cfg.single_axis` is set.
std::vector<KeyPlane> pipeline_keys(const Detection& detection, const Mesh& mesh, const PipelineConfig& cfg);

CadModel assemble_model(const std::vector<KeyFrame>& frames, const std::vector<LoopResult>& loops,
                        const std::vector<ExtrusionSpec>& specs, const BBoxTransform& to_original);

/// Full pipeline on a normalized mesh. Stage errors propagate; an assembled
/// model that does not tessellate to a watertight solid is returned with
/// `valid == false`.
Reconstruction reconstruct(const LoadedMesh& input, const PipelineConfig& cfg, std::string source = {});

/// Canonicalized sketch planes of a model, optionally mapped into another
/// frame. Duplicate planes are merged.
std::vector<Plane> canonical_planes(const CadModel& model, const BBoxTransform* to_frame = nullptr);

struct DisplaceOutcome {
  bool ok = false;
  std::string error;
  int step = -1;  // edited step of the reconstruction
  ConstraintRef anchor;
  double cd_base = 0.0;
  double cd_constrained = 0.0;
  double cd_unconstrained = 0.0;
  double iou_constrained = 0.0;
  double iou_unconstrained = 0.0;
  bool unconstrained_valid = false;  // the stripped edit can leave a self-intersecting profile
  std::string unconstrained_error;
  double max_residual = 0.0;  // constrained sketch after the edit
  int iterations = 0;
  bool nonconvergence = false;
};

/// Applies a sketch-frame displacement to the nearest anchor of a
/// reconstructed model, solving with and without its constraints, and
/// compares both edits against the displaced ground truth.
DisplaceOutcome apply_displacement(const CadModel& reconstructed, const Displacement& d,
                                   const CadModel& gt_displaced, const Mesh& gt_displaced_solid,
                                   const PipelineConfig& cfg);

}  // namespace slicecad
