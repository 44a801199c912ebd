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
#include <vector>

#include "slicecad/sketch.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

struct FitConfig {
  double corner_angle_deg = 25.0;
  double line_tol = 0.005;
  double arc_tol = 0.005;
  double circle_tol = 0.005;
  int max_split_depth = 12;
  double noise_amplitude = 0.02;  // zig-zags closer than this to their chord count as noise
};

struct FitReport {
  double max_residual = 0.0;
  std::vector<double> residuals;  // one per primitive
  std::vector<int> corners;       // loop indices treated as corners
  bool smoothed = false;
  bool unfittable = false;  // some span fell back to a polyline
};

struct FitResult {
  std::vector<Primitive> primitives;
  FitReport report;
};

/// Algebraic least-squares circle followed by one geometric refinement step.
std::optional<Circle2> fit_circle(std::span<const Vec2> pts);

/// Largest distance from any point of the polyline edges to the primitive,
/// computed exactly per edge.
double polyline_deviation(std::span<const Vec2> polyline, const Primitive& prim);

FitResult fit_primitives(const Loop2D& loop, const FitConfig& cfg = {});

/// Snap coordinates to a 2^bits uniform grid over [0,1]. bits >= 2.
std::vector<Primitive> quantize_sketch(std::span<const Primitive> prims, int bits = 6);

struct TessellationOptions {
  int segments_per_curve = 0;  // fixed count when > 0
  double chord_tol = 1e-3;     // otherwise, max chord deviation
  int min_segments = 8;
  bool allow_gaps = false;  // bridge chain gaps with straight edges instead of failing
};

/// Reverses primitives as needed so each one starts where the previous ends.
/// Throws OpenChain on a gap larger than tol unless allow_gaps is set.
std::vector<Primitive> orient_chain(std::span<const Primitive> prims, double tol = 1e-6, bool allow_gaps = false);

Loop2D sketch_to_loop(std::span<const Primitive> prims, int pts_per_prim);
Loop2D sketch_to_loop(std::span<const Primitive> prims, const TessellationOptions& opt);

/// Corner vertices of a primitive chain: every primitive start (none for a circle).
std::vector<Vec2> chain_corners(std::span<const Primitive> prims);

}  // namespace slicecad
