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

namespace slicecad {

struct ToleranceSet {
  double dist = 0.01;
  double angle_deg = 1.0;
  double tangent_angle_deg = 3.0;  // max kink at a tangent junction
};

/// Constraints implied by the geometry, grouped by kind and ordered by
/// primitive index within each kind.
std::vector<Constraint> infer_constraints(std::span<const Primitive> prims, const ToleranceSet& tol = {});

/// Residual components of one constraint (2 for positional kinds, 1 otherwise).
std::vector<double> residual_components(std::span<const Primitive> prims, const Constraint& c);

/// One non-negative scalar per constraint.
std::vector<double> residuals(const ConstrainedSketch& sketch);

struct Pin {
  ConstraintRef ref;
  Vec2 target;
};

struct SolveOptions {
  int max_iters = 200;
  double tol = 1e-6;
  double pin_weight = 1e6;  // weight on squared pin residuals
  double mu_init = 1e-4;
  double mu_min = 1e-12;
  double mu_max = 1e6;
};

struct SolveReport {
  int iterations = 0;
  double max_residual = 0.0;
  double max_pin_error = 0.0;
};

/// Damped least squares on the constraint residuals with pinned anchors.
/// Throws NonConvergence, InconsistentPins, UnsupportedConstraint or
/// InvalidArgument (bad references).
ConstrainedSketch solve(const ConstrainedSketch& sketch, std::span<const Pin> pins = {},
                        const SolveOptions& opt = {}, SolveReport* report = nullptr);

/// Packed parameter vector of a sketch (line 4, arc 6, circle 3 values).
std::vector<double> pack_parameters(std::span<const Primitive> prims);
std::vector<Primitive> unpack_parameters(std::span<const Primitive> like, std::span<const double> x);

/// Analytic Jacobian of the stacked residual components w.r.t. the packed
/// parameters, row-major (rows = total residual components).
std::vector<double> residual_jacobian(const ConstrainedSketch& sketch, std::size_t* rows = nullptr);
std::vector<double> stacked_residuals(const ConstrainedSketch& sketch);

struct ReconstructedSketch {
  ConstrainedSketch sketch;
  bool solved = false;
  bool reduced = false;  // fell back to coincident constraints only
};

/// infer_constraints followed by an unpinned solve that snaps the geometry
/// onto its constraints.
ReconstructedSketch reconstruct_constraints(std::span<const Primitive> prims, const ToleranceSet& tol = {},
                                            const SolveOptions& opt = {});

}  // namespace slicecad
