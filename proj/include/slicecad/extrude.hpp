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

#include <cstdint>
#include <span>
#include <vector>

#include "slicecad/geometry.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

struct NestingTree {
  std::vector<int> parent;  // -1 for outermost loops
  std::vector<int> depth;
};

/// Parent of each loop is the smallest-area loop containing it. Throws
/// CrossingLoops when two boundaries intersect.
NestingTree build_nesting(std::span<const Loop2D> loops);

enum class ExtrudeType { New, Cut };

std::vector<ExtrudeType> assign_types(const NestingTree& tree);

struct ExtrusionSpec {
  Plane plane;
  ExtrudeType type = ExtrudeType::New;
  Vec3 direction{0, 0, 1};
  double length = 0.0;
  std::vector<Point3> anchors;
  std::vector<Point3> boundary;  // loop polygon on the plane, used for footprint tests
  int loop_parent = -1;          // parent loop on the same plane
};

/// Points at equal arc-length spacing along the closed loop, from its first vertex.
std::vector<Point3> sample_anchors(const Loop3D& loop, int n);

Segment3 extrusion_vector(const Point3& anchor, double h, const Vec3& v);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // one entry per spec; cut specs get 0
};

/// Mean squared distance from each sample to its nearest extrusion segment
/// plus lambda * sum h^2, with the gradient w.r.t. each length.
LossGrad loss_and_grad(std::span<const Point3> samples, std::span<const ExtrusionSpec> specs, double lambda);

enum class LossScope { Footprint, Global };

struct OptConfig {
  int iters = 200;
  double lr = 2e-4;
  double lambda = 1e-4;
  int n_anchors = 8;
  int n_samples = 4096;
  std::uint64_t seed = 0;
  LossScope scope = LossScope::Footprint;
  int grid_candidates = 32;
  int grid_sweeps = 2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int max_halvings = 5;
};

struct OptTrace {
  std::vector<double> init_lengths;
  std::vector<double> losses;  // loss after each iteration
  int increases = 0;           // iterations whose loss went up
  std::size_t samples_used = 0;
};

/// Mesh samples whose projection along each new spec's direction lands in its
/// footprint (inside or within 1e-3 of the loop).
std::vector<Point3> footprint_samples(std::span<const Point3> samples, std::span<const ExtrusionSpec> specs);

/// Grid-search initialisation then Adam on the lengths of new specs.
std::vector<ExtrusionSpec> optimize_lengths(const Mesh& mesh, std::vector<ExtrusionSpec> specs,
                                            const OptConfig& cfg = {}, OptTrace* trace = nullptr);

/// Same, on precomputed samples (no footprint filtering).
std::vector<ExtrusionSpec> optimize_lengths_on(std::span<const Point3> samples, std::vector<ExtrusionSpec> specs,
                                               double extent, const OptConfig& cfg = {}, OptTrace* trace = nullptr);

}  // namespace slicecad
