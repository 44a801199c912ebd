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

#include <bitset>
#include <memory>
#include <span>
#include <vector>

#include "slicecad/geometry.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

struct PlaneScore {
  Axis axis = Axis::Z;
  int index = 0;
  double score = 0.0;
  bool is_key = false;
  bool operator==(const PlaneScore&) const = default;
};

struct DetectConfig {
  int mask_res = 32;  // at most 64
  int max_hamming = 2;
  double area_tol = 1e-3;
  double tau = 0.5;
  /// Only the axes with the fewest bands keep full scores; band starts on
  /// other axes are scaled below tau.
  bool fewest_band_axes = true;
  double refine_eps = 1e-6;
};

/// Coarse description of a slice used to group slices into bands.
struct ProfileSignature {
  int loop_count = 0;
  double area = 0.0;  // sum of |loop area|
  std::vector<std::uint64_t> mask;  // mask_res rows of mask_res bits

  bool empty() const { return loop_count == 0; }
  int hamming(const ProfileSignature& o) const;
  bool matches(const ProfileSignature& o, const DetectConfig& cfg) const;
};

ProfileSignature profile_signature(const SliceRecord& slice, int mask_res = 32);

/// Pluggable slice scorer; scores are in [0,1].
class SliceScorer {
 public:
  virtual ~SliceScorer() = default;
  virtual std::vector<PlaneScore> score(std::span<const SliceRecord> slices) const = 0;
};

/// Scores 1.0 at the first slice of every band of equal signatures.
class BandStartScorer : public SliceScorer {
 public:
  explicit BandStartScorer(DetectConfig cfg = {}) : cfg_(cfg) {}
  std::vector<PlaneScore> score(std::span<const SliceRecord> slices) const override;

 private:
  DetectConfig cfg_;
};

std::vector<PlaneScore> score_slices(std::span<const SliceRecord> slices, const DetectConfig& cfg = {});

struct KeyPlane {
  Axis axis = Axis::Z;
  double offset = 0.0;  // base level of the band along the axis
  int candidate = 0;    // index of the slice record flagged as key
  SliceRecord profile;  // slice just above the base level
};

struct Detection {
  std::vector<PlaneScore> scores;
  std::vector<KeyPlane> keys;
};

/// Scores the slices, then moves each key down to the mesh vertex level where
/// its band begins and flags the candidate nearest to that level.
Detection detect_key_planes(const Mesh& mesh, std::span<const SliceRecord> slices, const DetectConfig& cfg = {},
                            const SliceConfig& slice_cfg = {});

enum class ExtentType { OneSided, Symmetric, TwoSided };

Plane canonicalize_extrusion_plane(const Point3& o, const Vec3& n, double e1, double e2, ExtentType type);

struct PlaneLabels {
  std::vector<int> labels;  // aligned with the candidate list
  std::vector<Plane> canonical;
};

PlaneLabels assign_labels(std::span<const Plane> canonical, std::span<const Plane> candidates);

struct DetectionMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0, fp = 0, fn = 0;
};

DetectionMetrics detection_metrics(std::span<const PlaneScore> pred, const PlaneLabels& labels);

}  // namespace slicecad
