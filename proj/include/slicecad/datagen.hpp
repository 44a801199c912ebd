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
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slicecad/cad_model.hpp"
#include "slicecad/raster.hpp"
#include "slicecad/sketch.hpp"

namespace slicecad {

struct GenConfig {
  int max_primitives = 8;  // >= 3
  double arc_weight = 0.3;
  std::uint64_t seed = 0;
};

/// Deterministic uniform source shared by the generators.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int randint(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }  // inclusive

 private:
  std::mt19937_64 eng_;
};

struct LoopSketchInfo {
  int attempts = 0;       // polygons drawn until the loop was simple
  bool rejected = false;  // no simple loop within the retry budget
};

/// Random closed loop of lines and arcs with a coincident constraint per joint.
/// Vertices of a star-shaped polygon; arcs bulge outward by 0.05..0.15.
ConstrainedSketch generate_random_loop_sketch(const GenConfig& cfg, LoopSketchInfo* info = nullptr);

/// One draw of the polygon-with-bulges construction from an existing stream;
/// nullopt when the result is not a simple loop.
std::optional<ConstrainedSketch> draw_loop_sketch(Rng& rng, int max_primitives, double arc_weight);

struct NoiseTrace {
  bool resampled = false;
  int render_size = 128;
  bool noise = false;
  int noise_points = 0;
  bool blur = false;
  int blur_kernel = 0;
};

/// Speckle near the foreground; returns the input when it has no pure-black pixel.
RasterImage add_noise_near_foreground(const RasterImage& img, int d, Rng& rng, int* points = nullptr);
RasterImage add_noise_near_foreground(const RasterImage& img, int d, std::uint64_t seed);

/// Render at a random resolution, then optional speckle and blur.
RasterImage render_with_noise(const ConstrainedSketch& sketch, std::uint64_t seed, NoiseTrace* trace = nullptr,
                              int noise_offset = 3);

struct Displacement {
  ConstraintRef anchor;  // start, mid or end of a primitive
  Vec2 point;            // anchor position before the edit (sketch frame)
  Vec2 vector;
};

struct CorpusEntry {
  int id = 0;
  std::uint64_t seed = 0;
  ConstrainedSketch sketch;
  double h = 0.3;
  double rotation = 0.0;  // radians applied to the sketch, 0 if not rotated
  CadModel model;
  Mesh solid;
  std::optional<Displacement> displacement;
  std::optional<CadModel> displaced_model;
  std::optional<Mesh> displaced_solid;
};

struct CorpusOptions {
  double h = 0.3;
  bool displace = false;
  double displacement_norm = 0.05;
  double rotate_prob = 0.2;
};

/// One-step model: the sketch on z = 0 extruded by h along +z.
CadModel prism_model(const ConstrainedSketch& sketch, double h);

/// Moves an anchor by `vector` and lets the sketch constraints propagate it.
ConstrainedSketch displace_sketch(const ConstrainedSketch& sketch, const Displacement& d);

std::vector<CorpusEntry> build_corpus(int n, const GenConfig& cfg, const CorpusOptions& opt = {},
                                      std::vector<std::string>* log = nullptr);

/// Writes NNNN.sketch.json, NNNN.model.json, NNNN.obj, NNNN.pgm (and displaced
/// variants) plus manifest.json.
void write_corpus(const std::vector<CorpusEntry>& entries, const std::filesystem::path& dir);

}  // namespace slicecad
