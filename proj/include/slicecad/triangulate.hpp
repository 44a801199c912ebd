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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "slicecad/geometry.hpp"

namespace slicecad {

/// Ear-clipping triangulation of a simple polygon with simple holes.
/// Vertices are numbered outer first, then each hole in order; triangles are
/// counter-clockwise. Throws TriangulationFailure for non-simple input.
std::vector<std::array<std::uint32_t, 3>> triangulate_polygon(std::span<const Vec2> outer,
                                                               std::span<const std::vector<Vec2>> holes = {});

/// Drops consecutive duplicates and exactly collinear vertices of a closed ring.
std::vector<Vec2> clean_ring(std::span<const Vec2> ring);

}  // namespace slicecad
