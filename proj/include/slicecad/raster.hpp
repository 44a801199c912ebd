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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slicecad/sketch.hpp"
#include "slicecad/slicer.hpp"

namespace slicecad {

/// Grayscale image, row-major, row 0 at the top. Foreground is dark (0).
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static RasterImage blank(int width, int height, std::uint8_t value = 255);
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool is_foreground(int x, int y) const { return at(x, y) < 128; }
  std::size_t foreground_count() const;
  std::vector<std::pair<int, int>> foreground() const;  // (x, y), row-major order
  bool operator==(const RasterImage&) const = default;
};

/// Unit-box point to pixel (column, row); y grows upwards in the unit box.
std::pair<int, int> to_pixel(Vec2 u, int size);

/// Square-brush Bresenham line from (x0,y0) to (x1,y1), clipped to the image.
void draw_line(RasterImage& img, int x0, int y0, int x1, int y1, int stroke = 1, std::uint8_t value = 0);

RasterImage render_loops(std::span<const Loop2D> loops, int size = 128, int stroke = 1);
RasterImage render_primitives(std::span<const Primitive> prims, int size = 128, int stroke = 1);
RasterImage render_sketch(const ConstrainedSketch& sketch, int size = 128, int stroke = 1);

/// Half-weighted bidirectional mean squared nearest-foreground distance in
/// pixel units.
double sketch_chamfer_distance(const RasterImage& a, const RasterImage& b);

std::string encode_pgm(const RasterImage& img);
RasterImage decode_pgm(std::string_view bytes);
void write_pgm(const RasterImage& img, const std::filesystem::path& path);
RasterImage read_pgm(const std::filesystem::path& path);

/// Nearest-neighbour when enlarging, box average when shrinking.
RasterImage resize(const RasterImage& img, int width, int height);

/// Gaussian blur with an odd kernel; sigma <= 0 derives sigma from the size.
RasterImage gaussian_blur(const RasterImage& img, int ksize, double sigma = 0.0);

}  // namespace slicecad
