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

#include <doctest.h>

#include <deque>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "slicecad/error.hpp"
#include "slicecad/raster.hpp"

using namespace slicecad;
using namespace slicecad::testing;

namespace {

using Pixel = std::pair<int, int>;

// Textbook all-octant Bresenham, kept separate from the library.
void bresenham(int x0, int y0, int x1, int y1, std::set<Pixel>& out) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    out.insert({x0, y0});
    if (x0 == x1 && y0 == y1) return;
    const int e2 = 2 * err;
    if (e2 >= dy) err += dy, x0 += sx;
    if (e2 <= dx) err += dx, y0 += sy;
  }
}

double brute_scd(const RasterImage& a, const RasterImage& b) {
  auto pa = a.foreground(), pb = b.foreground();
  auto dir = [](const std::vector<Pixel>& p, const std::vector<Pixel>& q) {
    double sum = 0.0;
    for (auto [x, y] : p) {
      double best = INFINITY;
      for (auto [u, v] : q) best = std::min(best, static_cast<double>((x - u) * (x - u) + (y - v) * (y - v)));
      sum += best;
    }
    return sum / p.size();
  };
  return 0.5 * (dir(pa, pb) + dir(pb, pa));
}

RasterImage random_image(std::mt19937& rng, int count) {
  auto img = RasterImage::blank(128, 128);
  std::uniform_int_distribution<int> c(0, 127);
  for (int i = 0; i < count; ++i) img.at(c(rng), c(rng)) = 0;
  return img;
}

}  // namespace

TEST_CASE("square loop matches an independent line raster") {
  Loop2D sq;
  sq.points = {{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}};
  std::set<Pixel> oracle;
  for (int i = 0; i < 4; ++i) {
    const auto [x0, y0] = to_pixel(sq.points[i], 128);
    const auto [x1, y1] = to_pixel(sq.points[(i + 1) % 4], 128);
    bresenham(x0, y0, x1, y1, oracle);
  }
  const auto img = render_loops(std::span(&sq, 1), 128);
  CHECK(oracle.size() == 256);
  CHECK(img.foreground_count() == oracle.size());
  for (auto [x, y] : oracle) CHECK(img.is_foreground(x, y));
}

TEST_CASE("empty loop list renders background") {
  const auto img = render_loops({}, 128);
  CHECK(img.width == 128);
  CHECK(img.foreground_count() == 0);
}

TEST_CASE("upscaled coarse render covers the fine render within one pixel") {
  Loop2D l;
  l.points = circle_points({0.5, 0.5}, 0.3, 40);
  const auto fine = render_loops(std::span(&l, 1), 128);
  const auto coarse = resize(render_loops(std::span(&l, 1), 64), 128, 128);
  int missed = 0;
  for (auto [x, y] : fine.foreground()) {
    bool near = false;
    for (int dy = -1; dy <= 1 && !near; ++dy)
      for (int dx = -1; dx <= 1 && !near; ++dx) {
        const int u = x + dx, v = y + dy;
        near = u >= 0 && v >= 0 && u < 128 && v < 128 && coarse.is_foreground(u, v);
      }
    missed += !near;
  }
  CHECK(missed == 0);
}

TEST_CASE("circle renders as a ring of radius 32") {
  const std::vector<Primitive> c = {Primitive::circle({0.5, 0.5}, 0.25)};
  const auto img = render_primitives(c, 128);
  REQUIRE(img.foreground_count() > 150);
  // Distance from the circle to each foreground pixel cell [x,x+1]x[y,y+1].
  for (auto [x, y] : img.foreground()) {
    double best = INFINITY;
    for (int k = 0; k < 4096; ++k) {
      const double t = 2.0 * kPi * k / 4096;
      const double px = 64.0 + 32.0 * std::cos(t), py = 64.0 + 32.0 * std::sin(t);
      const double dx = std::max({x - px, 0.0, px - (x + 1)}), dy = std::max({y - py, 0.0, py - (y + 1)});
      best = std::min(best, std::hypot(dx, dy));
    }
    CHECK(best <= 1.0);
  }
}

TEST_CASE("diagonal line fills the anti-diagonal in image rows") {
  const std::vector<Primitive> l = {Primitive::line({0, 0}, {1, 1})};
  const auto img = render_primitives(l, 128);
  CHECK(img.foreground_count() == 128);
  for (int i = 0; i < 128; ++i) CHECK(img.is_foreground(i, 127 - i));
}

TEST_CASE("triangle outline is closed") {
  ConstrainedSketch k;
  k.primitives = {Primitive::line({0.2, 0.2}, {0.8, 0.2}), Primitive::line({0.8, 0.2}, {0.5, 0.8}),
                  Primitive::line({0.5, 0.8}, {0.2, 0.2})};
  const auto img = render_sketch(k, 128);
  // 4-connected flood fill from the centroid must not reach the border.
  std::vector<char> seen(128 * 128, 0);
  std::deque<Pixel> q{to_pixel({0.5, 0.4}, 128)};
  bool leaked = false;
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    if (x < 0 || y < 0 || x >= 128 || y >= 128) {
      leaked = true;
      break;
    }
    if (seen[y * 128 + x] || img.is_foreground(x, y)) continue;
    seen[y * 128 + x] = 1;
    q.push_back({x + 1, y});
    q.push_back({x - 1, y});
    q.push_back({x, y + 1});
    q.push_back({x, y - 1});
  }
  CHECK_FALSE(leaked);
}

TEST_CASE("sketch chamfer distance") {
  std::mt19937 rng(3);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_image(rng, 50), b = random_image(rng, 50);
    CHECK(sketch_chamfer_distance(a, b) == brute_scd(a, b));
    CHECK(sketch_chamfer_distance(a, b) == sketch_chamfer_distance(b, a));
    CHECK(sketch_chamfer_distance(a, a) == 0.0);
  }
  auto p = RasterImage::blank(128, 128), q = RasterImage::blank(128, 128);
  p.at(10, 10) = 0;
  q.at(10, 11) = 0;
  CHECK(sketch_chamfer_distance(p, q) == doctest::Approx(1.0));

  auto expect = [](auto&& fn, ErrorCode code) {
    try {
      fn();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect([&] { (void)sketch_chamfer_distance(p, RasterImage::blank(128, 128)); }, ErrorCode::EmptyForeground);
  expect([&] { (void)sketch_chamfer_distance(p, RasterImage::blank(64, 64)); }, ErrorCode::DimensionMismatch);
}

TEST_CASE("pgm round trip and byte layout") {
  auto img = RasterImage::blank(3, 2);
  img.at(1, 0) = 0;
  img.at(2, 1) = 17;
  const auto bytes = encode_pgm(img);
  CHECK(bytes.substr(0, 11) == "P5\n3 2\n255\n");
  CHECK(bytes.size() == 11 + 6);
  CHECK(static_cast<unsigned char>(bytes[11 + 1]) == 0);
  CHECK(decode_pgm(bytes) == img);
  const auto dir = temp_dir("raster");
  write_pgm(img, dir / "a.pgm");
  CHECK(read_pgm(dir / "a.pgm") == img);
  CHECK_THROWS_AS(decode_pgm("P6\n1 1\n255\n\0"), Error);
  CHECK_THROWS_AS(decode_pgm("P5\n4 4\n255\nab"), Error);
}

TEST_CASE("gaussian blur") {
  const auto flat = RasterImage::blank(16, 16, 200);
  CHECK(gaussian_blur(flat, 3) == flat);
  auto dot = RasterImage::blank(9, 9, 255);
  dot.at(4, 4) = 0;
  const auto b = gaussian_blur(dot, 3, 1.0);
  CHECK(b.at(4, 4) > 0);
  CHECK(b.at(4, 4) < b.at(3, 4));
  CHECK(b.at(3, 4) == b.at(5, 4));
  CHECK(b.at(4, 3) == b.at(4, 5));
  CHECK(b.at(0, 0) == 255);
  CHECK_THROWS_AS(gaussian_blur(flat, 4), Error);
}
