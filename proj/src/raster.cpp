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

#include "slicecad/raster.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "slicecad/error.hpp"
#include "slicecad/kdtree.hpp"

namespace slicecad {

RasterImage RasterImage::blank(int width, int height, std::uint8_t value) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "raster", "image dimensions must be positive");
  return {width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, value)};
}

std::size_t RasterImage::foreground_count() const {
  return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t v) { return v < 128; }));
}

std::vector<std::pair<int, int>> RasterImage::foreground() const {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (is_foreground(x, y)) out.emplace_back(x, y);
  return out;
}

std::pair<int, int> to_pixel(Vec2 u, int size) {
  auto clampi = [&](double v) {
    if (!std::isfinite(v)) return 0;
    return static_cast<int>(std::clamp(std::floor(v), 0.0, static_cast<double>(size - 1)));
  };
  return {clampi(u.x * size), clampi((1.0 - u.y) * size)};
}

void draw_line(RasterImage& img, int x0, int y0, int x1, int y1, int stroke, std::uint8_t value) {
  const int lo = -(std::max(stroke, 1) - 1) / 2;
  const int hi = lo + std::max(stroke, 1) - 1;
  auto plot = [&](int x, int y) {
    for (int dy = lo; dy <= hi; ++dy)
      for (int dx = lo; dx <= hi; ++dx) {
        const int px = x + dx, py = y + dy;
        if (px >= 0 && py >= 0 && px < img.width && py < img.height) img.at(px, py) = value;
      }
  };
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    plot(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

namespace {

void draw_polyline(RasterImage& img, std::span<const Vec2> pts, bool closed, int stroke) {
  if (pts.empty()) return;
  if (pts.size() == 1) {
    const auto [x, y] = to_pixel(pts[0], img.width);
    draw_line(img, x, y, x, y, stroke);
    return;
  }
  const std::size_t n = closed ? pts.size() : pts.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x0, y0] = to_pixel(pts[i], img.width);
    const auto [x1, y1] = to_pixel(pts[(i + 1) % pts.size()], img.width);
    draw_line(img, x0, y0, x1, y1, stroke);
  }
}

// Points along a curve with chord error at most tol (unit-box units).
std::vector<Vec2> curve_points(const Primitive& p, double tol) {
  double start = 0.0, sweep = 2.0 * std::numbers::pi, r = p.r;
  Vec2 c = p.a;
  if (p.kind == PrimitiveKind::Arc) {
    const auto s = arc_sweep(p);
    if (!s) return {p.a, p.c};
    start = s->start_angle;
    sweep = s->sweep;
    r = s->radius;
    c = s->center;
  }
  int n = 8;
  if (r > tol) {
    const double step = 2.0 * std::acos(1.0 - tol / r);
    n = std::max(n, static_cast<int>(std::ceil(std::abs(sweep) / step)));
  }
  n = std::min(n, 100000);
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = start + sweep * k / n;
    out.push_back(c + Vec2{std::cos(t), std::sin(t)} * r);
  }
  return out;
}

}  // namespace

RasterImage render_loops(std::span<const Loop2D> loops, int size, int stroke) {
  RasterImage img = RasterImage::blank(size, size);
  for (const auto& l : loops) draw_polyline(img, l.points, true, stroke);
  return img;
}

RasterImage render_primitives(std::span<const Primitive> prims, int size, int stroke) {
  RasterImage img = RasterImage::blank(size, size);
  const double tol = 0.5 / size;
  for (const auto& p : prims) {
    if (p.kind == PrimitiveKind::Line) {
      const Vec2 pts[2] = {p.a, p.b};
      draw_polyline(img, pts, false, stroke);
    } else {
      const auto pts = curve_points(p, tol);
      draw_polyline(img, pts, false, stroke);
    }
  }
  return img;
}

RasterImage render_sketch(const ConstrainedSketch& sketch, int size, int stroke) {
  return render_primitives(sketch.primitives, size, stroke);
}

double sketch_chamfer_distance(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw Error(ErrorCode::DimensionMismatch, "raster",
                fmt::format("{}x{} vs {}x{}", a.width, a.height, b.width, b.height));
  auto points = [](const RasterImage& img) {
    std::vector<std::array<double, 2>> pts;
    for (auto [x, y] : img.foreground()) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
    return pts;
  };
  const auto pa = points(a), pb = points(b);
  if (pa.empty() || pb.empty()) throw Error(ErrorCode::EmptyForeground, "raster", "image has no foreground pixels");
  const KdTree<2> ta(pa), tb(pb);
  return 0.5 * mean_nearest_sq<2>(pa, tb) + 0.5 * mean_nearest_sq<2>(pb, ta);
}

std::string encode_pgm(const RasterImage& img) {
  std::string out = fmt::format("P5\n{} {}\n255\n", img.width, img.height);
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

RasterImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto fail = [](const std::string& msg) { return Error(ErrorCode::ParseError, "raster", "PGM: " + msg); };
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
  };
  if (token() != "P5") throw fail("missing P5 magic");
  int w = 0, h = 0, maxv = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxv = std::stoi(token());
  } catch (const std::exception&) {
    throw fail("bad header");
  }
  if (w <= 0 || h <= 0 || maxv != 255) throw fail("unsupported dimensions or depth");
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (bytes.size() < pos + need) throw fail("truncated pixel data");
  RasterImage img{w, h, {}};
  img.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
                    reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + need));
  return img;
}

void write_pgm(const RasterImage& img, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "raster", "cannot write " + path.string());
  const std::string data = encode_pgm(img);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

RasterImage read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "raster", "cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return decode_pgm(ss.str());
}

RasterImage resize(const RasterImage& img, int width, int height) {
  RasterImage out = RasterImage::blank(width, height);
  if (width >= img.width && height >= img.height) {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const int sx = std::min(img.width - 1, x * img.width / width);
        const int sy = std::min(img.height - 1, y * img.height / height);
        out.at(x, y) = img.at(sx, sy);
      }
    return out;
  }
  // Area average over the source footprint of each destination pixel.
  const double fx = static_cast<double>(img.width) / width, fy = static_cast<double>(img.height) / height;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double x0 = x * fx, x1 = (x + 1) * fx, y0 = y * fy, y1 = (y + 1) * fy;
      double acc = 0.0, wsum = 0.0;
      for (int sy = static_cast<int>(std::floor(y0)); sy < static_cast<int>(std::ceil(y1)) && sy < img.height; ++sy)
        for (int sx = static_cast<int>(std::floor(x0)); sx < static_cast<int>(std::ceil(x1)) && sx < img.width; ++sx) {
          const double wx = std::min(x1, sx + 1.0) - std::max(x0, static_cast<double>(sx));
          const double wy = std::min(y1, sy + 1.0) - std::max(y0, static_cast<double>(sy));
          const double w = std::max(0.0, wx) * std::max(0.0, wy);
          acc += w * img.at(sx, sy);
          wsum += w;
        }
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc / wsum), 0L, 255L));
    }
  return out;
}

RasterImage gaussian_blur(const RasterImage& img, int ksize, double sigma) {
  if (ksize < 1 || ksize % 2 == 0) throw Error(ErrorCode::InvalidArgument, "raster", "kernel size must be odd");
  if (sigma <= 0.0) sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8;
  const int r = ksize / 2;
  std::vector<double> k(ksize);
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    k[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  // Reflect without repeating the border pixel.
  auto reflect = [](int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
  };
  std::vector<double> tmp(img.pixels.size());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(reflect(x + i, img.width), y);
      tmp[static_cast<std::size_t>(y) * img.width + x] = acc;
    }
  RasterImage out = RasterImage::blank(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * tmp[static_cast<std::size_t>(reflect(y + i, img.height)) * img.width + x];
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  return out;
}

}  // namespace slicecad
