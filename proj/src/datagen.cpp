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

#include "slicecad/datagen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slicecad/constraints.hpp"
#include "slicecad/error.hpp"
#include "slicecad/serialize.hpp"
#include "slicecad/sketch_fit.hpp"

namespace slicecad {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxAttempts = 10;
constexpr double kMinEdge = 0.08;

template <class F>
ConstrainedSketch map_points(const ConstrainedSketch& s, F f, double radius_scale) {
  ConstrainedSketch out = s;
  for (auto& p : out.primitives) {
    p.a = f(p.a);
    if (p.kind != PrimitiveKind::Circle) {
      p.b = f(p.b);
      p.c = f(p.c);
    }
    p.r *= radius_scale;
  }
  // Lines keep c at the origin.
  for (auto& p : out.primitives)
    if (p.kind == PrimitiveKind::Line) p.c = {};
  return out;
}

// Shrinks and recentres the sketch when its curves leave [0.02, 0.98]^2.
ConstrainedSketch fit_to_unit_box(const ConstrainedSketch& s) {
  TessellationOptions opt;
  opt.chord_tol = 1e-4;
  const Loop2D loop = sketch_to_loop(s.primitives, opt);
  Vec2 lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
  for (auto p : loop.points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  if (lo.x >= 0.02 && lo.y >= 0.02 && hi.x <= 0.98 && hi.y <= 0.98) return s;
  const Vec2 c = (lo + hi) * 0.5;
  const double k = std::min(1.0, 0.96 / std::max(hi.x - lo.x, hi.y - lo.y));
  return map_points(s, [&](Vec2 p) { return (p - c) * k + Vec2{0.5, 0.5}; }, k);
}

ConstrainedSketch rotate_sketch(const ConstrainedSketch& s, double angle) {
  const double cs = std::cos(angle), sn = std::sin(angle);
  const Vec2 c{0.5, 0.5};
  return map_points(
      s, [&](Vec2 p) {
        const Vec2 d = p - c;
        return c + Vec2{cs * d.x - sn * d.y, sn * d.x + cs * d.y};
      },
      1.0);
}

Anchor anchor_at(const Primitive& p, Vec2 where) {
  return norm(p.start() - where) <= norm(p.end() - where) ? Anchor::Start : Anchor::End;
}

}  // namespace

std::optional<ConstrainedSketch> draw_loop_sketch(Rng& rng, int max_primitives, double arc_weight) {
  const int n = rng.randint(3, std::max(3, max_primitives));
  const Vec2 center{0.5 + rng.uniform(-0.05, 0.05), 0.5 + rng.uniform(-0.05, 0.05)};
  const double theta0 = rng.uniform(0.0, kTwoPi);
  std::vector<Vec2> poly;
  for (int i = 0; i < n; ++i) {
    const double t = theta0 + kTwoPi * (i + rng.uniform(-0.25, 0.25)) / n;
    const double r = rng.uniform(0.2, 0.5);
    poly.push_back(center + Vec2{std::cos(t), std::sin(t)} * r);
  }

  ConstrainedSketch s;
  for (int i = 0; i < n; ++i) {
    const Vec2 xs = poly[i], xe = poly[(i + 1) % n];
    if (rng.uniform() > arc_weight) {
      s.primitives.push_back(Primitive::line(xs, xe));
    } else {
      const double delta = rng.uniform(0.05, 0.15);
      const Vec2 d = xe - xs;
      const Vec2 outward = Vec2{d.y, -d.x} / norm(d);
      const Vec2 xa = (xs + xe) * 0.5 + outward * delta;
      if (rng.uniform() > 0.8)
        s.primitives.push_back(Primitive::arc(xe, xa, xs));
      else
        s.primitives.push_back(Primitive::arc(xs, xa, xe));
    }
    if (i > 0) {
      const Vec2 joint = poly[i];
      s.constraints.push_back({ConstraintKind::Coincident,
                               {{i - 1, anchor_at(s.primitives[i - 1], joint)}, {i, anchor_at(s.primitives[i], joint)}}});
    }
  }
  s.constraints.push_back({ConstraintKind::Coincident,
                           {{n - 1, anchor_at(s.primitives[n - 1], poly[0])}, {0, anchor_at(s.primitives[0], poly[0])}}});

  for (int i = 0; i < n; ++i)
    if (norm(poly[(i + 1) % n] - poly[i]) < kMinEdge) return std::nullopt;
  TessellationOptions opt;
  opt.chord_tol = 1e-4;
  const Loop2D loop = sketch_to_loop(s.primitives, opt);
  if (!is_simple_polygon(loop.points)) return std::nullopt;
  return s;
}

ConstrainedSketch generate_random_loop_sketch(const GenConfig& cfg, LoopSketchInfo* info) {
  if (cfg.max_primitives < 3) throw Error(ErrorCode::InvalidArgument, "datagen", "max_primitives must be >= 3");
  if (!(cfg.arc_weight >= 0.0 && cfg.arc_weight <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "datagen", "arc_weight must be in [0,1]");
  Rng rng(cfg.seed);
  for (int a = 1; a <= kMaxAttempts; ++a) {
    if (auto s = draw_loop_sketch(rng, cfg.max_primitives, cfg.arc_weight)) {
      if (info) *info = {a, false};
      return fit_to_unit_box(*s);
    }
  }
  if (info) *info = {kMaxAttempts, true};
  return {};
}

RasterImage add_noise_near_foreground(const RasterImage& img, int d, Rng& rng, int* points) {
  std::vector<std::pair<int, int>> black;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.at(x, y) == 0) black.emplace_back(x, y);
  if (points) *points = 0;
  if (black.empty()) return img;
  RasterImage out = img;
  const int n = rng.randint(0, 100);
  for (int k = 0; k < n; ++k) {
    const auto [bx, by] = black[static_cast<std::size_t>(rng.randint(0, static_cast<int>(black.size()) - 1))];
    const int x = std::clamp(bx + rng.randint(-d, d), 0, img.width - 1);
    const int y = std::clamp(by + rng.randint(-d, d), 0, img.height - 1);
    out.at(x, y) = rng.uniform() < 0.5 ? 0 : static_cast<std::uint8_t>(rng.randint(0, 20));
  }
  if (points) *points = n;
  return out;
}

RasterImage add_noise_near_foreground(const RasterImage& img, int d, std::uint64_t seed) {
  Rng rng(seed);
  return add_noise_near_foreground(img, d, rng);
}

RasterImage render_with_noise(const ConstrainedSketch& sketch, std::uint64_t seed, NoiseTrace* trace, int noise_offset) {
  Rng rng(seed);
  NoiseTrace t;
  if (rng.uniform() < 0.2) {
    t.resampled = true;
    static constexpr int kSizes[3] = {64, 128, 256};
    t.render_size = kSizes[rng.randint(0, 2)];
  }
  RasterImage img = render_sketch(sketch, t.render_size);
  if (t.render_size != 128) img = resize(img, 128, 128);
  if (rng.uniform() < 0.2) {
    t.noise = true;
    img = add_noise_near_foreground(img, noise_offset, rng, &t.noise_points);
  }
  if (rng.uniform() < 0.2) {
    t.blur = true;
    const int k = rng.randint(0, 1) == 0 ? 3 : 5;
    t.blur_kernel = 2 * k + 1;
    img = gaussian_blur(img, t.blur_kernel, 0.0);
  }
  if (trace) *trace = t;
  return img;
}

CadModel prism_model(const ConstrainedSketch& sketch, double h) {
  CadStep s;
  s.sketch = sketch;
  s.plane = {{0, 0, 0}, {0, 0, 1}};
  s.type = ExtrudeType::New;
  s.direction = {0, 0, 1};
  s.length = h;
  s.norm = {0.0, 0.0, 1.0};
  CadModel m;
  m.steps.push_back(std::move(s));
  m.source = "datagen";
  return m;
}

ConstrainedSketch displace_sketch(const ConstrainedSketch& sketch, const Displacement& d) {
  const Pin pin{d.anchor, d.point + d.vector};
  return solve(sketch, std::span(&pin, 1));
}

std::vector<CorpusEntry> build_corpus(int n, const GenConfig& cfg, const CorpusOptions& opt,
                                      std::vector<std::string>* log) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "datagen", "corpus size must be >= 1");
  std::vector<CorpusEntry> out;
  TessellationOptions tess;
  for (std::uint64_t candidate = 0; static_cast<int>(out.size()) < n; ++candidate) {
    if (candidate > static_cast<std::uint64_t>(n) * 20)
      throw Error(ErrorCode::InvalidArgument, "datagen", "too many rejected sketches; check the configuration");
    CorpusEntry e;
    e.id = static_cast<int>(out.size());
    e.seed = mix_seed(cfg.seed, candidate);
    e.h = opt.h;
    Rng rng(e.seed);
    std::optional<ConstrainedSketch> sk;
    for (int a = 0; a < kMaxAttempts && !sk; ++a) sk = draw_loop_sketch(rng, cfg.max_primitives, cfg.arc_weight);
    if (!sk) {
      if (log) log->push_back(fmt::format("candidate {}: no simple loop after {} attempts, skipped", candidate, kMaxAttempts));
      continue;
    }
    if (rng.uniform() < opt.rotate_prob) {
      e.rotation = rng.uniform(0.0, kTwoPi);
      sk = rotate_sketch(*sk, e.rotation);
    }
    e.sketch = fit_to_unit_box(*sk);
    e.model = prism_model(e.sketch, e.h);
    e.solid = tessellate(e.model, tess);

    if (opt.displace) {
      for (int a = 0; a < kMaxAttempts && !e.displacement; ++a) {
        Displacement d;
        d.anchor.prim = rng.randint(0, static_cast<int>(e.sketch.primitives.size()) - 1);
        static constexpr Anchor kAnchors[3] = {Anchor::Start, Anchor::Mid, Anchor::End};
        d.anchor.anchor = kAnchors[rng.randint(0, 2)];
        d.point = *anchor_point(e.sketch.primitives[d.anchor.prim], d.anchor.anchor);
        const double ang = rng.uniform(0.0, kTwoPi);
        d.vector = Vec2{std::cos(ang), std::sin(ang)} * opt.displacement_norm;
        try {
          const ConstrainedSketch moved = displace_sketch(e.sketch, d);
          CadModel dm = prism_model(moved, e.h);
          Mesh ds = tessellate(dm, tess);
          e.displacement = d;
          e.displaced_model = std::move(dm);
          e.displaced_solid = std::move(ds);
        } catch (const Error& err) {
          if (log) log->push_back(fmt::format("entry {}: displacement rejected ({})", e.id, err.what()));
        }
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_corpus(const std::vector<CorpusEntry>& entries, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json list = Json::array();
  for (const auto& e : entries) {
    const std::string stem = fmt::format("{:04d}", e.id);
    write_json_file(to_json(e.sketch), dir / (stem + ".sketch.json"));
    save_model(e.model, dir / (stem + ".model.json"));
    save_obj(e.solid, dir / (stem + ".obj"));
    write_pgm(render_with_noise(e.sketch, mix_seed(e.seed, 0x9e3779b9ULL)), dir / (stem + ".pgm"));
    Json j{{"id", e.id},
           {"seed", e.seed},
           {"h", e.h},
           {"rotation", e.rotation},
           {"sketch", stem + ".sketch.json"},
           {"model", stem + ".model.json"},
           {"mesh", stem + ".obj"},
           {"image", stem + ".pgm"}};
    if (e.displacement && e.displaced_model && e.displaced_solid) {
      save_model(*e.displaced_model, dir / (stem + ".displaced.model.json"));
      save_obj(*e.displaced_solid, dir / (stem + ".displaced.obj"));
      j["displacement"] = {{"prim", e.displacement->anchor.prim},
                           {"anchor", std::string(to_string(e.displacement->anchor.anchor))},
                           {"point", to_json(e.displacement->point)},
                           {"vector", to_json(e.displacement->vector)}};
      j["displaced_model"] = stem + ".displaced.model.json";
      j["displaced_mesh"] = stem + ".displaced.obj";
    }
    list.push_back(std::move(j));
  }
  write_json_file(Json{{"count", entries.size()}, {"entries", list}}, dir / "manifest.json");
}

}  // namespace slicecad
