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

#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "slicecad/constraints.hpp"
#include "slicecad/datagen.hpp"
#include "slicecad/raster.hpp"

using namespace slicecad;
using namespace slicecad::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double ring_area(const std::vector<Vec2>& r) {
  double a = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vec2 p = r[i], q = r[(i + 1) % r.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return std::abs(0.5 * a);
}

}  // namespace

TEST_CASE("loop sketch structure") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto k = generate_random_loop_sketch({3, 0.0, seed});
    REQUIRE(k.primitives.size() == 3);
    for (const auto& p : k.primitives) CHECK(p.kind == PrimitiveKind::Line);
    CHECK(k.constraints.size() == 3);
    for (const auto& c : k.constraints) CHECK(c.kind == ConstraintKind::Coincident);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto k = generate_random_loop_sketch({8, 1.0, seed});
    for (const auto& p : k.primitives) CHECK(p.kind == PrimitiveKind::Arc);
  }
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto k = generate_random_loop_sketch({8, 0.3, seed});
    CHECK(k.primitives.size() >= 3);
    CHECK(k.primitives.size() <= 8);
    CHECK(k.constraints.size() == k.primitives.size());
    for (double r : residuals(k)) CHECK(std::abs(r) < 1e-12);
  }
  CHECK(generate_random_loop_sketch({8, 0.3, 17}) == generate_random_loop_sketch({8, 0.3, 17}));
}

TEST_CASE("noise near foreground") {
  const auto blank = RasterImage::blank(128, 128);
  CHECK(add_noise_near_foreground(blank, 3, 5) == blank);

  const auto base = render_sketch(generate_random_loop_sketch({6, 0.3, 2}), 128);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto noisy = add_noise_near_foreground(base, 3, seed);
    REQUIRE(noisy.width == 128);
    int changed = 0;
    for (std::size_t i = 0; i < base.pixels.size(); ++i) {
      if (noisy.pixels[i] == base.pixels[i]) continue;
      ++changed;
      CHECK(noisy.pixels[i] <= 20);
    }
    CHECK(changed <= 100);
  }
}

TEST_CASE("noisy renders") {
  const auto k = generate_random_loop_sketch({6, 0.3, 4});
  const auto plain = render_sketch(k, 128);
  bool saw_plain = false, saw_blur = false;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    NoiseTrace t;
    const auto img = render_with_noise(k, seed, &t);
    CHECK(img.width == 128);
    CHECK(img.height == 128);
    if (!t.resampled && !t.noise && !t.blur) {
      CHECK(img == plain);
      saw_plain = true;
    }
    if (t.blur) {
      std::set<int> levels(img.pixels.begin(), img.pixels.end());
      CHECK(levels.size() > 2);
      CHECK((t.blur_kernel == 7 || t.blur_kernel == 11));
      saw_blur = true;
    }
    if (t.resampled) CHECK((t.render_size == 64 || t.render_size == 128 || t.render_size == 256));
  }
  CHECK(saw_plain);
  CHECK(saw_blur);
}

TEST_CASE("corpus prisms and determinism") {
  const auto entries = build_corpus(12, {8, 0.3, 21});
  REQUIRE(entries.size() == 12);
  for (const auto& e : entries) {
    CHECK(e.h == 0.3);
    const auto profile = step_profile(e.model.steps[0]);
    CHECK(std::abs(e.solid.volume() - ring_area(profile) * 0.3) < 1e-6);
    CHECK(e.solid.is_watertight());
  }
  const auto a = temp_dir("datagen_a"), b = temp_dir("datagen_b");
  write_corpus(entries, a);
  write_corpus(build_corpus(12, {8, 0.3, 21}), b);
  int files = 0;
  for (const auto& f : std::filesystem::directory_iterator(a)) {
    ++files;
    CHECK(slurp(f.path()) == slurp(b / f.path().filename()));
  }
  CHECK(files == 12 * 4 + 1);

  CorpusOptions opt;
  opt.displace = true;
  for (const auto& e : build_corpus(6, {8, 0.3, 3}, opt)) {
    REQUIRE(e.displacement);
    CHECK(norm(e.displacement->vector) == doctest::Approx(0.05));
    REQUIRE(e.displaced_solid);
    CHECK(e.displaced_solid->is_watertight());
  }
}
