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

#include "fixtures.hpp"
#include "slicecad/datagen.hpp"
#include "slicecad/error.hpp"
#include "slicecad/metrics.hpp"
#include "slicecad/pipeline.hpp"

using namespace slicecad;
using namespace slicecad::testing;

namespace {

LoadedMesh load(const Mesh& m) { return normalize_mesh(m.vertices, m.faces); }

}  // namespace

TEST_CASE("cube reconstructs as one prism") {
  const auto rec = reconstruct(load(unit_cube()), PipelineConfig{});
  REQUIRE(rec.valid);
  REQUIRE(rec.model.steps.size() == 1);
  CHECK(rec.model.steps[0].length == doctest::Approx(1.0).epsilon(0.02));
  const auto out = tessellate(rec.model);
  CHECK(chamfer_distance(out, unit_cube()) < 1e-3);
  CHECK(std::abs(out.volume() - 1.0) < 0.03);
}

TEST_CASE("corpus prisms recover their height") {
  const auto entries = build_corpus(8, {8, 0.3, 1});
  for (const auto& e : entries) {
    CAPTURE(e.id);
    const auto rec = reconstruct(load(e.solid), PipelineConfig{});
    REQUIRE(rec.valid);
    double h = 0.0;
    for (const auto& s : rec.model.steps)
      if (s.type == ExtrudeType::New) h = std::max(h, s.length);
    CHECK(std::abs(h - 0.3) / 0.3 < 0.03);
    CHECK(chamfer_distance(tessellate(rec.model), e.solid) < 5e-3);
  }
}

TEST_CASE("stacked boxes give two keyed steps") {
  const auto mesh = merge_meshes(box_mesh({0, 0, 0}, {1, 1, 0.5}), box_mesh({0.2, 0.3, 0.5}, {0.7, 0.8, 1.0}));
  const auto rec = reconstruct(load(mesh), PipelineConfig{});
  REQUIRE(rec.valid);
  CHECK(rec.keys.size() == 2);
  CHECK(rec.model.steps.size() == 2);
  CHECK(std::abs(tessellate(rec.model).volume() - (0.5 + 0.125)) < 0.03 * 0.625);
}

TEST_CASE("zero displacement leaves the reconstruction unchanged") {
  CorpusOptions opt;
  opt.displace = true;
  const auto e = build_corpus(1, {6, 0.3, 5}, opt).front();
  const auto rec = reconstruct(load(e.solid), PipelineConfig{});
  REQUIRE(rec.valid);
  Displacement d = *e.displacement;
  d.vector = {0, 0};
  const auto out = apply_displacement(rec.model, d, e.model, e.solid, PipelineConfig{});
  REQUIRE(out.ok);
  CHECK(out.cd_constrained == doctest::Approx(out.cd_base).epsilon(1e-9));
  CHECK(out.max_residual < 1e-6);
  CHECK_FALSE(out.nonconvergence);
}

TEST_CASE("reconstruction is deterministic") {
  const auto e = build_corpus(1, {8, 0.3, 77}).front();
  const auto a = reconstruct(load(e.solid), PipelineConfig{});
  const auto b = reconstruct(load(e.solid), PipelineConfig{});
  CHECK(model_to_json(a.model).dump() == model_to_json(b.model).dump());
}

TEST_CASE("empty mesh is rejected") {
  try {
    (void)reconstruct(LoadedMesh{}, PipelineConfig{});
    FAIL("expected EmptyMesh");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyMesh);
  }
}
