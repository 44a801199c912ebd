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

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "slicecad/error.hpp"
#include "slicecad/plane_detect.hpp"

using namespace slicecad;
using namespace slicecad::testing;

namespace {

std::vector<int> key_indices(const std::vector<PlaneScore>& scores, Axis axis) {
  std::vector<int> out;
  for (const auto& s : scores)
    if (s.axis == axis && s.is_key) out.push_back(s.index);
  return out;
}

bool near(const Point3& a, const Point3& b) { return norm(a - b) < 1e-12; }

PlaneScore flag(bool key) {
  PlaneScore s;
  s.is_key = key;
  s.score = key ? 1.0 : 0.0;
  return s;
}

}  // namespace

TEST_CASE("cube has one key slice per axis at the band start") {
  const auto slices = slice_all(unit_cube());
  const auto scores = score_slices(slices);
  for (Axis a : {Axis::X, Axis::Y, Axis::Z}) CHECK(key_indices(scores, a) == std::vector<int>{0});
  for (const auto& s : scores) CHECK(s.is_key == (s.score >= 0.5));
  CHECK(score_slices(slices) == scores);
}

TEST_CASE("stacked boxes key the first slice of each z band") {
  const auto mesh = merge_meshes(box_mesh({0, 0, 0}, {1, 1, 0.5}), box_mesh({0.2, 0.3, 0.5}, {0.7, 0.8, 1.0}));
  const auto slices = slice_all(mesh);
  const auto det = detect_key_planes(mesh, slices);
  CHECK(key_indices(det.scores, Axis::Z) == std::vector<int>{0, 20});
  CHECK(key_indices(det.scores, Axis::X).empty());
  CHECK(key_indices(det.scores, Axis::Y).empty());
  REQUIRE(det.keys.size() == 2);
  CHECK(det.keys[0].offset == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(det.keys[1].offset == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("empty slices never score") {
  auto slices = slice_all(unit_cube());
  for (auto& s : slices)
    if (s.axis == Axis::Z && s.index >= 20) s.loops.clear();
  const auto scores = score_slices(slices);
  for (const auto& s : scores)
    if (s.axis == Axis::Z && s.index >= 20) CHECK(s.score == 0.0);
  CHECK(key_indices(scores, Axis::Z) == std::vector<int>{0});
}

TEST_CASE("canonical plane worked examples") {
  auto p = canonicalize_extrusion_plane({0, 0, 0}, {0, 0, 1}, 1, 0, ExtentType::OneSided);
  CHECK(near(p.origin, {0, 0, 0}));
  CHECK(near(p.normal, {0, 0, 1}));
  p = canonicalize_extrusion_plane({0, 0, 0}, {0, 0, 1}, 1, 0, ExtentType::Symmetric);
  CHECK(near(p.origin, {0, 0, -1}));
  CHECK(near(p.normal, {0, 0, 1}));
  p = canonicalize_extrusion_plane({0, 0, 0}, {0, 0, -1}, 1, 0, ExtentType::OneSided);
  CHECK(near(p.origin, {0, 0, 0}));
  CHECK(near(p.normal, {0, 0, 1}));
  try {
    (void)canonicalize_extrusion_plane({0, 0, 0}, {0, 0, 1}, 0.5, 0.5, ExtentType::TwoSided);
    FAIL("expected ZeroExtent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroExtent);
  }
}

TEST_CASE("canonical normals are non-negative unit vectors") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1), e(0.05, 1.0);
  const Vec3 axes[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (int i = 0; i < 200; ++i) {
    const auto type = static_cast<ExtentType>(i % 3);
    const auto p = canonicalize_extrusion_plane({u(rng), u(rng), u(rng)}, axes[i % 6], e(rng), -e(rng), type);
    CHECK(p.normal.x >= 0);
    CHECK(p.normal.y >= 0);
    CHECK(p.normal.z >= 0);
    CHECK(norm(p.normal) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ground-truth labels snap to the nearest same-axis candidate") {
  const auto candidates = sample_planes(unit_cube(), 40);
  const Plane z051{{0, 0, 0.51}, {0, 0, 1}};
  auto labels = assign_labels(std::span(&z051, 1), candidates);
  REQUIRE(std::count(labels.labels.begin(), labels.labels.end(), 1) == 1);
  const auto hit = std::find(labels.labels.begin(), labels.labels.end(), 1) - labels.labels.begin();
  CHECK(hit == 2 * 40 + 20);
  CHECK(candidates[hit].origin.z == doctest::Approx(0.5125));

  const Plane on{{0, candidates[40 + 7].origin.y, 0}, {0, 1, 0}};
  labels = assign_labels(std::span(&on, 1), candidates);
  CHECK(labels.labels[40 + 7] == 1);

  const Plane twins[2] = {{{0, 0, 0.51}, {0, 0, 1}}, {{0, 0, 0.515}, {0, 0, 1}}};
  labels = assign_labels(twins, candidates);
  CHECK(std::count(labels.labels.begin(), labels.labels.end(), 1) == 1);

  const Plane tilted{{0, 0, 0}, {0, 0.6, 0.8}};
  try {
    (void)assign_labels(std::span(&tilted, 1), candidates);
    FAIL("expected NoSameAxisCandidate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoSameAxisCandidate);
  }
}

TEST_CASE("detection metric conventions") {
  PlaneLabels labels;
  labels.labels = {1, 0, 1, 0};
  std::vector<PlaneScore> pred = {flag(true), flag(false), flag(true), flag(false)};
  auto m = detection_metrics(pred, labels);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);

  labels.labels = {1, 1, 1, 0};
  pred = {flag(false), flag(false), flag(false), flag(false)};
  m = detection_metrics(pred, labels);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);

  labels.labels = {0, 0, 0, 0};
  m = detection_metrics(pred, labels);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);

  // TP=2, FP=1, FN=1.
  labels.labels = {1, 1, 1, 0, 0};
  pred = {flag(true), flag(true), flag(false), flag(true), flag(false)};
  m = detection_metrics(pred, labels);
  CHECK(m.precision == doctest::Approx(2.0 / 3));
  CHECK(m.recall == doctest::Approx(2.0 / 3));
  CHECK(m.f1 == doctest::Approx(2.0 / 3));

  pred.pop_back();
  try {
    (void)detection_metrics(pred, labels);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}
