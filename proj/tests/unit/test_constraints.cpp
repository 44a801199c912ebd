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
#include <map>
#include <random>

#include "fixtures.hpp"
#include "slicecad/constraints.hpp"
#include "slicecad/error.hpp"

using namespace slicecad;
using namespace slicecad::testing;

namespace {

std::map<ConstraintKind, int> histogram(const std::vector<Constraint>& cs) {
  std::map<ConstraintKind, int> h;
  for (const auto& c : cs) ++h[c.kind];
  return h;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Constraint coincident(int a, Anchor aa, int b, Anchor ba) {
  return {ConstraintKind::Coincident, {{a, aa}, {b, ba}}};
}

// Square with the chain of end/start coincidences and two h + two v.
ConstrainedSketch square_sketch() {
  ConstrainedSketch k;
  k.primitives = square_lines(0.2, 0.2, 0.6, 0.6);
  for (int i = 0; i < 4; ++i) k.constraints.push_back(coincident(i, Anchor::End, (i + 1) % 4, Anchor::Start));
  k.constraints.push_back({ConstraintKind::Horizontal, {{0, Anchor::Whole}}});
  k.constraints.push_back({ConstraintKind::Vertical, {{1, Anchor::Whole}}});
  k.constraints.push_back({ConstraintKind::Horizontal, {{2, Anchor::Whole}}});
  k.constraints.push_back({ConstraintKind::Vertical, {{3, Anchor::Whole}}});
  return k;
}

}  // namespace

TEST_CASE("square inference counts") {
  const auto cs = infer_constraints(square_lines(0.2, 0.2, 0.6, 0.6));
  auto h = histogram(cs);
  CHECK(h[ConstraintKind::Coincident] == 4);
  CHECK(h[ConstraintKind::Horizontal] == 2);
  CHECK(h[ConstraintKind::Vertical] == 2);
  // Four equal sides form one class; a spanning star needs three edges.
  CHECK(h[ConstraintKind::Equal] == 3);
  CHECK(h[ConstraintKind::Parallel] == 0);
  CHECK(h[ConstraintKind::Perpendicular] == 0);
  CHECK(infer_constraints(square_lines(0.2, 0.2, 0.6, 0.6)) == cs);
}

TEST_CASE("concentric circles") {
  const std::vector<Primitive> p = {Primitive::circle({0.5, 0.5}, 0.2), Primitive::circle({0.5, 0.5}, 0.4)};
  auto h = histogram(infer_constraints(p));
  CHECK(h[ConstraintKind::Concentric] == 1);
  CHECK(h[ConstraintKind::Equal] == 0);
}

TEST_CASE("stadium inference") {
  auto h = histogram(infer_constraints(stadium({0.5, 0.5}, 0.2, 0.15)));
  CHECK(h[ConstraintKind::Coincident] == 4);
  CHECK(h[ConstraintKind::Tangent] == 4);
  CHECK(h[ConstraintKind::Equal] >= 2);
  CHECK(h[ConstraintKind::Horizontal] == 2);
}

TEST_CASE("residual examples") {
  const double deg = kPi / 180.0;
  const std::vector<Primitive> tilted = {Primitive::line({0, 0}, {std::cos(deg), std::sin(deg)})};
  const auto r = residual_components(tilted, {ConstraintKind::Horizontal, {{0, Anchor::Whole}}});
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0]) == doctest::Approx(std::sin(deg)).epsilon(1e-12));

  const std::vector<Primitive> gap = {Primitive::line({0, 0}, {1, 0}), Primitive::line({1.01, 0}, {1.01, 1})};
  ConstrainedSketch k{gap, {coincident(0, Anchor::End, 1, Anchor::Start)}};
  const auto res = residuals(k);
  REQUIRE(res.size() == 1);
  CHECK(res[0] == doctest::Approx(0.01).epsilon(1e-9));

  CHECK(max_abs(residuals(square_sketch())) < 1e-12);
}

TEST_CASE("jacobian matches central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  for (int trial = 0; trial < 20; ++trial) {
    ConstrainedSketch k;
    k.primitives = stadium({0.5, 0.5}, 0.2, 0.15);
    k.constraints = infer_constraints(k.primitives);
    for (auto& p : k.primitives) {
      p.a += Vec2{jitter(rng), jitter(rng)};
      p.c += Vec2{jitter(rng), jitter(rng)};
      if (p.kind == PrimitiveKind::Line) p.b += Vec2{jitter(rng), jitter(rng)};
    }
    std::size_t rows = 0;
    const auto J = residual_jacobian(k, &rows);
    const auto x0 = pack_parameters(k.primitives);
    const std::size_t cols = x0.size();
    REQUIRE(J.size() == rows * cols);
    const double h = 1e-6;
    for (std::size_t j = 0; j < cols; ++j) {
      auto xp = x0, xm = x0;
      xp[j] += h;
      xm[j] -= h;
      const auto rp = stacked_residuals({unpack_parameters(k.primitives, xp), k.constraints});
      const auto rm = stacked_residuals({unpack_parameters(k.primitives, xm), k.constraints});
      REQUIRE(rp.size() == rows);
      for (std::size_t i = 0; i < rows; ++i) {
        const double fd = (rp[i] - rm[i]) / (2 * h);
        const double an = J[i * cols + j];
        CHECK(std::abs(fd - an) <= 1e-4 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("pinned corner gives the closed-form rectangle") {
  const auto k = square_sketch();
  // Move the corner shared by edge 1 end and edge 2 start from (0.6,0.6) to (0.7,0.6).
  const Pin pin{{1, Anchor::End}, {0.7, 0.6}};
  SolveReport rep;
  const auto out = solve(k, std::span(&pin, 1), {}, &rep);
  CHECK(max_abs(residuals(out)) < 1e-6);
  const auto& e1 = out.primitives[1];
  const auto& e2 = out.primitives[2];
  CHECK(e1.end().x == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(e1.start().x == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(std::abs(e1.start().x - e1.end().x) < 1e-6);
  CHECK(std::abs(e2.start().y - e2.end().y) < 1e-6);
  CHECK(out.primitives[0].end().x == doctest::Approx(0.7).epsilon(1e-6));
  // The opposite corner is not dragged.
  CHECK(out.primitives[0].start().x == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(out.primitives[0].start().y == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("solve without pins is the identity on satisfied sketches") {
  const auto k = square_sketch();
  const auto out = solve(k);
  for (std::size_t i = 0; i < k.primitives.size(); ++i) {
    CHECK(norm(out.primitives[i].start() - k.primitives[i].start()) < 1e-12);
    CHECK(norm(out.primitives[i].end() - k.primitives[i].end()) < 1e-12);
  }
  const auto twice = solve(out);
  for (std::size_t i = 0; i < k.primitives.size(); ++i)
    CHECK(norm(twice.primitives[i].start() - out.primitives[i].start()) < 1e-9);
}

TEST_CASE("conflicting pins are rejected") {
  const auto k = square_sketch();
  const Pin pins[2] = {{{0, Anchor::End}, {0.6, 0.2}}, {{1, Anchor::Start}, {0.9, 0.9}}};
  try {
    (void)solve(k, pins);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::InconsistentPins || e.code() == ErrorCode::NonConvergence));
  }
}

TEST_CASE("unsupported kinds are rejected by the solver") {
  auto k = square_sketch();
  k.constraints.push_back({ConstraintKind::Fix, {{0, Anchor::Start}}});
  try {
    (void)solve(k);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedConstraint);
  }
}

TEST_CASE("reconstruct_constraints keeps a clean stadium") {
  const auto prims = stadium({0.5, 0.5}, 0.2, 0.15);
  const auto r = reconstruct_constraints(prims);
  CHECK(r.solved);
  CHECK_FALSE(r.reduced);
  CHECK(max_abs(residuals(r.sketch)) < 1e-6);
}
