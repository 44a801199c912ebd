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

#include "slicecad/constraints.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

constexpr const char* kModule = "constraints";
constexpr int kMaxLocal = 12;  // two primitives, six parameters each

// Forward-mode dual number over at most kMaxLocal local parameters.
struct Dual {
  double v = 0.0;
  std::array<double, kMaxLocal> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit constants
  static Dual var(double value, int slot) {
    Dual r(value);
    r.d[slot] = 1.0;
    return r;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  for (int i = 0; i < kMaxLocal; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  for (int i = 0; i < kMaxLocal; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
inline Dual operator-(const Dual& a) {
  Dual r(-a.v);
  for (int i = 0; i < kMaxLocal; ++i) r.d[i] = -a.d[i];
  return r;
}
inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  for (int i = 0; i < kMaxLocal; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
inline Dual operator/(const Dual& a, const Dual& b) {
  Dual r(a.v / b.v);
  const double inv2 = 1.0 / (b.v * b.v);
  for (int i = 0; i < kMaxLocal; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
  return r;
}
inline Dual sqrt(const Dual& a) {
  Dual r(std::sqrt(a.v));
  const double k = r.v > 0.0 ? 0.5 / r.v : 0.0;
  for (int i = 0; i < kMaxLocal; ++i) r.d[i] = a.d[i] * k;
  return r;
}
inline Dual abs(const Dual& a) { return a.v < 0.0 ? -a : a; }
inline double value(const Dual& a) { return a.v; }
inline double value(double a) { return a; }

template <class T>
struct P2 {
  T x, y;
};
template <class T>
P2<T> operator+(const P2<T>& a, const P2<T>& b) { return {a.x + b.x, a.y + b.y}; }
template <class T>
P2<T> operator-(const P2<T>& a, const P2<T>& b) { return {a.x - b.x, a.y - b.y}; }
template <class T>
T pdot(const P2<T>& a, const P2<T>& b) { return a.x * b.x + a.y * b.y; }
template <class T>
T pcross(const P2<T>& a, const P2<T>& b) { return a.x * b.y - a.y * b.x; }
template <class T>
T plen(const P2<T>& a) {
  using std::sqrt;
  return sqrt(pdot(a, a));
}

int param_count(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Line: return 4;
    case PrimitiveKind::Arc: return 6;
    case PrimitiveKind::Circle: return 3;
  }
  return 0;
}

void write_params(const Primitive& p, double* out) {
  switch (p.kind) {
    case PrimitiveKind::Line: out[0] = p.a.x; out[1] = p.a.y; out[2] = p.b.x; out[3] = p.b.y; break;
    case PrimitiveKind::Arc:
      out[0] = p.a.x; out[1] = p.a.y; out[2] = p.b.x; out[3] = p.b.y; out[4] = p.c.x; out[5] = p.c.y;
      break;
    case PrimitiveKind::Circle: out[0] = p.a.x; out[1] = p.a.y; out[2] = p.r; break;
  }
}

Primitive read_params(PrimitiveKind k, const double* x) {
  switch (k) {
    case PrimitiveKind::Line: return Primitive::line({x[0], x[1]}, {x[2], x[3]});
    case PrimitiveKind::Arc: return Primitive::arc({x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]});
    case PrimitiveKind::Circle: return Primitive::circle({x[0], x[1]}, x[2]);
  }
  return {};
}

template <class T>
struct Prim {
  PrimitiveKind kind;
  std::array<T, 6> q;

  P2<T> pt(int i) const { return {q[2 * i], q[2 * i + 1]}; }

  P2<T> center() const {
    if (kind == PrimitiveKind::Circle) return pt(0);
    // Circumcenter of start, mid, end (translated to start for conditioning).
    const P2<T> a = pt(0), b = pt(1) - a, c = pt(2) - a;
    const T d = T(2.0) * pcross(b, c);
    const T b2 = pdot(b, b), c2 = pdot(c, c);
    const P2<T> u{(c.y * b2 - b.y * c2) / d, (b.x * c2 - c.x * b2) / d};
    return a + u;
  }
  T radius() const {
    if (kind == PrimitiveKind::Circle) return q[2];
    return plen(pt(0) - center());
  }
  P2<T> anchor(Anchor a) const {
    switch (kind) {
      case PrimitiveKind::Line:
        if (a == Anchor::Start) return pt(0);
        if (a == Anchor::End) return pt(1);
        return {(q[0] + q[2]) * T(0.5), (q[1] + q[3]) * T(0.5)};
      case PrimitiveKind::Arc:
        if (a == Anchor::Start) return pt(0);
        if (a == Anchor::Mid) return pt(1);
        if (a == Anchor::End) return pt(2);
        return center();
      case PrimitiveKind::Circle:
        if (a == Anchor::Start || a == Anchor::End) return {q[0] + q[2], q[1]};
        return pt(0);
    }
    return pt(0);
  }
  P2<T> dir() const { return pt(1) - pt(0); }  // lines only
};

template <class T>
Prim<T> make_prim(const Primitive& p, int slot0) {
  Prim<T> r{p.kind, {}};
  double raw[6] = {};
  write_params(p, raw);
  for (int i = 0; i < param_count(p.kind); ++i) {
    if constexpr (std::is_same_v<T, Dual>) {
      r.q[i] = slot0 >= 0 ? Dual::var(raw[i], slot0 + i) : Dual(raw[i]);
    } else {
      r.q[i] = raw[i];
    }
  }
  return r;
}

bool is_line(const Primitive& p) { return p.kind == PrimitiveKind::Line; }

void check_refs(std::span<const Primitive> prims, const Constraint& c) {
  const std::size_t want = is_unary(c.kind) ? 1 : 2;
  if (c.refs.size() != want)
    throw Error(ErrorCode::InvalidArgument, kModule,
                fmt::format("{} constraint needs {} reference(s), got {}", to_string(c.kind), want, c.refs.size()));
  for (const auto& r : c.refs)
    if (r.prim < 0 || static_cast<std::size_t>(r.prim) >= prims.size())
      throw Error(ErrorCode::InvalidArgument, kModule, fmt::format("primitive index {} out of range", r.prim));
}

// Residual components of constraint c; p0/p1 are the referenced primitives.
template <class T>
void eval_constraint(const Constraint& c, const Prim<T>& p0, const Prim<T>& p1, std::vector<T>& out) {
  const ConstraintRef& r0 = c.refs[0];
  switch (c.kind) {
    case ConstraintKind::Coincident: {
      const auto d = p0.anchor(r0.anchor) - p1.anchor(c.refs[1].anchor);
      out.push_back(d.x);
      out.push_back(d.y);
      return;
    }
    case ConstraintKind::Concentric: {
      const auto d = p0.center() - p1.center();
      out.push_back(d.x);
      out.push_back(d.y);
      return;
    }
    case ConstraintKind::Midpoint: {
      const Prim<T>& line = p1;
      const P2<T> m{(line.q[0] + line.q[2]) * T(0.5), (line.q[1] + line.q[3]) * T(0.5)};
      const auto d = p0.anchor(r0.anchor) - m;
      out.push_back(d.x);
      out.push_back(d.y);
      return;
    }
    case ConstraintKind::Horizontal: {
      const auto d = p0.dir();
      out.push_back(d.y / plen(d));
      return;
    }
    case ConstraintKind::Vertical: {
      const auto d = p0.dir();
      out.push_back(d.x / plen(d));
      return;
    }
    case ConstraintKind::Parallel: {
      const auto a = p0.dir(), b = p1.dir();
      out.push_back(pcross(a, b) / (plen(a) * plen(b)));
      return;
    }
    case ConstraintKind::Perpendicular: {
      const auto a = p0.dir(), b = p1.dir();
      out.push_back(pdot(a, b) / (plen(a) * plen(b)));
      return;
    }
    case ConstraintKind::Equal: {
      if (p0.kind == PrimitiveKind::Line && p1.kind == PrimitiveKind::Line)
        out.push_back(plen(p0.dir()) - plen(p1.dir()));
      else
        out.push_back(p0.radius() - p1.radius());
      return;
    }
    case ConstraintKind::Tangent: {
      using std::abs;
      if (p0.kind == PrimitiveKind::Line || p1.kind == PrimitiveKind::Line) {
        const Prim<T>& line = p0.kind == PrimitiveKind::Line ? p0 : p1;
        const Prim<T>& curve = p0.kind == PrimitiveKind::Line ? p1 : p0;
        const auto d = line.dir();
        const T dist = abs(pcross(d, curve.center() - line.pt(0))) / plen(d);
        out.push_back(dist - curve.radius());
        return;
      }
      const T cd = plen(p0.center() - p1.center());
      const T r0v = p0.radius(), r1v = p1.radius();
      const T ext = cd - (r0v + r1v);
      const T inn = cd - abs(r0v - r1v);
      out.push_back(std::abs(value(ext)) <= std::abs(value(inn)) ? ext : inn);
      return;
    }
    default:
      throw Error(ErrorCode::UnsupportedConstraint, kModule,
                  fmt::format("constraint kind '{}' is not supported by the solver", to_string(c.kind)));
  }
}

std::vector<double> eval_double(std::span<const Primitive> prims, const Constraint& c) {
  check_refs(prims, c);
  const auto p0 = make_prim<double>(prims[c.refs[0].prim], -1);
  const auto p1 = make_prim<double>(prims[c.refs.size() > 1 ? c.refs[1].prim : c.refs[0].prim], -1);
  std::vector<double> out;
  eval_constraint(c, p0, p1, out);
  return out;
}

std::vector<std::size_t> param_offsets(std::span<const Primitive> prims) {
  std::vector<std::size_t> off(prims.size() + 1, 0);
  for (std::size_t i = 0; i < prims.size(); ++i) off[i + 1] = off[i] + param_count(prims[i].kind);
  return off;
}

// Components plus sparse Jacobian rows for one constraint.
void eval_with_jacobian(std::span<const Primitive> prims, const std::vector<std::size_t>& off, const Constraint& c,
                        std::vector<double>& vals, std::vector<std::vector<std::pair<std::size_t, double>>>& rows) {
  const int i0 = c.refs[0].prim;
  const int i1 = c.refs.size() > 1 ? c.refs[1].prim : i0;
  const auto p0 = make_prim<Dual>(prims[i0], 0);
  const auto p1 = i1 == i0 ? p0 : make_prim<Dual>(prims[i1], 6);
  std::vector<Dual> out;
  eval_constraint(c, p0, p1, out);
  for (const Dual& d : out) {
    vals.push_back(d.v);
    std::vector<std::pair<std::size_t, double>> row;
    for (int k = 0; k < param_count(prims[i0].kind); ++k)
      if (d.d[k] != 0.0) row.emplace_back(off[i0] + k, d.d[k]);
    if (i1 != i0)
      for (int k = 0; k < param_count(prims[i1].kind); ++k)
        if (d.d[6 + k] != 0.0) row.emplace_back(off[i1] + k, d.d[6 + k]);
    rows.push_back(std::move(row));
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double line_angle(const Primitive& p) {
  const Vec2 d = p.b - p.a;
  double t = std::atan2(d.y, d.x);
  if (t < 0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t -= std::numbers::pi;
  return t;
}

// Smallest difference between two undirected line angles, in [0, pi/2].
double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

// Unit tangent of a primitive at its start or end, along the direction of travel.
Vec2 travel_tangent(const Primitive& p, bool at_end) {
  if (p.kind == PrimitiveKind::Line) return normalized(p.b - p.a);
  const auto s = arc_sweep(p);
  if (!s) return normalized(p.c - p.a);
  const double ang = s->start_angle + (at_end ? s->sweep : 0.0);
  const Vec2 radial{std::cos(ang), std::sin(ang)};
  return s->sweep >= 0 ? perp(radial) : -perp(radial);
}

}  // namespace

std::vector<Constraint> infer_constraints(std::span<const Primitive> prims, const ToleranceSet& tol) {
  std::vector<Constraint> out;
  const double ang_tol = tol.angle_deg * std::numbers::pi / 180.0;
  const int n = static_cast<int>(prims.size());

  // Coincident: union endpoint anchors across primitives.
  std::vector<ConstraintRef> ends;
  for (int i = 0; i < n; ++i)
    if (prims[i].kind != PrimitiveKind::Circle) {
      ends.push_back({i, Anchor::Start});
      ends.push_back({i, Anchor::End});
    }
  UnionFind uf(ends.size());
  for (std::size_t a = 0; a < ends.size(); ++a)
    for (std::size_t b = a + 1; b < ends.size(); ++b) {
      if (ends[a].prim == ends[b].prim) continue;
      const Vec2 pa = *anchor_point(prims[ends[a].prim], ends[a].anchor);
      const Vec2 pb = *anchor_point(prims[ends[b].prim], ends[b].anchor);
      if (norm(pa - pb) < tol.dist) uf.unite(static_cast<int>(a), static_cast<int>(b));
    }
  std::vector<std::pair<int, int>> joined;  // (prim, prim) pairs sharing an endpoint class
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t a = 0; a < ends.size(); ++a) classes[uf.find(static_cast<int>(a))].push_back(a);
  for (const auto& [root, members] : classes) {
    for (std::size_t k = 1; k < members.size(); ++k) {
      const auto& r0 = ends[members[0]];
      const auto& rk = ends[members[k]];
      if (r0.prim == rk.prim) continue;
      out.push_back({ConstraintKind::Coincident, {r0, rk}});
    }
  }
  // Adjacent pairs with the junction geometry: (prim a end, prim b start) style.
  struct Junction {
    ConstraintRef a, b;
  };
  std::vector<Junction> junctions;
  for (const auto& [root, members] : classes)
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y)
        if (ends[members[x]].prim != ends[members[y]].prim) junctions.push_back({ends[members[x]], ends[members[y]]});
  std::sort(junctions.begin(), junctions.end(), [](const Junction& l, const Junction& r) {
    return std::tie(l.a.prim, l.b.prim, l.a.anchor, l.b.anchor) < std::tie(r.a.prim, r.b.prim, r.a.anchor, r.b.anchor);
  });

  // Horizontal / vertical.
  std::vector<int> hv(n, 0);  // 1 horizontal, 2 vertical
  for (int i = 0; i < n; ++i) {
    if (!is_line(prims[i]) || norm(prims[i].b - prims[i].a) == 0.0) continue;
    const double t = line_angle(prims[i]);
    if (angle_gap(t, 0.0) < ang_tol) hv[i] = 1;
    else if (angle_gap(t, std::numbers::pi / 2) < ang_tol) hv[i] = 2;
  }
  for (int i = 0; i < n; ++i)
    if (hv[i] == 1) out.push_back({ConstraintKind::Horizontal, {{i, Anchor::Whole}}});
  for (int i = 0; i < n; ++i)
    if (hv[i] == 2) out.push_back({ConstraintKind::Vertical, {{i, Anchor::Whole}}});

  // Parallel classes (star around the first member), perpendicular between roots.
  std::vector<int> dir_root(n, -1);
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (!is_line(prims[i]) || norm(prims[i].b - prims[i].a) == 0.0) continue;
    for (int r : roots)
      if (angle_gap(line_angle(prims[r]), line_angle(prims[i])) < ang_tol) {
        dir_root[i] = r;
        break;
      }
    if (dir_root[i] < 0) {
      dir_root[i] = i;
      roots.push_back(i);
    }
  }
  for (int i = 0; i < n; ++i) {
    const int r = dir_root[i];
    if (r < 0 || r == i) continue;
    if (hv[r] != 0 && hv[r] == hv[i]) continue;
    out.push_back({ConstraintKind::Parallel, {{r, Anchor::Whole}, {i, Anchor::Whole}}});
  }
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b) {
      const int ra = roots[a], rb = roots[b];
      if (std::abs(angle_gap(line_angle(prims[ra]), line_angle(prims[rb])) - std::numbers::pi / 2) >= ang_tol) continue;
      if (hv[ra] != 0 && hv[rb] != 0) continue;
      out.push_back({ConstraintKind::Perpendicular, {{ra, Anchor::Whole}, {rb, Anchor::Whole}}});
    }

  // Equal: same-kind value classes.
  auto size_of = [&](int i) { return is_line(prims[i]) ? norm(prims[i].b - prims[i].a) : prims[i].radius(); };
  for (PrimitiveKind kind : {PrimitiveKind::Line, PrimitiveKind::Arc, PrimitiveKind::Circle}) {
    std::vector<int> eq_roots;
    for (int i = 0; i < n; ++i) {
      if (prims[i].kind != kind) continue;
      const double v = size_of(i);
      if (!std::isfinite(v)) continue;
      bool placed = false;
      for (int r : eq_roots)
        if (std::abs(size_of(r) - v) < tol.dist) {
          out.push_back({ConstraintKind::Equal, {{r, Anchor::Whole}, {i, Anchor::Whole}}});
          placed = true;
          break;
        }
      if (!placed) eq_roots.push_back(i);
    }
  }

  // Concentric curves.
  {
    std::vector<int> c_roots;
    for (int i = 0; i < n; ++i) {
      if (!prims[i].is_curve() || !std::isfinite(prims[i].radius())) continue;
      bool placed = false;
      for (int r : c_roots)
        if (norm(prims[r].center() - prims[i].center()) < tol.dist) {
          out.push_back({ConstraintKind::Concentric, {{r, Anchor::Center}, {i, Anchor::Center}}});
          placed = true;
          break;
        }
      if (!placed) c_roots.push_back(i);
    }
  }

  // Tangent at shared endpoints.
  const double kink_tol = tol.tangent_angle_deg * std::numbers::pi / 180.0;
  std::vector<std::pair<int, int>> tangent_done;
  for (const auto& j : junctions) {
    const Primitive& pa = prims[j.a.prim];
    const Primitive& pb = prims[j.b.prim];
    if (is_line(pa) && is_line(pb)) continue;
    const auto key = std::minmax(j.a.prim, j.b.prim);
    if (std::find(tangent_done.begin(), tangent_done.end(), std::pair{key.first, key.second}) != tangent_done.end())
      continue;
    const Constraint c{ConstraintKind::Tangent, {{j.a.prim, Anchor::Whole}, {j.b.prim, Anchor::Whole}}};
    const auto r = eval_double(prims, c);
    if (!std::isfinite(r[0]) || std::abs(r[0]) >= tol.dist) continue;
    // Directions at the junction must agree up to orientation.
    const Vec2 ta = travel_tangent(pa, j.a.anchor == Anchor::End);
    const Vec2 tb = travel_tangent(pb, j.b.anchor == Anchor::End);
    const double kink = std::asin(std::min(1.0, std::abs(cross(ta, tb))));
    if (kink >= kink_tol) continue;
    tangent_done.emplace_back(key.first, key.second);
    out.push_back(c);
  }

  // Midpoint: an endpoint resting on another line's midpoint.
  for (std::size_t e = 0; e < ends.size(); ++e) {
    const Vec2 p = *anchor_point(prims[ends[e].prim], ends[e].anchor);
    for (int j = 0; j < n; ++j) {
      if (j == ends[e].prim || !is_line(prims[j])) continue;
      if (norm(prims[j].b - prims[j].a) <= 2.0 * tol.dist) continue;
      if (norm(p - (prims[j].a + prims[j].b) * 0.5) < tol.dist)
        out.push_back({ConstraintKind::Midpoint, {ends[e], {j, Anchor::Whole}}});
    }
  }
  return out;
}

std::vector<double> residual_components(std::span<const Primitive> prims, const Constraint& c) {
  return eval_double(prims, c);
}

std::vector<double> residuals(const ConstrainedSketch& sketch) {
  std::vector<double> out;
  out.reserve(sketch.constraints.size());
  for (const auto& c : sketch.constraints) {
    const auto comps = eval_double(sketch.primitives, c);
    double s = 0.0;
    for (double v : comps) s += v * v;
    out.push_back(std::sqrt(s));
  }
  return out;
}

std::vector<double> pack_parameters(std::span<const Primitive> prims) {
  const auto off = param_offsets(prims);
  std::vector<double> x(off.back());
  for (std::size_t i = 0; i < prims.size(); ++i) write_params(prims[i], x.data() + off[i]);
  return x;
}

std::vector<Primitive> unpack_parameters(std::span<const Primitive> like, std::span<const double> x) {
  const auto off = param_offsets(like);
  if (x.size() != off.back()) throw Error(ErrorCode::DimensionMismatch, kModule, "parameter vector size mismatch");
  std::vector<Primitive> out;
  out.reserve(like.size());
  for (std::size_t i = 0; i < like.size(); ++i) out.push_back(read_params(like[i].kind, x.data() + off[i]));
  return out;
}

std::vector<double> stacked_residuals(const ConstrainedSketch& sketch) {
  std::vector<double> out;
  for (const auto& c : sketch.constraints) {
    const auto v = eval_double(sketch.primitives, c);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<double> residual_jacobian(const ConstrainedSketch& sketch, std::size_t* rows_out) {
  const auto off = param_offsets(sketch.primitives);
  std::vector<double> vals;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  for (const auto& c : sketch.constraints) {
    check_refs(sketch.primitives, c);
    eval_with_jacobian(sketch.primitives, off, c, vals, rows);
  }
  std::vector<double> J(rows.size() * off.back(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (auto [col, v] : rows[r]) J[r * off.back() + col] += v;
  if (rows_out) *rows_out = rows.size();
  return J;
}

ConstrainedSketch solve(const ConstrainedSketch& sketch, std::span<const Pin> pins, const SolveOptions& opt,
                        SolveReport* report) {
  const auto& prims = sketch.primitives;
  for (const auto& c : sketch.constraints) {
    if (!is_supported(c.kind))
      throw Error(ErrorCode::UnsupportedConstraint, kModule,
                  fmt::format("constraint kind '{}' is not supported by the solver", to_string(c.kind)));
    check_refs(prims, c);
  }
  for (const auto& p : pins) {
    if (p.ref.prim < 0 || static_cast<std::size_t>(p.ref.prim) >= prims.size())
      throw Error(ErrorCode::InvalidArgument, kModule, fmt::format("pin references primitive {}", p.ref.prim));
    if (p.ref.anchor == Anchor::Whole)
      throw Error(ErrorCode::InvalidArgument, kModule, "a pin needs a point anchor");
  }

  // Pins on anchors forced together by coincident constraints must agree.
  {
    std::map<std::pair<int, int>, int> id;
    auto key = [&](const ConstraintRef& r) {
      auto [it, inserted] = id.try_emplace({r.prim, static_cast<int>(r.anchor)}, static_cast<int>(id.size()));
      return it->second;
    };
    for (const auto& p : pins) key(p.ref);
    for (const auto& c : sketch.constraints)
      if (c.kind == ConstraintKind::Coincident) {
        key(c.refs[0]);
        key(c.refs[1]);
      }
    UnionFind uf(id.size());
    for (const auto& c : sketch.constraints)
      if (c.kind == ConstraintKind::Coincident) uf.unite(key(c.refs[0]), key(c.refs[1]));
    std::map<int, Vec2> target_of;
    for (const auto& p : pins) {
      const int g = uf.find(key(p.ref));
      auto [it, inserted] = target_of.try_emplace(g, p.target);
      if (!inserted && norm(it->second - p.target) > 1e-9)
        throw Error(ErrorCode::InconsistentPins, kModule,
                    fmt::format("pins on coincident anchors disagree by {:.3g}", norm(it->second - p.target)));
    }
  }

  const auto off = param_offsets(prims);
  const std::size_t n = off.back();
  const double pin_scale = std::sqrt(opt.pin_weight);

  auto evaluate = [&](const std::vector<Primitive>& cur, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    std::vector<double> vals;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    for (const auto& c : sketch.constraints) eval_with_jacobian(cur, off, c, vals, rows);
    const std::size_t m_c = vals.size();
    const std::size_t m = m_c + 2 * pins.size();
    r.resize(static_cast<Eigen::Index>(m));
    if (J) J->setZero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m_c; ++i) {
      r(i) = vals[i];
      if (J)
        for (auto [col, v] : rows[i]) (*J)(i, col) += v;
    }
    for (std::size_t k = 0; k < pins.size(); ++k) {
      const Pin& p = pins[k];
      const auto pr = make_prim<Dual>(cur[p.ref.prim], 0);
      const auto pt = pr.anchor(p.ref.anchor);
      const Dual comps[2] = {pt.x - Dual(p.target.x), pt.y - Dual(p.target.y)};
      for (int d = 0; d < 2; ++d) {
        const std::size_t row = m_c + 2 * k + d;
        r(row) = pin_scale * comps[d].v;
        if (J)
          for (int q = 0; q < param_count(cur[p.ref.prim].kind); ++q)
            (*J)(row, off[p.ref.prim] + q) += pin_scale * comps[d].d[q];
      }
    }
    return m_c;
  };

  auto status = [&](const std::vector<Primitive>& cur, double& max_res, double& max_pin) {
    max_res = 0.0;
    for (const auto& c : sketch.constraints) {
      const auto v = eval_double(cur, c);
      double s = 0.0;
      for (double x : v) s += x * x;
      const double val = std::sqrt(s);
      max_res = std::isfinite(val) ? std::max(max_res, val) : INFINITY;
    }
    max_pin = 0.0;
    for (const auto& p : pins) {
      const auto a = anchor_point(cur[p.ref.prim], p.ref.anchor);
      max_pin = std::max(max_pin, a ? norm(*a - p.target) : INFINITY);
    }
  };

  std::vector<Primitive> cur = prims;
  std::vector<double> x = pack_parameters(cur);
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  evaluate(cur, r, &J);
  double cost = r.squaredNorm();
  double mu = opt.mu_init;
  int iter = 0;
  const double done_tol = 1e-13;
  double max_res = 0.0, max_pin = 0.0;
  status(cur, max_res, max_pin);
  while (iter < opt.max_iters && std::isfinite(cost) && (max_res > done_tol || max_pin > done_tol)) {
    ++iter;
    const Eigen::Index m = r.size();
    Eigen::MatrixXd A(m + static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd b(m + static_cast<Eigen::Index>(n));
    A.topRows(m) = J;
    A.bottomRows(static_cast<Eigen::Index>(n)) =
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) * std::sqrt(mu);
    b.head(m) = -r;
    b.tail(static_cast<Eigen::Index>(n)).setZero();
    const Eigen::VectorXd step = A.householderQr().solve(b);
    std::vector<double> trial_x = x;
    for (std::size_t i = 0; i < n; ++i) trial_x[i] += step(static_cast<Eigen::Index>(i));
    const auto trial = unpack_parameters(prims, trial_x);
    Eigen::VectorXd tr;
    Eigen::MatrixXd tJ;
    evaluate(trial, tr, &tJ);
    const double tcost = tr.squaredNorm();
    if (std::isfinite(tcost) && tcost < cost) {
      x = std::move(trial_x);
      cur = trial;
      r = std::move(tr);
      J = std::move(tJ);
      const bool tiny = cost - tcost <= 1e-30;
      cost = tcost;
      mu = std::max(opt.mu_min, mu / 3.0);
      status(cur, max_res, max_pin);
      if (tiny) break;
    } else {
      mu *= 4.0;
      if (mu > opt.mu_max) break;
    }
  }
  status(cur, max_res, max_pin);
  if (report) *report = {iter, max_res, max_pin};
  if (!(max_res < opt.tol) || !(max_pin < opt.tol))
    throw Error(ErrorCode::NonConvergence, kModule,
                fmt::format("after {} iterations max residual {:.3g}, max pin error {:.3g}", iter, max_res, max_pin));
  return {cur, sketch.constraints};
}

ReconstructedSketch reconstruct_constraints(std::span<const Primitive> prims, const ToleranceSet& tol,
                                            const SolveOptions& opt) {
  ReconstructedSketch out;
  ConstrainedSketch sk{{prims.begin(), prims.end()}, infer_constraints(prims, tol)};
  try {
    out.sketch = solve(sk, {}, opt);
    out.solved = true;
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonConvergence) throw;
  }
  ConstrainedSketch reduced{sk.primitives, {}};
  for (const auto& c : sk.constraints)
    if (c.kind == ConstraintKind::Coincident) reduced.constraints.push_back(c);
  out.reduced = true;
  try {
    out.sketch = solve(reduced, {}, opt);
    out.solved = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonConvergence) throw;
    out.sketch = reduced;
  }
  return out;
}

}  // namespace slicecad
