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

#include "slicecad/sketch_fit.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numbers>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

constexpr double kPi = std::numbers::pi;

double turning_angle(Vec2 prev, Vec2 cur, Vec2 next) {
  const Vec2 d0 = cur - prev, d1 = next - cur;
  return std::atan2(cross(d0, d1), dot(d0, d1));
}

// Max deviation of a polyline edge [p,q] from the arc primitive, exact.
double edge_arc_deviation(Vec2 p, Vec2 q, const Primitive& arc, const ArcSweep& s) {
  const double two_pi = 2.0 * kPi;
  auto in_span = [&](Vec2 x) {
    double rel = std::atan2(x.y - s.center.y, x.x - s.center.x) - s.start_angle;
    if (s.sweep < 0) rel = -rel;
    rel = std::fmod(rel, two_pi);
    if (rel < 0) rel += two_pi;
    return rel <= std::abs(s.sweep);
  };
  std::vector<double> cuts{0.0, 1.0};
  const Vec2 d = q - p;
  auto add_ray_cut = [&](Vec2 through) {
    const Vec2 dir = through - s.center;
    const double den = cross(d, dir);
    if (std::abs(den) < 1e-300) return;
    const double t = cross(s.center - p, dir) / den;
    const double u = cross(s.center - p, d) / den;
    if (t > 0.0 && t < 1.0 && u >= 0.0) cuts.push_back(t);
  };
  add_ray_cut(arc.a);
  add_ray_cut(arc.c);
  // Perpendicular bisector of the two arc ends.
  {
    const Vec2 m = (arc.a + arc.c) * 0.5, n = arc.c - arc.a;
    const double den = dot(d, n);
    if (std::abs(den) > 1e-300) {
      const double t = dot(m - p, n) / den;
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Vec2 x0 = p + d * cuts[i], x1 = p + d * cuts[i + 1];
    if (norm2(x1 - x0) == 0.0 && i + 2 < cuts.size()) continue;
    const Vec2 xm = (x0 + x1) * 0.5;
    if (in_span(xm)) {
      const double g0 = norm(x0 - s.center), g1 = norm(x1 - s.center);
      const double gmin = point_segment_distance(s.center, x0, x1);
      worst = std::max({worst, std::abs(g0 - s.radius), std::abs(g1 - s.radius), std::abs(gmin - s.radius)});
    } else {
      const bool near_a = norm2(xm - arc.a) <= norm2(xm - arc.c);
      const Vec2 e = near_a ? arc.a : arc.c;
      worst = std::max({worst, norm(x0 - e), norm(x1 - e)});
    }
  }
  return worst;
}

double edge_deviation(Vec2 p, Vec2 q, const Primitive& prim) {
  switch (prim.kind) {
    case PrimitiveKind::Line:
      return std::max(point_segment_distance(p, prim.a, prim.b), point_segment_distance(q, prim.a, prim.b));
    case PrimitiveKind::Circle: {
      const double g0 = norm(p - prim.a), g1 = norm(q - prim.a);
      const double gmin = point_segment_distance(prim.a, p, q);
      return std::max({std::abs(g0 - prim.r), std::abs(g1 - prim.r), std::abs(gmin - prim.r)});
    }
    case PrimitiveKind::Arc: {
      const auto s = arc_sweep(prim);
      if (!s) return INFINITY;
      return edge_arc_deviation(p, q, prim, *s);
    }
  }
  return INFINITY;
}

struct SpanFit {
  Primitive prim;
  double err = INFINITY;
};

// Arc from pts.front() to pts.back() on the least-squares circle.
std::optional<SpanFit> fit_arc_span(std::span<const Vec2> pts) {
  if (pts.size() < 3) return std::nullopt;
  const auto circle = fit_circle(pts);
  if (!circle || !std::isfinite(circle->radius) || circle->radius > 1e3) return std::nullopt;
  const Vec2 c = circle->center;
  // Accumulate the signed angle travelled along the points.
  double travelled = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 u = pts[i] - c, v = pts[i + 1] - c;
    travelled += std::atan2(cross(u, v), dot(u, v));
  }
  if (std::abs(travelled) >= 2.0 * kPi - 1e-9 || std::abs(travelled) < 1e-9) return std::nullopt;
  const double a0 = std::atan2(pts.front().y - c.y, pts.front().x - c.x);
  const double am = a0 + 0.5 * travelled;
  const Vec2 mid = c + Vec2{std::cos(am), std::sin(am)} * circle->radius;
  Primitive arc = Primitive::arc(pts.front(), mid, pts.back());
  if (!circumcircle(arc.a, arc.b, arc.c)) return std::nullopt;
  return SpanFit{arc, polyline_deviation(pts, arc)};
}

SpanFit fit_line_span(std::span<const Vec2> pts) {
  Primitive line = Primitive::line(pts.front(), pts.back());
  if (pts.front() == pts.back()) return {line, INFINITY};
  return {line, polyline_deviation(pts, line)};
}

struct Fitter {
  const FitConfig& cfg;
  bool unfittable = false;

  // Best single-primitive explanation of the span; lines win ties.
  SpanFit best(std::span<const Vec2> pts) const {
    SpanFit l = fit_line_span(pts);
    if (l.err < cfg.line_tol || pts.size() < 3) return l;
    auto a = fit_arc_span(pts);
    if (a && a->err < cfg.arc_tol) return *a;
    if (a && a->err < l.err) return *a;
    return l;
  }

  bool acceptable(const SpanFit& f) const {
    return f.prim.kind == PrimitiveKind::Line ? f.err < cfg.line_tol : f.err < cfg.arc_tol;
  }

  void fit(std::span<const Vec2> pts, int depth, std::vector<SpanFit>& out, std::vector<std::size_t>& lens) {
    SpanFit f = best(pts);
    if (acceptable(f) || pts.size() <= 2) {
      out.push_back(f);
      lens.push_back(pts.size());
      return;
    }
    if (depth >= cfg.max_split_depth) {
      unfittable = true;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        out.push_back(fit_line_span(pts.subspan(i, 2)));
        lens.push_back(2);
      }
      return;
    }
    std::size_t best_k = pts.size() / 2;
    double best_cost = INFINITY;
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
      const double cost = best(pts.first(k + 1)).err + best(pts.subspan(k)).err;
      if (cost < best_cost) {
        best_cost = cost;
        best_k = k;
      }
    }
    fit(pts.first(best_k + 1), depth + 1, out, lens);
    fit(pts.subspan(best_k), depth + 1, out, lens);
  }
};

}  // namespace

std::optional<Circle2> fit_circle(std::span<const Vec2> pts) {
  if (pts.size() < 3) return std::nullopt;
  // Centre the data for conditioning.
  Vec2 mean{};
  for (auto p : pts) mean += p;
  mean = mean / static_cast<double>(pts.size());
  Eigen::MatrixXd A(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 p = pts[i] - mean;
    A(i, 0) = 2.0 * p.x;
    A(i, 1) = 2.0 * p.y;
    A(i, 2) = 1.0;
    b(i) = norm2(p);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d sol = qr.solve(b);
  if (!sol.allFinite()) return std::nullopt;
  Vec2 c{sol(0), sol(1)};
  const double r2 = sol(2) + norm2(c);
  if (!(r2 > 0.0)) return std::nullopt;
  double r = std::sqrt(r2);
  // One Gauss-Newton step on the geometric residuals |p - c| - r.
  Eigen::MatrixXd J(pts.size(), 3);
  Eigen::VectorXd res(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 d = (pts[i] - mean) - c;
    const double dn = norm(d);
    if (dn == 0.0) return Circle2{c + mean, r};
    J(i, 0) = -d.x / dn;
    J(i, 1) = -d.y / dn;
    J(i, 2) = -1.0;
    res(i) = dn - r;
  }
  const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-res);
  if (step.allFinite()) {
    c = c + Vec2{step(0), step(1)};
    r += step(2);
  }
  if (!(r > 0.0)) return std::nullopt;
  return Circle2{c + mean, r};
}

double polyline_deviation(std::span<const Vec2> polyline, const Primitive& prim) {
  if (polyline.size() == 1) return distance_to_primitive(polyline[0], prim);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
    worst = std::max(worst, edge_deviation(polyline[i], polyline[i + 1], prim));
  return worst;
}

FitResult fit_primitives(const Loop2D& loop, const FitConfig& cfg) {
  if (loop.points.size() < 3) throw Error(ErrorCode::InvalidArgument, "sketch_fit", "loop needs >= 3 points");
  FitResult result;
  std::vector<Vec2> pts = loop.points;
  const std::size_t n = pts.size();

  std::vector<Vec2> closed = pts;
  closed.push_back(pts.front());

  // Whole loop as one circle.
  if (n >= 8) {
    if (auto c = fit_circle(pts)) {
      const Primitive circ = Primitive::circle(c->center, c->radius);
      const double err = polyline_deviation(closed, circ);
      if (err < cfg.circle_tol) {
        result.primitives.push_back(circ);
        result.report.residuals.push_back(err);
        result.report.max_residual = err;
        return result;
      }
    }
  }

  const double corner = cfg.corner_angle_deg * kPi / 180.0;
  auto turning = [&](const std::vector<Vec2>& p) {
    std::vector<double> t(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      t[i] = turning_angle(p[(i + p.size() - 1) % p.size()], p[i], p[(i + 1) % p.size()]);
    return t;
  };
  auto turns = turning(pts);

  // Noise shows up as short zig-zags: a vertex turning against both neighbours
  // while staying close to the chord between them.
  double noise = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n, next = (i + 1) % n;
    if (turns[i] * turns[prev] >= 0.0 || turns[i] * turns[next] >= 0.0) continue;
    if (point_segment_distance(pts[i], pts[prev], pts[next]) < cfg.noise_amplitude)
      noise = std::max(noise, std::abs(turns[i]));
  }
  if (noise > 3.0 * corner) {
    std::vector<Vec2> sm(n);
    for (std::size_t i = 0; i < n; ++i) sm[i] = (pts[(i + n - 1) % n] + pts[i] * 2.0 + pts[(i + 1) % n]) * 0.25;
    pts = std::move(sm);
    turns = turning(pts);
    result.report.smoothed = true;
  }

  std::vector<std::size_t> corners;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(turns[i]) > corner) corners.push_back(i);
  for (auto c : corners) result.report.corners.push_back(static_cast<int>(c));
  const bool cornerless = corners.empty();
  if (cornerless) corners.push_back(0);

  Fitter fitter{cfg};
  std::vector<SpanFit> fits;
  std::vector<std::size_t> lens;  // points per span, shared endpoints counted in both
  for (std::size_t k = 0; k < corners.size(); ++k) {
    const std::size_t from = corners[k];
    const std::size_t to = k + 1 < corners.size() ? corners[k + 1] : corners[0] + n;
    std::vector<Vec2> span;
    for (std::size_t i = from; i <= to; ++i) span.push_back(pts[i % n]);
    fitter.fit(span, 0, fits, lens);
  }

  struct Seg {
    std::size_t start;  // index into pts, modulo n
    std::size_t len;    // points covered, shared endpoints counted in both
    SpanFit fit;
  };
  std::vector<Seg> segs;
  {
    std::size_t acc = corners[0];
    for (std::size_t i = 0; i < fits.size(); ++i) {
      segs.push_back({acc % n, lens[i], fits[i]});
      acc += lens[i] - 1;
    }
  }
  auto span_points = [&](std::size_t start, std::size_t len) {
    std::vector<Vec2> s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(pts[(start + i) % n]);
    return s;
  };
  auto is_corner = [&](std::size_t idx) {
    return !cornerless && std::find(corners.begin(), corners.end(), idx % n) != corners.end();
  };
  auto sse = [&](std::span<const Vec2> s, const Primitive& prim) {
    double acc = 0.0;
    for (auto p : s) {
      const double d = distance_to_primitive(p, prim);
      acc += d * d;
    }
    return acc;
  };
  // Best acceptable two-primitive cover of s split at k in [lo, hi]; returns
  // the split index or npos.
  struct Split {
    std::size_t k = std::string::npos;
    SpanFit a, b;
    double cost = INFINITY;
  };
  auto best_split = [&](std::span<const Vec2> s, std::size_t lo, std::size_t hi) {
    Split out;
    for (std::size_t k = lo; k <= hi && k + 1 < s.size(); ++k) {
      if (k < 1) continue;
      const SpanFit fa = fitter.best(s.first(k + 1));
      if (!fitter.acceptable(fa)) continue;
      const SpanFit fb = fitter.best(s.subspan(k));
      if (!fitter.acceptable(fb)) continue;
      const double cost = sse(s.first(k + 1), fa.prim) + sse(s.subspan(k), fb.prim);
      if (cost < out.cost) out = {k, fa, fb, cost};
    }
    return out;
  };
  // Visiting windows in turn: each step brings the next segment to the front.
  auto step = [&](std::size_t i) {
    if (i > 0) std::rotate(segs.begin(), segs.begin() + 1, segs.end());
  };
  auto joined = [&](std::size_t count) {
    std::size_t len = 1;
    for (std::size_t q = 0; q < count; ++q) len += segs[q].len - 1;
    return len;
  };
  auto junctions_free = [&](std::size_t count) {
    for (std::size_t q = 1; q < count; ++q)
      if (is_corner(segs[q].start)) return false;
    return true;
  };

  const std::size_t limit = 4 * n + 16;
  for (std::size_t round = 0; round < limit; ++round) {
    bool changed = false;
    // One primitive for two neighbours.
    for (std::size_t i = 0; i < segs.size() && segs.size() > 1 && !changed; ++i) {
      step(i);
      const std::size_t len = joined(2);
      if (!junctions_free(2) || len > n + 1) continue;
      const auto s = span_points(segs[0].start, len);
      const SpanFit f = fitter.best(s);
      if (!fitter.acceptable(f)) continue;
      segs[0] = {segs[0].start, len, f};
      segs.erase(segs.begin() + 1);
      changed = true;
    }
    // Two primitives for three neighbours.
    for (std::size_t i = 0; i < segs.size() && segs.size() > 2 && !changed; ++i) {
      step(i);
      const std::size_t len = joined(3);
      if (!junctions_free(3) || len > n + 1) continue;
      const auto s = span_points(segs[0].start, len);
      const Split sp = best_split(s, 1, len - 2);
      if (sp.k == std::string::npos) continue;
      segs[0] = {segs[0].start, sp.k + 1, sp.a};
      segs[1] = {(segs[0].start + sp.k) % n, len - sp.k, sp.b};
      segs.erase(segs.begin() + 2);
      changed = true;
    }
    if (!changed) break;
  }

  // Slide each free breakpoint to the least-squares position.
  for (std::size_t sweep = 0; sweep < 3 && segs.size() > 1; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      step(i);
      if (!junctions_free(2)) continue;
      const std::size_t len = joined(2);
      if (len > n + 1) continue;
      const auto s = span_points(segs[0].start, len);
      const std::size_t cur = segs[0].len - 1;
      const Split sp = best_split(s, 1, len - 2);
      if (sp.k == std::string::npos || sp.k == cur) continue;
      const double before = sse(std::span(s).first(cur + 1), segs[0].fit.prim) + sse(std::span(s).subspan(cur), segs[1].fit.prim);
      if (sp.cost >= before) continue;
      segs[0] = {segs[0].start, sp.k + 1, sp.a};
      segs[1] = {(segs[0].start + sp.k) % n, len - sp.k, sp.b};
      moved = true;
    }
    if (!moved) break;
  }

  // Deterministic chain start: the segment beginning nearest the first corner.
  {
    std::size_t first = 0, best_off = n;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::size_t off = (segs[i].start + n - corners[0] % n) % n;
      if (off < best_off) best_off = off, first = i;
    }
    std::rotate(segs.begin(), segs.begin() + static_cast<std::ptrdiff_t>(first), segs.end());
  }
  fits.clear();
  for (const auto& sg : segs) fits.push_back(sg.fit);

  for (const auto& f : fits) {
    result.primitives.push_back(f.prim);
    result.report.residuals.push_back(f.err);
    result.report.max_residual = std::max(result.report.max_residual, f.err);
  }
  result.report.unfittable = fitter.unfittable;
  return result;
}

std::vector<Primitive> quantize_sketch(std::span<const Primitive> prims, int bits) {
  if (bits < 2 || bits > 30) throw Error(ErrorCode::InvalidArgument, "sketch_fit", "quantization bits must be in [2,30]");
  const double levels = static_cast<double>((1u << bits) - 1u);
  auto q = [&](double v) { return std::round(std::clamp(v, 0.0, 1.0) * levels) / levels; };
  auto qp = [&](Vec2 p) { return Vec2{q(p.x), q(p.y)}; };
  std::vector<Primitive> out;
  out.reserve(prims.size());
  for (const auto& p : prims) {
    switch (p.kind) {
      case PrimitiveKind::Line: out.push_back(Primitive::line(qp(p.a), qp(p.b))); break;
      case PrimitiveKind::Circle: out.push_back(Primitive::circle(qp(p.a), std::max(q(p.r), 1.0 / levels))); break;
      case PrimitiveKind::Arc: {
        Primitive a = Primitive::arc(qp(p.a), qp(p.b), qp(p.c));
        if (!circumcircle(a.a, a.b, a.c)) a = Primitive::line(a.a, a.c);
        out.push_back(a);
        break;
      }
    }
  }
  return out;
}

namespace {

int curve_segments(const Primitive& p, const TessellationOptions& opt) {
  if (opt.segments_per_curve > 0) return opt.segments_per_curve;
  double sweep = 2.0 * kPi, r = p.r;
  if (p.kind == PrimitiveKind::Arc) {
    const auto s = arc_sweep(p);
    if (!s) return 1;
    sweep = std::abs(s->sweep);
    r = s->radius;
  }
  const double ratio = std::clamp(1.0 - opt.chord_tol / std::max(r, 1e-12), -1.0, 1.0);
  const double step = 2.0 * std::acos(ratio);
  int n = step > 0 ? static_cast<int>(std::ceil(sweep / step)) : opt.min_segments;
  const int floor_n = p.kind == PrimitiveKind::Circle ? std::max(opt.min_segments, 16) : opt.min_segments;
  return std::clamp(n, floor_n, 4096);
}

}  // namespace

std::vector<Primitive> orient_chain(std::span<const Primitive> prims, double tol, bool allow_gaps) {
  std::vector<Primitive> out(prims.begin(), prims.end());
  if (out.size() < 2) return out;
  auto reverse = [](Primitive& p) {
    if (p.kind == PrimitiveKind::Line) std::swap(p.a, p.b);
    if (p.kind == PrimitiveKind::Arc) std::swap(p.a, p.c);
  };
  auto touches = [&](Vec2 q, const Primitive& p) {
    return std::min(norm(q - p.start()), norm(q - p.end())) <= tol;
  };
  if (!touches(out[0].end(), out[1]) && touches(out[0].start(), out[1])) reverse(out[0]);
  for (std::size_t i = 1; i < out.size(); ++i) {
    const Vec2 prev = out[i - 1].end();
    if (norm(out[i].start() - prev) <= tol) continue;
    if (norm(out[i].end() - prev) <= tol) {
      reverse(out[i]);
      continue;
    }
    if (!allow_gaps)
      throw Error(ErrorCode::OpenChain, "sketch_fit",
                  fmt::format("primitive {} does not touch the end of primitive {} (gap {:.3g})", i, i - 1,
                              std::min(norm(out[i].start() - prev), norm(out[i].end() - prev))));
    if (norm(out[i].end() - prev) < norm(out[i].start() - prev)) reverse(out[i]);
  }
  return out;
}

Loop2D sketch_to_loop(std::span<const Primitive> prims_in, const TessellationOptions& opt) {
  if (prims_in.empty()) throw Error(ErrorCode::OpenChain, "sketch_fit", "empty sketch");
  Loop2D loop;
  if (prims_in.size() == 1 && prims_in[0].kind == PrimitiveKind::Circle) {
    const int n = curve_segments(prims_in[0], opt);
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * i / n;
      loop.points.push_back(prims_in[0].a + Vec2{std::cos(t), std::sin(t)} * prims_in[0].r);
    }
  } else {
    for (const auto& p : prims_in)
      if (p.kind == PrimitiveKind::Circle)
        throw Error(ErrorCode::OpenChain, "sketch_fit", "a circle cannot be part of a primitive chain");
    const std::vector<Primitive> prims = orient_chain(prims_in, 1e-6, opt.allow_gaps);
    for (std::size_t i = 0; i < prims.size(); ++i) {
      const Primitive& p = prims[i];
      const Primitive& next = prims[(i + 1) % prims.size()];
      if (!opt.allow_gaps && norm(p.end() - next.start()) > 1e-6)
        throw Error(ErrorCode::OpenChain, "sketch_fit",
                    fmt::format("primitive {} ends {:.3g} away from the next start", i, norm(p.end() - next.start())));
      loop.points.push_back(p.start());
      if (p.kind == PrimitiveKind::Arc) {
        const auto s = arc_sweep(p);
        if (!s) continue;
        const int n = curve_segments(p, opt);
        for (int k = 1; k < n; ++k) {
          const double t = s->start_angle + s->sweep * k / n;
          loop.points.push_back(s->center + Vec2{std::cos(t), std::sin(t)} * s->radius);
        }
      }
      if (opt.allow_gaps && norm(p.end() - next.start()) > 1e-6) loop.points.push_back(p.end());
    }
  }
  // Collapse exact duplicates (zero-length primitives).
  std::vector<Vec2> clean;
  for (auto p : loop.points)
    if (clean.empty() || norm(p - clean.back()) > 1e-12) clean.push_back(p);
  while (clean.size() > 1 && norm(clean.front() - clean.back()) <= 1e-12) clean.pop_back();
  loop.points = std::move(clean);
  loop.orientation = signed_area(loop.points) >= 0 ? Orientation::Ccw : Orientation::Cw;
  return loop;
}

Loop2D sketch_to_loop(std::span<const Primitive> prims, int pts_per_prim) {
  TessellationOptions opt;
  opt.segments_per_curve = std::max(1, pts_per_prim);
  return sketch_to_loop(prims, opt);
}

std::vector<Vec2> chain_corners(std::span<const Primitive> prims) {
  std::vector<Vec2> out;
  if (prims.size() == 1 && prims[0].kind == PrimitiveKind::Circle) return out;
  for (const auto& p : orient_chain(prims, 1e-6, true))
    if (p.kind != PrimitiveKind::Circle) out.push_back(p.start());
  return out;
}

}  // namespace slicecad
