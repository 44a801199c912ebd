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

#include "slicecad/plane_detect.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

constexpr const char* kModule = "plane_detect";

}  // namespace

int ProfileSignature::hamming(const ProfileSignature& o) const {
  int d = 0;
  for (std::size_t i = 0; i < std::min(mask.size(), o.mask.size()); ++i) d += std::popcount(mask[i] ^ o.mask[i]);
  return d;
}

bool ProfileSignature::matches(const ProfileSignature& o, const DetectConfig& cfg) const {
  return loop_count == o.loop_count && hamming(o) <= cfg.max_hamming && std::abs(area - o.area) < cfg.area_tol;
}

ProfileSignature profile_signature(const SliceRecord& slice, int mask_res) {
  if (mask_res < 1 || mask_res > 64) throw Error(ErrorCode::InvalidArgument, kModule, "mask_res must be in [1,64]");
  ProfileSignature sig;
  sig.loop_count = static_cast<int>(slice.loops.size());
  sig.mask.assign(mask_res, 0);
  std::vector<std::vector<Vec2>> rings;
  for (const auto& l : slice.loops) {
    rings.push_back(to_plane_2d(l, slice.axis));
    sig.area += std::abs(signed_area(rings.back()));
  }
  if (rings.empty()) return sig;
  for (int r = 0; r < mask_res; ++r)
    for (int c = 0; c < mask_res; ++c) {
      const Vec2 p{(c + 0.5) / mask_res, (r + 0.5) / mask_res};
      bool in = false;
      for (const auto& ring : rings)
        if (point_in_polygon(p, ring)) in = !in;
      if (in) sig.mask[r] |= std::uint64_t{1} << c;
    }
  return sig;
}

std::vector<PlaneScore> BandStartScorer::score(std::span<const SliceRecord> slices) const {
  std::vector<PlaneScore> out(slices.size());
  std::vector<ProfileSignature> sigs;
  sigs.reserve(slices.size());
  for (std::size_t i = 0; i < slices.size(); ++i) {
    out[i] = {slices[i].axis, slices[i].index, 0.0, false};
    sigs.push_back(profile_signature(slices[i], cfg_.mask_res));
  }
  // Band starts per axis, walking slices in index order.
  std::vector<std::size_t> starts[3];
  for (int a = 0; a < 3; ++a) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < slices.size(); ++i)
      if (index(slices[i].axis) == a) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return slices[l].index < slices[r].index; });
    const ProfileSignature* band = nullptr;
    for (auto i : order) {
      if (sigs[i].empty()) {
        band = nullptr;
        continue;
      }
      if (band && sigs[i].matches(*band, cfg_)) continue;
      band = &sigs[i];
      starts[a].push_back(i);
    }
  }
  std::size_t fewest = SIZE_MAX;
  for (const auto& s : starts)
    if (!s.empty()) fewest = std::min(fewest, s.size());
  for (const auto& s : starts) {
    const double v = !cfg_.fewest_band_axes || s.size() == fewest
                         ? 1.0
                         : 0.5 * static_cast<double>(fewest) / static_cast<double>(s.size());
    for (auto i : s) out[i].score = v;
  }
  for (auto& p : out) p.is_key = p.score >= cfg_.tau;
  return out;
}

std::vector<PlaneScore> score_slices(std::span<const SliceRecord> slices, const DetectConfig& cfg) {
  return BandStartScorer(cfg).score(slices);
}

Detection detect_key_planes(const Mesh& mesh, std::span<const SliceRecord> slices, const DetectConfig& cfg,
                            const SliceConfig& slice_cfg) {
  Detection det;
  det.scores = score_slices(slices, cfg);
  const BoundingBox bb = mesh.bounds();
  std::vector<PlaneScore> moved = det.scores;
  for (auto& p : moved) p.is_key = false;

  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (!det.scores[i].is_key) continue;
    const SliceRecord& rec = slices[i];
    const int a = index(rec.axis);
    const double z = rec.plane.origin[a];
    // Level of the previous candidate on this axis, or just below the bounds.
    double below = bb.min[a] - 1.0;
    for (const auto& s : slices)
      if (s.axis == rec.axis && s.index == rec.index - 1) below = s.plane.origin[a];
    std::set<double> levels;
    for (const auto& v : mesh.vertices)
      if (v[a] > below && v[a] <= z) levels.insert(v[a]);
    const ProfileSignature band = profile_signature(rec, cfg.mask_res);
    KeyPlane key{rec.axis, z, 0, rec};
    for (double level : levels) {
      SliceRecord probe = slice_at(mesh, rec.axis, level + cfg.refine_eps, rec.index, slice_cfg);
      if (profile_signature(probe, cfg.mask_res).matches(band, cfg)) {
        key.offset = level;
        key.profile = std::move(probe);
        break;
      }
    }
    // Candidate nearest to the refined level on the same axis (lower index on ties).
    std::size_t best = i;
    double best_d = INFINITY;
    for (std::size_t j = 0; j < slices.size(); ++j) {
      if (slices[j].axis != rec.axis) continue;
      const double d = std::abs(slices[j].plane.origin[a] - key.offset);
      if (d < best_d || (d == best_d && slices[j].index < slices[best].index)) {
        best_d = d;
        best = j;
      }
    }
    key.candidate = static_cast<int>(best);
    moved[best].is_key = true;
    moved[best].score = std::max(moved[best].score, det.scores[i].score);
    if (best != i) moved[i].score = std::min(moved[i].score, std::nextafter(cfg.tau, 0.0));
    det.keys.push_back(std::move(key));
  }
  for (auto& p : moved) {
    if (p.is_key) continue;
    if (p.score >= cfg.tau) p.score = std::nextafter(cfg.tau, 0.0);
  }
  det.scores = std::move(moved);
  return det;
}

Plane canonicalize_extrusion_plane(const Point3& o, const Vec3& n, double e1, double e2, ExtentType type) {
  Point3 o_star = o;
  if (type == ExtentType::Symmetric) o_star = o - n * e1;
  else if (type == ExtentType::TwoSided) o_star = o - n * e2;
  const Point3 fwd = o + n * e1, bwd = o + n * e2;
  const Vec3 d = fwd - bwd;
  const double len = norm(d);
  if (!(len > 0.0)) throw Error(ErrorCode::ZeroExtent, kModule, "forward and backward limits coincide");
  const Vec3 n1 = d / len;
  const Vec3 n_star{std::abs(n1.x), std::abs(n1.y), std::abs(n1.z)};
  if (n_star != n1) o_star = bwd;
  return {o_star, n_star};
}

PlaneLabels assign_labels(std::span<const Plane> canonical, std::span<const Plane> candidates) {
  PlaneLabels out;
  out.labels.assign(candidates.size(), 0);
  out.canonical.assign(canonical.begin(), canonical.end());
  for (const auto& c : canonical) {
    const auto ax = c.axis();
    if (!ax) throw Error(ErrorCode::NoSameAxisCandidate, kModule, "canonical plane normal is not axis-aligned");
    const int a = index(*ax);
    std::size_t best = candidates.size();
    double best_d = INFINITY;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (candidates[j].axis() != ax) continue;
      const double d = std::abs(candidates[j].origin[a] - c.origin[a]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == candidates.size())
      throw Error(ErrorCode::NoSameAxisCandidate, kModule, fmt::format("no candidate on axis {}", axis_name(*ax)));
    out.labels[best] = 1;
  }
  return out;
}

DetectionMetrics detection_metrics(std::span<const PlaneScore> pred, const PlaneLabels& labels) {
  if (pred.size() != labels.labels.size())
    throw Error(ErrorCode::LengthMismatch, kModule,
                fmt::format("{} predictions vs {} labels", pred.size(), labels.labels.size()));
  DetectionMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i].is_key, l = labels.labels[i] != 0;
    m.tp += p && l;
    m.fp += p && !l;
    m.fn += !p && l;
  }
  const bool all_zero = m.tp == 0 && m.fp == 0 && m.fn == 0;
  auto ratio = [&](int num, int den) { return den == 0 ? (all_zero ? 1.0 : 0.0) : static_cast<double>(num) / den; };
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn);
  return m;
}

}  // namespace slicecad
