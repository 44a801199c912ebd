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

#include "slicecad/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "slicecad/error.hpp"
#include "slicecad/geometry.hpp"

namespace slicecad {
namespace {

constexpr const char* kModule = "config";

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::InvalidArgument, kModule, fmt::format("{}: cannot parse '{}'", key, v));
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::InvalidArgument, kModule, fmt::format("{}: expected a boolean, got '{}'", key, v));
}

struct Field {
  std::string key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, std::string_view)> set;
};

template <class T, class Access>
Field make(std::string key, Access access) {
  Field f;
  f.key = key;
  f.get = [access](const PipelineConfig& c) {
    PipelineConfig cc = c;
    if constexpr (std::is_same_v<T, bool>) return std::string(access(cc) ? "true" : "false");
    else return fmt::format("{}", access(cc));
  };
  f.set = [access, key](PipelineConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, bool>) access(c) = parse_bool(key, v);
    else access(c) = parse_number<T>(key, v);
  };
  return f;
}

#define SLICECAD_FIELD(T, name, expr) make<T>(name, [](PipelineConfig& c) -> T& { return c.expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f = {
        SLICECAD_FIELD(int, "n_per_axis", slice.n_per_axis),
        SLICECAD_FIELD(double, "stitch_tol", slice.stitch_tol),
        SLICECAD_FIELD(double, "collinear_deg", slice.collinear_deg),
        SLICECAD_FIELD(int, "mask_res", detect.mask_res),
        SLICECAD_FIELD(int, "max_hamming", detect.max_hamming),
        SLICECAD_FIELD(double, "area_tol", detect.area_tol),
        SLICECAD_FIELD(double, "tau", detect.tau),
        SLICECAD_FIELD(bool, "fewest_band_axes", detect.fewest_band_axes),
        SLICECAD_FIELD(double, "refine_eps", detect.refine_eps),
        SLICECAD_FIELD(double, "corner_angle_deg", fit.corner_angle_deg),
        SLICECAD_FIELD(double, "line_tol", fit.line_tol),
        SLICECAD_FIELD(double, "arc_tol", fit.arc_tol),
        SLICECAD_FIELD(double, "circle_tol", fit.circle_tol),
        SLICECAD_FIELD(int, "max_split_depth", fit.max_split_depth),
        SLICECAD_FIELD(double, "noise_amplitude", fit.noise_amplitude),
        SLICECAD_FIELD(double, "tol_dist", tol.dist),
        SLICECAD_FIELD(double, "tol_angle_deg", tol.angle_deg),
        SLICECAD_FIELD(double, "tol_tangent_deg", tol.tangent_angle_deg),
        SLICECAD_FIELD(int, "solve_max_iters", solve.max_iters),
        SLICECAD_FIELD(double, "solve_tol", solve.tol),
        SLICECAD_FIELD(double, "pin_weight", solve.pin_weight),
        SLICECAD_FIELD(int, "iters", opt.iters),
        SLICECAD_FIELD(double, "lr", opt.lr),
        SLICECAD_FIELD(double, "lambda", opt.lambda),
        SLICECAD_FIELD(int, "n_anchors", opt.n_anchors),
        SLICECAD_FIELD(int, "n_samples", opt.n_samples),
        SLICECAD_FIELD(int, "grid_candidates", opt.grid_candidates),
        SLICECAD_FIELD(int, "grid_sweeps", opt.grid_sweeps),
        SLICECAD_FIELD(int, "max_halvings", opt.max_halvings),
        SLICECAD_FIELD(int, "image_size", image_size),
        SLICECAD_FIELD(int, "voxel_res", voxel_res),
        SLICECAD_FIELD(int, "eval_points", eval_points),
        SLICECAD_FIELD(int, "edge_points", edge_points),
        SLICECAD_FIELD(std::uint64_t, "seed", seed),
        SLICECAD_FIELD(bool, "constraints", constraints),
        SLICECAD_FIELD(bool, "single_axis", single_axis),
    };
    Field scope;
    scope.key = "loss_scope";
    scope.get = [](const PipelineConfig& c) {
      return std::string(c.opt.scope == LossScope::Footprint ? "footprint" : "global");
    };
    scope.set = [](PipelineConfig& c, std::string_view v) {
      if (v == "footprint") c.opt.scope = LossScope::Footprint;
      else if (v == "global") c.opt.scope = LossScope::Global;
      else throw Error(ErrorCode::InvalidArgument, kModule, fmt::format("loss_scope: expected footprint or global, got '{}'", v));
    };
    f.push_back(std::move(scope));
    return f;
  }();
  return all;
}

#undef SLICECAD_FIELD

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void validate(const PipelineConfig& c) {
  auto need = [](bool ok, std::string_view what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, kModule, std::string(what));
  };
  need(c.slice.n_per_axis >= 1, "n_per_axis must be positive");
  need(c.detect.mask_res >= 1 && c.detect.mask_res <= 64, "mask_res must be in [1, 64]");
  need(c.image_size >= 8, "image_size must be at least 8");
  need(c.voxel_res >= 1, "voxel_res must be positive");
  need(c.opt.n_anchors >= 1, "n_anchors must be positive");
  need(c.opt.n_samples >= 1, "n_samples must be positive");
  need(c.eval_points >= 1 && c.edge_points >= 1, "sample counts must be positive");
}

std::uint64_t fnv1a_text(const std::string& s) { return fnv1a(s.data(), s.size()); }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(cfg, trim(value));
      if (key == "seed") cfg.opt.seed = cfg.seed;
      validate(cfg);
      return;
    }
  }
  throw Error(ErrorCode::InvalidArgument, kModule, fmt::format("unknown key '{}'", key));
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, kModule, fmt::format("line {}: expected key = value", line_no));
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), kModule, fmt::format("line {}: {}", line_no, e.message()));
    }
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, kModule, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string describe(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += fmt::format("{} = {}\n", f.key, f.get(cfg));
  return out;
}

std::string config_hash(const PipelineConfig& cfg) {
  return fmt::format("{:016x}", fnv1a_text(describe(cfg)));
}

}  // namespace slicecad
