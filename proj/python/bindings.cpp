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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "slicecad/config.hpp"
#include "slicecad/constraints.hpp"
#include "slicecad/datagen.hpp"
#include "slicecad/error.hpp"
#include "slicecad/metrics.hpp"
#include "slicecad/pipeline.hpp"
#include "slicecad/raster.hpp"
#include "slicecad/serialize.hpp"
#include "slicecad/sketch_fit.hpp"

namespace py = pybind11;
using namespace slicecad;

namespace {

using XY = std::pair<double, double>;
using XYZ = std::tuple<double, double, double>;

PipelineConfig config_from(const std::optional<std::string>& text) {
  return text ? parse_config(*text) : PipelineConfig{};
}

std::vector<XYZ> vertices_of(const Mesh& m) {
  std::vector<XYZ> out;
  for (const auto& v : m.vertices) out.emplace_back(v.x, v.y, v.z);
  return out;
}

std::vector<std::array<int, 3>> faces_of(const Mesh& m) {
  std::vector<std::array<int, 3>> out;
  for (const auto& f : m.faces) out.push_back({static_cast<int>(f[0]), static_cast<int>(f[1]), static_cast<int>(f[2])});
  return out;
}

Mesh mesh_from(const std::vector<XYZ>& verts, const std::vector<std::array<int, 3>>& faces) {
  Mesh m;
  for (const auto& [x, y, z] : verts) m.vertices.push_back({x, y, z});
  for (const auto& f : faces) {
    for (int i : f)
      if (i < 0 || static_cast<std::size_t>(i) >= verts.size())
        throw Error(ErrorCode::InvalidArgument, "python", "face index out of range");
    m.faces.push_back({static_cast<std::uint32_t>(f[0]), static_cast<std::uint32_t>(f[1]),
                       static_cast<std::uint32_t>(f[2])});
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mesh to sketch-extrude CAD reconstruction";

  static py::exception<Error> exc(m, "SlicecadError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(exc.ptr(), e.what());
    }
  });

  m.def("config_keys", &config_keys);
  m.def("default_config", [] { return describe(PipelineConfig{}); });
  m.def(
      "normalize_config", [](const std::string& text) { return describe(parse_config(text)); },
      py::arg("text"));

  m.def(
      "load_mesh",
      [](const std::filesystem::path& path) {
        const LoadedMesh lm = load_mesh(path);
        const auto& t = lm.transform.translate;
        return py::dict(py::arg("vertices") = vertices_of(lm.mesh), py::arg("faces") = faces_of(lm.mesh),
                        py::arg("translate") = XYZ{t.x, t.y, t.z}, py::arg("scale") = lm.transform.scale,
                        py::arg("watertight") = lm.mesh.is_watertight(), py::arg("volume") = lm.mesh.volume());
      },
      py::arg("path"));

  m.def(
      "mesh_volume",
      [](const std::vector<XYZ>& v, const std::vector<std::array<int, 3>>& f) { return mesh_from(v, f).volume(); },
      py::arg("vertices"), py::arg("faces"));

  m.def(
      "reconstruct",
      [](const std::filesystem::path& path, const std::optional<std::string>& config) {
        const PipelineConfig cfg = config_from(config);
        Reconstruction rec;
        {
          py::gil_scoped_release release;
          rec = reconstruct(load_mesh(path), cfg, path.filename().string());
        }
        return py::dict(py::arg("model") = model_to_json(rec.model).dump(), py::arg("valid") = rec.valid,
                        py::arg("invalid_reason") = rec.invalid_reason, py::arg("keys") = rec.detection.keys.size(),
                        py::arg("seconds") = rec.timings.total());
      },
      py::arg("path"), py::arg("config") = py::none());

  m.def(
      "fit_loop",
      [](const std::vector<XY>& pts, const std::optional<std::string>& config, bool constrain) {
        const PipelineConfig cfg = config_from(config);
        Loop2D loop;
        for (const auto& [x, y] : pts) loop.points.push_back({x, y});
        FitResult fit = fit_primitives(loop, cfg.fit);
        ConstrainedSketch sk{fit.primitives, {}};
        if (constrain) sk = reconstruct_constraints(fit.primitives, cfg.tol, cfg.solve).sketch;
        return to_json(sk).dump();
      },
      py::arg("points"), py::arg("config") = py::none(), py::arg("constrain") = true);

  m.def(
      "solve_sketch",
      [](const std::string& sketch_json, const std::vector<std::tuple<int, std::string, XY>>& pins) {
        const ConstrainedSketch sk = sketch_from_json(Json::parse(sketch_json));
        std::vector<Pin> ps;
        for (const auto& [prim, anchor, xy] : pins) ps.push_back({{prim, anchor_from_string(anchor)}, {xy.first, xy.second}});
        SolveReport rep;
        const ConstrainedSketch out = solve(sk, ps, {}, &rep);
        return py::make_tuple(to_json(out).dump(), rep.max_residual, rep.iterations);
      },
      py::arg("sketch"), py::arg("pins") = std::vector<std::tuple<int, std::string, XY>>{});

  m.def(
      "constraint_residuals",
      [](const std::string& sketch_json) { return residuals(sketch_from_json(Json::parse(sketch_json))); },
      py::arg("sketch"));

  m.def(
      "tessellate_model",
      [](const std::string& model_json) {
        const Mesh mesh = tessellate(model_from_json(Json::parse(model_json)));
        return py::make_tuple(vertices_of(mesh), faces_of(mesh));
      },
      py::arg("model"));

  m.def(
      "chamfer_distance",
      [](const std::filesystem::path& a, const std::filesystem::path& b, std::size_t n, std::uint64_t seed) {
        return chamfer_distance(load_mesh(a).mesh, load_mesh(b).mesh, n, seed);
      },
      py::arg("mesh_a"), py::arg("mesh_b"), py::arg("n") = 8192, py::arg("seed") = 0);

  m.def(
      "model_metrics",
      [](const std::string& pred, const std::string& gt, int res, std::size_t n, std::uint64_t seed) {
        const CadModel a = model_from_json(Json::parse(pred)), b = model_from_json(Json::parse(gt));
        return py::dict(py::arg("cd") = chamfer_distance(tessellate(a), tessellate(b), n, seed),
                        py::arg("ecd") = edge_chamfer_distance(a, b, 4096, seed), py::arg("iou") = iou(a, b, res),
                        py::arg("valid") = is_valid_model(a));
      },
      py::arg("pred"), py::arg("gt"), py::arg("res") = 64, py::arg("n") = 8192, py::arg("seed") = 0);

  m.def(
      "render_sketch",
      [](const std::string& sketch_json, int size) {
        const RasterImage img = render_sketch(sketch_from_json(Json::parse(sketch_json)), size);
        return py::bytes(encode_pgm(img));
      },
      py::arg("sketch"), py::arg("size") = 128);

  m.def(
      "generate_corpus",
      [](const std::filesystem::path& out, int count, std::uint64_t seed, int max_prims, double arc_weight,
         double height, bool displace) {
        GenConfig gc{max_prims, arc_weight, seed};
        CorpusOptions co;
        co.h = height;
        co.displace = displace;
        const auto entries = build_corpus(count, gc, co);
        write_corpus(entries, out);
        return entries.size();
      },
      py::arg("out"), py::arg("count"), py::arg("seed") = 0, py::arg("max_prims") = 8, py::arg("arc_weight") = 0.3,
      py::arg("height") = 0.3, py::arg("displace") = false);
}
