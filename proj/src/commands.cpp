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

#include "slicecad/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <fmt/format.h>

#include "slicecad/datagen.hpp"
#include "slicecad/error.hpp"
#include "slicecad/metrics.hpp"
#include "slicecad/pipeline.hpp"
#include "slicecad/raster.hpp"
#include "slicecad/serialize.hpp"

namespace fs = std::filesystem;

namespace slicecad {
namespace {

void note(const GlobalOptions& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cli", fmt::format("cannot write {}", path.string()));
  out << text;
}

std::string axis_str(Axis a) { return std::string(1, axis_name(a)); }

Json norm_json(const Norm2D& n) { return {{"t_x", n.t_x}, {"t_y", n.t_y}, {"s", n.s}}; }

Json opt_number(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

void write_report(const fs::path& out, Json report, int code, const std::string& error = {}) {
  report["exit_code"] = code;
  report["status"] = code == kExitOk ? "ok" : (code == kExitInput ? "input_error" : "invalid");
  if (!error.empty()) report["error"] = error;
  fs::create_directories(out);
  write_json_file(report, out / "report.json");
}

/// Runs a command body, turning errors into a report and an exit code.
int guarded(const std::string& command, const fs::path& out, const std::function<int(Json&)>& body) {
  Json report{{"command", command}};
  try {
    const int code = body(report);
    write_report(out, std::move(report), code);
    return code;
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    std::cerr << e.what() << '\n';
    try {
      write_report(out, std::move(report), code, e.what());
    } catch (const std::exception& inner) {
      std::cerr << inner.what() << '\n';
    }
    return code;
  }
}

Json slice_json(const SliceRecord& rec, const BBoxTransform& tf) {
  Json loops = Json::array();
  if (!rec.loops.empty()) {
    try {
      const Projection proj = project_and_normalize(rec.loops, rec.plane);
      for (const auto& l : proj.loops) {
        Json pts = Json::array();
        for (auto p : l.points) pts.push_back(to_json(p));
        loops.push_back({{"orientation", l.orientation == Orientation::Ccw ? "ccw" : "cw"}, {"points", pts}});
      }
    } catch (const Error&) {
      // degenerate profile: reported with no loops
    }
  }
  const int a = index(rec.axis);
  return {{"axis", axis_str(rec.axis)},
          {"index", rec.index},
          {"offset", rec.plane.origin[a]},
          {"offset_original", tf.invert(rec.plane.origin)[a]},
          {"loops", loops},
          {"open_chains", rec.open_chains.size()},
          {"norm", norm_json(rec.norm)}};
}

Json planes_json(const std::vector<SliceRecord>& slices, const Detection& det, const BBoxTransform& tf,
                 const PlaneLabels* labels, const DetectionMetrics* metrics) {
  Json cands = Json::array();
  for (std::size_t i = 0; i < det.scores.size(); ++i) {
    const PlaneScore& s = det.scores[i];
    const int a = index(s.axis);
    Json c{{"axis", axis_str(s.axis)},
           {"index", s.index},
           {"offset", slices[i].plane.origin[a]},
           {"offset_original", tf.invert(slices[i].plane.origin)[a]},
           {"score", s.score},
           {"is_key", s.is_key}};
    if (labels) c["label"] = labels->labels[i];
    cands.push_back(std::move(c));
  }
  Json keys = Json::array();
  for (const auto& k : det.keys) {
    Point3 o;
    o[index(k.axis)] = k.offset;
    keys.push_back({{"axis", axis_str(k.axis)},
                    {"offset", k.offset},
                    {"offset_original", tf.invert(o)[index(k.axis)]},
                    {"candidate", k.candidate},
                    {"loops", k.profile.loops.size()}});
  }
  Json j{{"candidates", cands}, {"keys", keys}};
  if (metrics)
    j["metrics"] = {{"precision", metrics->precision}, {"recall", metrics->recall}, {"f1", metrics->f1},
                    {"tp", metrics->tp},               {"fp", metrics->fp},         {"fn", metrics->fn}};
  return j;
}

std::string sketch_stem(const LoopResult& r) { return fmt::format("key{:02d}_loop{:02d}", r.key, r.ordinal); }

Json write_sketches(const std::vector<LoopResult>& loops, const fs::path& dir, int image_size) {
  fs::create_directories(dir);
  Json list = Json::array();
  for (const auto& r : loops) {
    const std::string stem = sketch_stem(r);
    write_json_file(to_json(r.sketch), dir / (stem + ".sketch.json"));
    const RasterImage sketch_img = render_sketch(r.sketch, image_size);
    const RasterImage slice_img = render_loops({&r.loop, 1}, image_size);
    write_pgm(sketch_img, dir / (stem + ".pgm"));
    write_pgm(slice_img, dir / (stem + ".slice.pgm"));
    std::optional<double> scd;
    try {
      scd = sketch_chamfer_distance(slice_img, sketch_img);
    } catch (const Error&) {
    }
    list.push_back({{"key", r.key},
                    {"loop", r.ordinal},
                    {"sketch", stem + ".sketch.json"},
                    {"type", std::string(to_string(r.type))},
                    {"parent", r.parent},
                    {"primitives", r.sketch.primitives.size()},
                    {"constraints", r.sketch.constraints.size()},
                    {"fit_max_residual", r.fit.max_residual},
                    {"unfittable", r.fit.unfittable},
                    {"solved", r.solved},
                    {"reduced", r.reduced},
                    {"scd", opt_number(scd)}});
  }
  return list;
}

Json specs_json(const std::vector<ExtrusionSpec>& specs, const OptTrace& trace) {
  Json list = Json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    list.push_back({{"origin", to_json(s.plane.origin)},
                    {"normal", to_json(s.plane.normal)},
                    {"type", std::string(to_string(s.type))},
                    {"direction", to_json(s.direction)},
                    {"length", s.length},
                    {"init_length", i < trace.init_lengths.size() ? trace.init_lengths[i] : s.length},
                    {"loop_parent", s.loop_parent}});
  }
  return {{"extrusions", list},
          {"losses", trace.losses},
          {"loss_increases", trace.increases},
          {"samples_used", trace.samples_used}};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string cell(std::optional<double> v, double scale = 1.0) {
  if (!v || !std::isfinite(*v)) return "";
  return fmt::format("{:.6f}", *v * scale);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void write_reconstruction(const Reconstruction& rec, const LoadedMesh& lm, const fs::path& out,
                          const PipelineConfig& cfg, Json& report) {
  fs::create_directories(out);
  save_model(rec.model, out / "model.json");
  if (rec.valid) save_obj(tessellate(rec.model), out / "recon.obj");
  write_json_file(planes_json(rec.slices, rec.detection, lm.transform, nullptr, nullptr), out / "planes.json");
  report["sketches"] = write_sketches(rec.loops, out / "sketches", cfg.image_size);
  report["source"] = rec.model.source;
  report["config_hash"] = rec.model.config_hash;
  report["valid"] = rec.valid;
  if (!rec.valid) report["invalid_reason"] = rec.invalid_reason;
  report["steps"] = rec.model.steps.size();
  report["keys"] = rec.detection.keys.size();
  report["keys_used"] = rec.keys.size();
  report["optimizer"] = specs_json(rec.specs, rec.trace);
  write_text(out / "timings.txt",
             fmt::format("slice {:.6f}\ndetect {:.6f}\nfit {:.6f}\noptimize {:.6f}\nassemble {:.6f}\ntotal {:.6f}\n",
                         rec.timings.slice, rec.timings.detect, rec.timings.fit, rec.timings.optimize,
                         rec.timings.assemble, rec.timings.total()));
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::ParseError:
      case ErrorCode::EmptyMesh:
      case ErrorCode::IoError:
      case ErrorCode::SchemaError:
      case ErrorCode::InvalidArgument:
        return kExitInput;
      default:
        return kExitInvalid;
    }
  }
  return kExitInput;
}

int cmd_gen(const GenArgs& args, const GlobalOptions& g) {
  return guarded("gen", args.out, [&](Json& report) {
    if (args.count < 0) throw Error(ErrorCode::InvalidArgument, "cli", "--count must be non-negative");
    if (args.max_prims < 3) throw Error(ErrorCode::InvalidArgument, "cli", "--max-prims must be at least 3");
    GenConfig gc{args.max_prims, args.arc_weight, g.config.seed};
    CorpusOptions co;
    co.h = args.height;
    co.displace = args.displace;
    co.displacement_norm = args.displacement_norm;
    std::vector<std::string> log;
    const auto entries = build_corpus(args.count, gc, co, &log);
    write_corpus(entries, args.out);
    for (const auto& l : log) note(g, l);
    report["count"] = entries.size();
    report["skipped"] = log;
    report["seed"] = g.config.seed;
    return kExitOk;
  });
}

int cmd_slice(const fs::path& mesh, const fs::path& out, const GlobalOptions& g) {
  return guarded("slice", out, [&](Json& report) {
    const LoadedMesh lm = load_mesh(mesh);
    const auto slices = slice_all(lm.mesh, g.config.slice);
    Json list = Json::array();
    fs::create_directories(out / "slices");
    for (const auto& s : slices) {
      list.push_back(slice_json(s, lm.transform));
      if (s.loops.empty()) continue;
      try {
        const Projection proj = project_and_normalize(s.loops, s.plane);
        write_pgm(render_loops(proj.loops, g.config.image_size),
                  out / "slices" / fmt::format("{}_{:03d}.pgm", axis_name(s.axis), s.index));
      } catch (const Error&) {
      }
    }
    write_json_file({{"mesh", mesh.filename().string()}, {"n_per_axis", g.config.slice.n_per_axis}, {"slices", list}},
                    out / "slices.json");
    report["slices"] = slices.size();
    report["watertight"] = lm.mesh.is_watertight();
    return kExitOk;
  });
}

int cmd_detect(const fs::path& mesh, const std::optional<fs::path>& gt, const fs::path& out, const GlobalOptions& g) {
  return guarded("detect", out, [&](Json& report) {
    const LoadedMesh lm = load_mesh(mesh);
    const auto slices = slice_all(lm.mesh, g.config.slice);
    const Detection det = detect_key_planes(lm.mesh, slices, g.config.detect, g.config.slice);
    std::optional<PlaneLabels> labels;
    std::optional<DetectionMetrics> metrics;
    if (gt) {
      const CadModel model = load_model(*gt);
      std::vector<Plane> cands;
      for (const auto& s : slices) cands.push_back(s.plane);
      labels = assign_labels(canonical_planes(model, &lm.transform), cands);
      metrics = detection_metrics(det.scores, *labels);
      std::cout << fmt::format("{:<24} P={:.3f} R={:.3f} F1={:.3f}\n", mesh.stem().string(), metrics->precision,
                               metrics->recall, metrics->f1);
    }
    fs::create_directories(out);
    write_json_file(planes_json(slices, det, lm.transform, labels ? &*labels : nullptr, metrics ? &*metrics : nullptr),
                    out / "planes.json");
    report["keys"] = det.keys.size();
    return kExitOk;
  });
}

int cmd_fit(const fs::path& mesh, const fs::path& out, const GlobalOptions& g) {
  return guarded("fit", out, [&](Json& report) {
    const LoadedMesh lm = load_mesh(mesh);
    const auto slices = slice_all(lm.mesh, g.config.slice);
    const Detection det = detect_key_planes(lm.mesh, slices, g.config.detect, g.config.slice);
    const auto keys = pipeline_keys(det, lm.mesh, g.config);
    const auto loops = fit_key_loops(keys, g.config);
    report["sketches"] = write_sketches(loops, out / "sketches", g.config.image_size);
    return kExitOk;
  });
}

int cmd_optimize(const fs::path& mesh, const fs::path& out, const GlobalOptions& g) {
  return guarded("optimize", out, [&](Json& report) {
    const LoadedMesh lm = load_mesh(mesh);
    const auto slices = slice_all(lm.mesh, g.config.slice);
    const Detection det = detect_key_planes(lm.mesh, slices, g.config.detect, g.config.slice);
    const auto keys = pipeline_keys(det, lm.mesh, g.config);
    const auto loops = fit_key_loops(keys, g.config);
    if (loops.empty()) throw Error(ErrorCode::NoSpecs, "cli", "no closed profile loop on any key plane");
    OptConfig opt = g.config.opt;
    opt.seed = g.config.seed;
    OptTrace trace;
    const auto specs = optimize_lengths(lm.mesh, build_specs(loops, keys, opt.n_anchors), opt, &trace);
    fs::create_directories(out);
    write_json_file(specs_json(specs, trace), out / "extrusions.json");
    report["extrusions"] = specs.size();
    return kExitOk;
  });
}

int cmd_reconstruct(const fs::path& mesh, const fs::path& out, const GlobalOptions& g) {
  return guarded("reconstruct", out, [&](Json& report) {
    const LoadedMesh lm = load_mesh(mesh);
    const Reconstruction rec = reconstruct(lm, g.config, mesh.filename().string());
    write_reconstruction(rec, lm, out, g.config, report);
    note(g, fmt::format("{}: {} steps, valid={}", mesh.string(), rec.model.steps.size(), rec.valid));
    return rec.valid ? kExitOk : kExitInvalid;
  });
}

int cmd_eval(const fs::path& manifest, const fs::path& out, const GlobalOptions& g) {
  return guarded("eval", out, [&](Json& report) {
    const Json doc = read_json_file(manifest);
    const fs::path base = manifest.parent_path();
    const Json& entries = require(doc, "entries", "");
    if (!entries.is_array()) throw Error(ErrorCode::SchemaError, "cli", "/entries: expected an array");

    struct Row {
      std::string id;
      bool valid = false;
      std::optional<double> cd, ecd, iou;
      std::string error;
    };
    std::vector<Row> rows(entries.size());
    const PipelineConfig& cfg = g.config;

    parallel_for(entries.size(), g.jobs, [&](std::size_t i) {
      const Json& e = entries[i];
      Row& row = rows[i];
      row.id = e.contains("id") ? (e["id"].is_string() ? e["id"].get<std::string>() : fmt::format("{:04d}", e["id"].get<int>()))
                                : fmt::format("{:04d}", i);
      try {
        std::optional<CadModel> gt;
        if (e.contains("gt")) gt = load_model(resolve(base, e["gt"].get<std::string>()));
        else if (e.contains("model")) gt = load_model(resolve(base, e["model"].get<std::string>()));

        std::optional<CadModel> pred;
        std::optional<Mesh> input;
        if (!gt) {
          if (!e.contains("mesh")) throw Error(ErrorCode::SchemaError, "cli", fmt::format("/entries/{}: needs gt or mesh", i));
          input = load_mesh(resolve(base, e["mesh"].get<std::string>())).mesh;
        }
        if (e.contains("pred")) {
          pred = load_model(resolve(base, e["pred"].get<std::string>()));
        } else if (e.contains("mesh")) {
          const fs::path mesh_path = resolve(base, e["mesh"].get<std::string>());
          const LoadedMesh lm = load_mesh(mesh_path);
          const Reconstruction rec = reconstruct(lm, cfg, mesh_path.filename().string());
          if (e.contains("out")) {
            Json sub{{"command", "reconstruct"}};
            const fs::path dir = resolve(out, e["out"].get<std::string>());
            write_reconstruction(rec, lm, dir, cfg, sub);
            write_report(dir, std::move(sub), rec.valid ? kExitOk : kExitInvalid);
          }
          if (!rec.valid) throw Error(ErrorCode::TriangulationFailure, "cli", rec.invalid_reason);
          pred = rec.model;
        } else {
          throw Error(ErrorCode::SchemaError, "cli", fmt::format("/entries/{}: needs pred or mesh", i));
        }
        if (!is_valid_model(*pred)) throw Error(ErrorCode::TriangulationFailure, "cli", "prediction is not a valid solid");
        const Mesh pred_solid = tessellate(*pred);
        const Mesh gt_solid = gt ? tessellate(*gt) : *input;
        row.cd = chamfer_distance(pred_solid, gt_solid, static_cast<std::size_t>(cfg.eval_points), cfg.seed);
        if (gt) {
          row.ecd = edge_chamfer_distance(*pred, *gt, static_cast<std::size_t>(cfg.edge_points), cfg.seed);
          row.iou = iou(*pred, *gt, cfg.voxel_res);
        }
        row.valid = true;
      } catch (const std::exception& ex) {
        row.valid = false;
        row.error = ex.what();
      }
    });

    std::string csv = "id,cd_x1e3,ecd_x1e3,iou,valid\n";
    std::vector<double> cds, ecds, ious;
    std::size_t invalid = 0;
    Json failures = Json::array();
    for (const auto& r : rows) {
      csv += fmt::format("{},{},{},{},{}\n", r.id, cell(r.cd, 1e3), cell(r.ecd, 1e3), cell(r.iou), r.valid ? 1 : 0);
      if (!r.valid) {
        ++invalid;
        failures.push_back({{"id", r.id}, {"error", r.error}});
        note(g, fmt::format("{}: {}", r.id, r.error));
        continue;
      }
      if (r.cd) cds.push_back(*r.cd);
      if (r.ecd) ecds.push_back(*r.ecd);
      if (r.iou) ious.push_back(*r.iou);
    }
    const double ir = rows.empty() ? 0.0 : static_cast<double>(invalid) / static_cast<double>(rows.size());
    csv += fmt::format("median,{},{},{},\n", cell(median(cds), 1e3), cell(median(ecds), 1e3), cell(median(ious)));
    csv += fmt::format("mean,{},{},{},\n", cell(mean(cds), 1e3), cell(mean(ecds), 1e3), cell(mean(ious)));
    csv += fmt::format("ir,,,,{:.6f}\n", ir);
    fs::create_directories(out);
    write_text(out / "eval.csv", csv);
    std::cout << fmt::format("Med. CD {} | IoU {} | IR {:.4f} | Med. ECD {}\n", cell(median(cds), 1e3),
                             cell(mean(ious)), ir, cell(median(ecds), 1e3));
    report["entries"] = rows.size();
    report["ir"] = ir;
    report["failures"] = failures;
    return kExitOk;
  });
}

int cmd_displace(const fs::path& corpus, const fs::path& out, const GlobalOptions& g) {
  return guarded("displace", out, [&](Json& report) {
    const Json doc = read_json_file(corpus / "manifest.json");
    const Json& entries = require(doc, "entries", "");
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].contains("displacement")) picked.push_back(i);
    if (picked.empty()) throw Error(ErrorCode::InvalidArgument, "cli", "corpus has no displaced entries (build it with --displace)");

    struct Row {
      std::string id;
      DisplaceOutcome outcome;
    };
    std::vector<Row> rows(picked.size());
    const PipelineConfig& cfg = g.config;

    parallel_for(picked.size(), g.jobs, [&](std::size_t k) {
      const Json& e = entries[picked[k]];
      const std::string ptr = fmt::format("/entries/{}", picked[k]);
      Row& row = rows[k];
      row.id = fmt::format("{:04d}", e.value("id", static_cast<int>(picked[k])));
      try {
        const Json& dj = require(e, "displacement", ptr);
        Displacement d;
        d.anchor.prim = static_cast<int>(require_number(dj, "prim", ptr + "/displacement"));
        d.anchor.anchor = anchor_from_string(require_string(dj, "anchor", ptr + "/displacement"));
        d.point = vec2_from_json(require(dj, "point", ptr + "/displacement"), ptr + "/displacement/point");
        d.vector = vec2_from_json(require(dj, "vector", ptr + "/displacement"), ptr + "/displacement/vector");
        const CadModel gt_displaced = load_model(corpus / require_string(e, "displaced_model", ptr));
        const LoadedMesh lm = load_mesh(corpus / require_string(e, "mesh", ptr));
        const Reconstruction rec = reconstruct(lm, cfg, require_string(e, "mesh", ptr));
        if (!rec.valid) throw Error(ErrorCode::TriangulationFailure, "cli", rec.invalid_reason);
        row.outcome = apply_displacement(rec.model, d, gt_displaced, tessellate(gt_displaced), cfg);
      } catch (const std::exception& ex) {
        row.outcome.ok = false;
        row.outcome.error = ex.what();
      }
    });

    std::string csv =
        "id,anchor,cd_base_x1e3,cd_constrained_x1e3,cd_unconstrained_x1e3,iou_constrained,iou_unconstrained,"
        "max_residual,status\n";
    std::vector<double> cb, cc, cu, ic, iu;
    std::size_t failed = 0, nonconv = 0, stripped_invalid = 0;
    Json failures = Json::array();
    for (const auto& r : rows) {
      const auto& o = r.outcome;
      const std::string anchor =
          o.step >= 0 ? fmt::format("{}:{}:{}", o.step, o.anchor.prim, to_string(o.anchor.anchor)) : "";
      if (!o.ok) {
        csv += fmt::format("{},{},,,,,,,{}\n", r.id, anchor, o.nonconvergence ? "nonconvergence" : "failed");
        ++failed;
        nonconv += o.nonconvergence;
        failures.push_back({{"id", r.id}, {"error", o.error}});
        note(g, fmt::format("{}: {}", r.id, o.error));
        continue;
      }
      const std::optional<double> ucd = o.unconstrained_valid ? std::optional(o.cd_unconstrained) : std::nullopt;
      const std::optional<double> uiou = o.unconstrained_valid ? std::optional(o.iou_unconstrained) : std::nullopt;
      csv += fmt::format("{},{},{},{},{},{},{},{:.3e},{}\n", r.id, anchor, cell(o.cd_base, 1e3),
                         cell(o.cd_constrained, 1e3), cell(ucd, 1e3), cell(o.iou_constrained), cell(uiou),
                         o.max_residual, o.unconstrained_valid ? "ok" : "unconstrained_invalid");
      if (!o.unconstrained_valid) {
        ++stripped_invalid;
        note(g, fmt::format("{}: unconstrained edit: {}", r.id, o.unconstrained_error));
        continue;
      }
      // Aggregates are paired: only entries where both edits produced a solid.
      cb.push_back(o.cd_base);
      cc.push_back(o.cd_constrained);
      cu.push_back(o.cd_unconstrained);
      ic.push_back(o.iou_constrained);
      iu.push_back(o.iou_unconstrained);
    }
    const double n = static_cast<double>(rows.size());
    csv += fmt::format("median,,{},{},{},{},{},,\n", cell(median(cb), 1e3), cell(median(cc), 1e3),
                       cell(median(cu), 1e3), cell(median(ic)), cell(median(iu)));
    csv += fmt::format("mean,,{},{},{},{},{},,\n", cell(mean(cb), 1e3), cell(mean(cc), 1e3), cell(mean(cu), 1e3),
                       cell(mean(ic)), cell(mean(iu)));
    csv += fmt::format("ir,,,,,,,,{:.6f}\n", static_cast<double>(failed) / n);
    csv += fmt::format("nonconvergence,,,,,,,,{:.6f}\n", static_cast<double>(nonconv) / n);
    csv += fmt::format("unconstrained_invalid,,,,,,,,{:.6f}\n", static_cast<double>(stripped_invalid) / n);
    fs::create_directories(out);
    write_text(out / "displace.csv", csv);
    std::cout << fmt::format("Med. CD constrained {} | unconstrained {} | failures {}/{}\n", cell(median(cc), 1e3),
                             cell(median(cu), 1e3), failed, rows.size());
    report["entries"] = rows.size();
    report["failures"] = failures;
    return kExitOk;
  });
}

}  // namespace slicecad
