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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "slicecad/commands.hpp"
#include "slicecad/config.hpp"
#include "slicecad/error.hpp"

namespace fs = std::filesystem;
using namespace slicecad;

int main(int argc, char** argv) {
  CLI::App app{"slicecad: reconstruct sketch-extrude CAD models from triangle meshes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  GlobalOptions g;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "random seed (overrides the config file)");
  app.add_option("--set", overrides, "extra key=value override, repeatable");
  app.add_option("--jobs", g.jobs, "worker threads over manifest entries")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", g.verbose, "log progress to stderr");

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "generate a synthetic sketch-extrude corpus");
  c_gen->add_option("--count", gen.count, "number of entries");
  c_gen->add_option("--max-prims", gen.max_prims, "maximum primitives per loop");
  c_gen->add_option("--arc-weight", gen.arc_weight, "probability of an arc edge");
  c_gen->add_option("--height", gen.height, "extrusion height");
  c_gen->add_flag("--displace", gen.displace, "also build displaced ground truth");
  c_gen->add_option("--displacement-norm", gen.displacement_norm, "displacement length");
  c_gen->add_option("--out", gen.out, "output directory")->required();

  fs::path mesh, out, gt, manifest, corpus;
  auto add_mesh_cmd = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("mesh", mesh, "input mesh (OBJ or STL)")->required();
    c->add_option("--out", out, "output directory")->required();
    return c;
  };
  auto* c_slice = add_mesh_cmd("slice", "slice a mesh along the three axes");
  auto* c_detect = add_mesh_cmd("detect", "score slices and pick key planes");
  c_detect->add_option("--gt", gt, "ground-truth model.json for labels and P/R/F1");
  auto* c_fit = add_mesh_cmd("fit", "fit constrained sketches on the key planes");
  auto* c_opt = add_mesh_cmd("optimize", "optimize extrusion lengths");
  auto* c_rec = add_mesh_cmd("reconstruct", "end-to-end reconstruction");

  auto* c_eval = app.add_subcommand("eval", "evaluate predictions listed in a manifest");
  c_eval->add_option("manifest", manifest, "manifest JSON")->required();
  c_eval->add_option("--out", out, "output directory")->required();

  auto* c_disp = app.add_subcommand("displace", "run the anchor displacement experiment on a corpus");
  c_disp->add_option("corpus", corpus, "corpus directory built with --displace")->required();
  c_disp->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) g.config = load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "cli", "--set expects key=value");
      set_config_value(g.config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) set_config_value(g.config, "seed", std::to_string(*seed));
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitInput;
  }

  if (c_gen->parsed()) return cmd_gen(gen, g);
  if (c_slice->parsed()) return cmd_slice(mesh, out, g);
  if (c_detect->parsed()) return cmd_detect(mesh, gt.empty() ? std::nullopt : std::optional<fs::path>(gt), out, g);
  if (c_fit->parsed()) return cmd_fit(mesh, out, g);
  if (c_opt->parsed()) return cmd_optimize(mesh, out, g);
  if (c_rec->parsed()) return cmd_reconstruct(mesh, out, g);
  if (c_eval->parsed()) return cmd_eval(manifest, out, g);
  if (c_disp->parsed()) return cmd_displace(corpus, out, g);
  return kExitInput;
}
