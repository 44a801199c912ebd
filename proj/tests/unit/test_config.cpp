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
#include "slicecad/config.hpp"
#include "slicecad/error.hpp"

using namespace slicecad;
using namespace slicecad::testing;

TEST_CASE("config text round trip") {
  PipelineConfig cfg;
  set_config_value(cfg, "lr", "0.001");
  set_config_value(cfg, "n_per_axis", "24");
  set_config_value(cfg, "loss_scope", "global");
  set_config_value(cfg, "constraints", "false");
  set_config_value(cfg, "seed", "9");
  CHECK(cfg.opt.lr == 0.001);
  CHECK(cfg.slice.n_per_axis == 24);
  CHECK(cfg.opt.scope == LossScope::Global);
  CHECK_FALSE(cfg.constraints);
  CHECK(cfg.opt.seed == 9);

  const auto text = describe(cfg);
  const auto back = parse_config(text);
  CHECK(describe(back) == text);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(PipelineConfig{}) != config_hash(cfg));

  for (const auto& key : config_keys()) CHECK(text.find(key + " = ") != std::string::npos);
}

TEST_CASE("config files with comments") {
  const auto dir = temp_dir("config");
  write_file(dir / "c.cfg", "# tuned\niters = 50   # fewer steps\n\nlambda = 0\n");
  const auto cfg = load_config(dir / "c.cfg");
  CHECK(cfg.opt.iters == 50);
  CHECK(cfg.opt.lambda == 0.0);
  CHECK(cfg.opt.lr == PipelineConfig{}.opt.lr);
}

TEST_CASE("bad config input") {
  PipelineConfig cfg;
  CHECK_THROWS_AS(set_config_value(cfg, "no_such_key", "1"), Error);
  CHECK_THROWS_AS(set_config_value(cfg, "iters", "many"), Error);
  CHECK_THROWS_AS(set_config_value(cfg, "loss_scope", "local"), Error);
  try {
    (void)parse_config("iters = 5\nbogus = 1\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
    CHECK(e.message().find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/slicecad.cfg"), Error);
}
