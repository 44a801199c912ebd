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

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "slicecad/geometry.hpp"
#include "slicecad/sketch.hpp"

namespace slicecad {

using Json = nlohmann::json;

// Sketch JSON, unit-box frame with y up:
//   {"primitives": [{"kind": "line", "start": [x, y], "end": [x, y]},
//                   {"kind": "arc", "start": [..], "mid": [..], "end": [..]},
//                   {"kind": "circle", "center": [..], "radius": r}],
//    "constraints": [{"kind": "coincident",
//                     "refs": [{"prim": 0, "anchor": "end"}, {"prim": 1, "anchor": "start"}]}]}

Json to_json(Vec2 p);
Json to_json(const Vec3& p);
Json to_json(const Primitive& p);
Json to_json(const Constraint& c);
Json to_json(const ConstrainedSketch& s);

// Parsers throw SchemaError naming the JSON pointer of the offending field.
Vec2 vec2_from_json(const Json& j, const std::string& ptr);
Vec3 vec3_from_json(const Json& j, const std::string& ptr);
Primitive primitive_from_json(const Json& j, const std::string& ptr);
Constraint constraint_from_json(const Json& j, const std::string& ptr);
ConstrainedSketch sketch_from_json(const Json& j, const std::string& ptr = "");

/// Member access with a SchemaError at ptr/key when missing.
const Json& require(const Json& j, const std::string& key, const std::string& ptr);
double require_number(const Json& j, const std::string& key, const std::string& ptr);
std::string require_string(const Json& j, const std::string& key, const std::string& ptr);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

}  // namespace slicecad
