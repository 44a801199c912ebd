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

#include "slicecad/serialize.hpp"

#include <fstream>

#include "slicecad/error.hpp"

namespace slicecad {

namespace {

Error schema(const std::string& ptr, const std::string& what) {
  return Error(ErrorCode::SchemaError, "serialize", (ptr.empty() ? "/" : ptr) + ": " + what);
}

}  // namespace

const Json& require(const Json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) throw schema(ptr, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw schema(ptr + "/" + key, "missing field");
  return *it;
}

double require_number(const Json& j, const std::string& key, const std::string& ptr) {
  const Json& v = require(j, key, ptr);
  if (!v.is_number()) throw schema(ptr + "/" + key, "expected a number");
  return v.get<double>();
}

std::string require_string(const Json& j, const std::string& key, const std::string& ptr) {
  const Json& v = require(j, key, ptr);
  if (!v.is_string()) throw schema(ptr + "/" + key, "expected a string");
  return v.get<std::string>();
}

Json to_json(Vec2 p) { return Json::array({p.x, p.y}); }
Json to_json(const Vec3& p) { return Json::array({p.x, p.y, p.z}); }

Json to_json(const Primitive& p) {
  Json j;
  j["kind"] = std::string(to_string(p.kind));
  switch (p.kind) {
    case PrimitiveKind::Line:
      j["start"] = to_json(p.a);
      j["end"] = to_json(p.b);
      break;
    case PrimitiveKind::Arc:
      j["start"] = to_json(p.a);
      j["mid"] = to_json(p.b);
      j["end"] = to_json(p.c);
      break;
    case PrimitiveKind::Circle:
      j["center"] = to_json(p.a);
      j["radius"] = p.r;
      break;
  }
  return j;
}

Json to_json(const Constraint& c) {
  Json refs = Json::array();
  for (const auto& r : c.refs) refs.push_back({{"prim", r.prim}, {"anchor", std::string(to_string(r.anchor))}});
  return {{"kind", std::string(to_string(c.kind))}, {"refs", refs}};
}

Json to_json(const ConstrainedSketch& s) {
  Json prims = Json::array(), cons = Json::array();
  for (const auto& p : s.primitives) prims.push_back(to_json(p));
  for (const auto& c : s.constraints) cons.push_back(to_json(c));
  return {{"primitives", prims}, {"constraints", cons}};
}

Vec2 vec2_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw schema(ptr, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw schema(ptr, "expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Primitive primitive_from_json(const Json& j, const std::string& ptr) {
  const std::string kind = require_string(j, "kind", ptr);
  PrimitiveKind k;
  try {
    k = primitive_kind_from_string(kind);
  } catch (const Error&) {
    throw schema(ptr + "/kind", "unknown primitive kind '" + kind + "'");
  }
  auto pt = [&](const char* key) { return vec2_from_json(require(j, key, ptr), ptr + "/" + key); };
  switch (k) {
    case PrimitiveKind::Line: return Primitive::line(pt("start"), pt("end"));
    case PrimitiveKind::Arc: return Primitive::arc(pt("start"), pt("mid"), pt("end"));
    case PrimitiveKind::Circle: return Primitive::circle(pt("center"), require_number(j, "radius", ptr));
  }
  throw schema(ptr, "unreachable");
}

Constraint constraint_from_json(const Json& j, const std::string& ptr) {
  Constraint c;
  const std::string kind = require_string(j, "kind", ptr);
  try {
    c.kind = constraint_kind_from_string(kind);
  } catch (const Error&) {
    throw schema(ptr + "/kind", "unknown constraint kind '" + kind + "'");
  }
  const Json& refs = require(j, "refs", ptr);
  if (!refs.is_array()) throw schema(ptr + "/refs", "expected an array");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const std::string rp = ptr + "/refs/" + std::to_string(i);
    const Json& prim = require(refs[i], "prim", rp);
    if (!prim.is_number_integer()) throw schema(rp + "/prim", "expected an integer");
    const std::string anchor = require_string(refs[i], "anchor", rp);
    ConstraintRef r;
    r.prim = prim.get<int>();
    try {
      r.anchor = anchor_from_string(anchor);
    } catch (const Error&) {
      throw schema(rp + "/anchor", "unknown anchor '" + anchor + "'");
    }
    c.refs.push_back(r);
  }
  return c;
}

ConstrainedSketch sketch_from_json(const Json& j, const std::string& ptr) {
  ConstrainedSketch s;
  const Json& prims = require(j, "primitives", ptr);
  if (!prims.is_array()) throw schema(ptr + "/primitives", "expected an array");
  for (std::size_t i = 0; i < prims.size(); ++i)
    s.primitives.push_back(primitive_from_json(prims[i], ptr + "/primitives/" + std::to_string(i)));
  if (j.contains("constraints")) {
    const Json& cons = j["constraints"];
    if (!cons.is_array()) throw schema(ptr + "/constraints", "expected an array");
    for (std::size_t i = 0; i < cons.size(); ++i) {
      const std::string cp = ptr + "/constraints/" + std::to_string(i);
      Constraint c = constraint_from_json(cons[i], cp);
      for (std::size_t r = 0; r < c.refs.size(); ++r)
        if (c.refs[r].prim < 0 || static_cast<std::size_t>(c.refs[r].prim) >= s.primitives.size())
          throw schema(cp + "/refs/" + std::to_string(r) + "/prim", "primitive index out of range");
      s.constraints.push_back(std::move(c));
    }
  }
  return s;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "serialize", "cannot read " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "serialize", path.string() + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "serialize", "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace slicecad
