// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Scene documents (JSON) and the built-in scene registry.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sspg/errors.hpp"
#include "sspg/scene.hpp"

namespace sspg {

namespace builtin {

// Cornell box with a large floating slab. A small light faces the right
// wall from 0.35 away, so most of what the camera sees is lit by the patch
// it paints on that wall.
inline constexpr std::string_view kCornellOccluder = R"({
  "materials": [
    {"name": "white", "kind": "diffuse", "albedo": [0.60, 0.60, 0.60]},
    {"name": "red",   "kind": "diffuse", "albedo": [0.60, 0.14, 0.12]},
    {"name": "wall",  "kind": "diffuse", "albedo": [0.80, 0.80, 0.78]},
    {"name": "slab",  "kind": "diffuse", "albedo": [0.30, 0.40, 0.65]},
    {"name": "ball",  "kind": "diffuse", "albedo": [0.70, 0.60, 0.30]},
    {"name": "lamp",  "kind": "diffuse", "albedo": [0.0, 0.0, 0.0], "emission": [40.0, 36.8, 32.0]}
  ],
  "primitives": [
    {"type": "quad", "corner": [-1, 0, -1],  "edge_u": [0, 0, 2.5],  "edge_v": [2, 0, 0],   "material": "white"},
    {"type": "quad", "corner": [-1, 2, -1],  "edge_u": [2, 0, 0],    "edge_v": [0, 0, 2.5], "material": "white"},
    {"type": "quad", "corner": [-1, 0, -1],  "edge_u": [2, 0, 0],    "edge_v": [0, 2, 0],   "material": "white"},
    {"type": "quad", "corner": [-1, 0, 1.5], "edge_u": [0, 2, 0],    "edge_v": [2, 0, 0],   "material": "white"},
    {"type": "quad", "corner": [-1, 0, -1],  "edge_u": [0, 2, 0],    "edge_v": [0, 0, 2.5], "material": "red"},
    {"type": "quad", "corner": [1, 0, -1],   "edge_u": [0, 0, 2.5],  "edge_v": [0, 2, 0],   "material": "wall"},
    {"type": "quad", "corner": [-0.65, 0.7, -0.65], "edge_u": [0, 0, 1.0], "edge_v": [1.1, 0, 0], "material": "slab"},
    {"type": "quad", "corner": [0.65, 0.95, -0.45], "edge_u": [0, 0.3, 0], "edge_v": [0, 0, 0.3], "material": "lamp"},
    {"type": "sphere", "center": [-0.45, 0.3, 0.75], "radius": 0.3, "material": "ball"}
  ],
  "camera": [
    {"frame": 0, "origin": [0, 1.05, 1.45], "look_at": [0, 0.6, 0], "up": [0, 1, 0], "fov_deg": 65}
  ],
  "background": [0, 0, 0]
})";

// Long dark corridor. The only light hides 0.35 in front of the pale right
// wall near the far end and faces it; everything else is lit by that bounce.
inline constexpr std::string_view kIndirectCorridor = R"({
  "materials": [
    {"name": "floor",  "kind": "diffuse", "albedo": [0.25, 0.24, 0.22]},
    {"name": "wall",   "kind": "diffuse", "albedo": [0.20, 0.20, 0.20]},
    {"name": "bright", "kind": "diffuse", "albedo": [0.85, 0.85, 0.85]},
    {"name": "lamp",   "kind": "diffuse", "albedo": [0.0, 0.0, 0.0], "emission": [60.0, 56.0, 50.0]}
  ],
  "primitives": [
    {"type": "quad", "corner": [-0.6, 0, -4],   "edge_u": [0, 0, 5],   "edge_v": [1.2, 0, 0], "material": "floor"},
    {"type": "quad", "corner": [-0.6, 1.2, -4], "edge_u": [1.2, 0, 0], "edge_v": [0, 0, 5],   "material": "wall"},
    {"type": "quad", "corner": [-0.6, 0, -4],   "edge_u": [0, 1.2, 0], "edge_v": [0, 0, 5],   "material": "wall"},
    {"type": "quad", "corner": [0.6, 0, -4],    "edge_u": [0, 0, 5],   "edge_v": [0, 1.2, 0], "material": "bright"},
    {"type": "quad", "corner": [-0.6, 0, -4],   "edge_u": [1.2, 0, 0], "edge_v": [0, 1.2, 0], "material": "wall"},
    {"type": "quad", "corner": [-0.6, 0, 1],    "edge_u": [0, 1.2, 0], "edge_v": [1.2, 0, 0], "material": "wall"},
    {"type": "quad", "corner": [0.25, 0.45, -2.15], "edge_u": [0, 0.3, 0], "edge_v": [0, 0, 0.3], "material": "lamp"}
  ],
  "camera": [
    {"frame": 0, "origin": [0, 0.6, 0.9], "look_at": [0, 0.45, -2], "up": [0, 1, 0], "fov_deg": 60}
  ],
  "background": [0, 0, 0]
})";

// Cornell box with a rough-glossy GGX floor under a ceiling light.
inline constexpr std::string_view kGlossyBox = R"({
  "materials": [
    {"name": "white", "kind": "diffuse", "albedo": [0.75, 0.75, 0.75]},
    {"name": "red",   "kind": "diffuse", "albedo": [0.75, 0.18, 0.15]},
    {"name": "green", "kind": "diffuse", "albedo": [0.15, 0.65, 0.20]},
    {"name": "floor", "kind": "glossy",  "albedo": [0.85, 0.85, 0.85], "roughness": 0.2},
    {"name": "ball",  "kind": "diffuse", "albedo": [0.70, 0.70, 0.70]},
    {"name": "lamp",  "kind": "diffuse", "albedo": [0.0, 0.0, 0.0], "emission": [20.0, 18.0, 15.0]}
  ],
  "primitives": [
    {"type": "quad", "corner": [-1, 0, -1],  "edge_u": [0, 0, 2.5],  "edge_v": [2, 0, 0],   "material": "floor"},
    {"type": "quad", "corner": [-1, 2, -1],  "edge_u": [2, 0, 0],    "edge_v": [0, 0, 2.5], "material": "white"},
    {"type": "quad", "corner": [-1, 0, -1],  "edge_u": [2, 0, 0],    "edge_v": [0, 2, 0],   "material": "white"},
    {"type": "quad", "corner": [-1, 0, 1.5], "edge_u": [0, 2, 0],    "edge_v": [2, 0, 0],   "material": "white"},
    {"type": "quad", "corner": [-1, 0, -1],  "edge_u": [0, 2, 0],    "edge_v": [0, 0, 2.5], "material": "red"},
    {"type": "quad", "corner": [1, 0, -1],   "edge_u": [0, 0, 2.5],  "edge_v": [0, 2, 0],   "material": "green"},
    {"type": "quad", "corner": [-0.25, 1.999, -0.25], "edge_u": [0.5, 0, 0], "edge_v": [0, 0, 0.5], "material": "lamp"},
    {"type": "sphere", "center": [0.3, 0.4, -0.2], "radius": 0.4, "material": "ball"}
  ],
  "camera": [
    {"frame": 0, "origin": [0, 1.0, 1.45], "look_at": [0, 0.8, 0], "up": [0, 1, 0], "fov_deg": 65}
  ],
  "background": [0, 0, 0]
})";

struct Entry {
    std::string_view name;
    std::string_view document;
};

inline constexpr std::array<Entry, 3> kRegistry = {{
    {"cornell-occluder", kCornellOccluder},
    {"indirect-corridor", kIndirectCorridor},
    {"glossy-box", kGlossyBox},
}};

}  // namespace builtin

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                           const std::string& entity) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError(entity + ": unknown field '" + key + "'");
    }
}

inline const json& require(const json& obj, const char* key, const std::string& entity) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(entity + ": missing field '" + key + "'");
    return *it;
}

inline double read_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ValidationError(what + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(what + ": not finite");
    return d;
}

inline Vec3 read_vec3(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != 3) throw ValidationError(what + ": expected an array of 3 numbers");
    return {read_number(v[0], what), read_number(v[1], what), read_number(v[2], what)};
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline Material parse_material(const json& m, std::size_t index) {
    const std::string entity = "materials[" + std::to_string(index) + "]";
    if (!m.is_object()) throw ValidationError(entity + ": expected an object");
    reject_unknown(m, {"name", "kind", "albedo", "roughness", "emission"}, entity);
    Material mat;
    const json& name = require(m, "name", entity);
    if (!name.is_string()) throw ValidationError(entity + ": name must be a string");
    mat.name = name.get<std::string>();
    const std::string named = "material '" + mat.name + "'";
    const json& kind = require(m, "kind", named);
    if (kind == "diffuse") {
        mat.kind = MaterialKind::Diffuse;
    } else if (kind == "glossy") {
        mat.kind = MaterialKind::Glossy;
    } else {
        throw ValidationError(named + ": kind must be \"diffuse\" or \"glossy\"");
    }
    if (m.contains("albedo")) mat.albedo = read_vec3(m["albedo"], named + " albedo");
    if (m.contains("roughness")) {
        mat.roughness = read_number(m["roughness"], named + " roughness");
    } else if (mat.kind == MaterialKind::Glossy) {
        throw ValidationError(named + ": glossy materials need a roughness");
    }
    if (m.contains("emission")) mat.emission = read_vec3(m["emission"], named + " emission");
    for (int c = 0; c < 3; ++c) {
        if (mat.albedo[c] < 0.0 || mat.albedo[c] > 1.0)
            throw ValidationError(named + ": albedo outside [0,1]");
        if (mat.emission[c] < 0.0) throw ValidationError(named + ": negative emission");
    }
    if (mat.roughness < 0.0 || mat.roughness > 1.0) throw ValidationError(named + ": roughness outside [0,1]");
    return mat;
}

inline int resolve_material(const json& ref, const std::vector<Material>& materials, const std::string& entity) {
    if (ref.is_number_integer()) {
        const auto id = ref.get<long long>();
        if (id < 0 || id >= static_cast<long long>(materials.size()))
            throw ValidationError(entity + ": material index " + std::to_string(id) + " out of range");
        return static_cast<int>(id);
    }
    if (ref.is_string()) {
        const auto name = ref.get<std::string>();
        for (std::size_t i = 0; i < materials.size(); ++i)
            if (materials[i].name == name) return static_cast<int>(i);
        throw ValidationError(entity + ": unknown material '" + name + "'");
    }
    throw ValidationError(entity + ": material must be a name or an index");
}

inline Primitive parse_primitive(const json& p, std::size_t index, const std::vector<Material>& materials) {
    const std::string entity = "primitives[" + std::to_string(index) + "]";
    if (!p.is_object()) throw ValidationError(entity + ": expected an object");
    const json& type = require(p, "type", entity);
    if (type == "sphere") {
        reject_unknown(p, {"type", "center", "radius", "material"}, entity);
        Sphere s;
        s.center = read_vec3(require(p, "center", entity), entity + " center");
        s.radius = read_number(require(p, "radius", entity), entity + " radius");
        if (!(s.radius > 0.0)) throw ValidationError(entity + ": radius must be positive");
        s.material = resolve_material(require(p, "material", entity), materials, entity);
        return s;
    }
    if (type == "quad") {
        reject_unknown(p, {"type", "corner", "edge_u", "edge_v", "material"}, entity);
        Quad q;
        q.corner = read_vec3(require(p, "corner", entity), entity + " corner");
        q.edge_u = read_vec3(require(p, "edge_u", entity), entity + " edge_u");
        q.edge_v = read_vec3(require(p, "edge_v", entity), entity + " edge_v");
        if (!(length(cross(q.edge_u, q.edge_v)) > 1e-12)) throw ValidationError(entity + ": degenerate quad edges");
        q.material = resolve_material(require(p, "material", entity), materials, entity);
        return q;
    }
    throw ValidationError(entity + ": type must be \"sphere\" or \"quad\"");
}

inline CameraKeyframe parse_keyframe(const json& k, std::size_t index) {
    const std::string entity = "camera[" + std::to_string(index) + "]";
    if (!k.is_object()) throw ValidationError(entity + ": expected an object");
    reject_unknown(k, {"frame", "origin", "look_at", "up", "fov_deg"}, entity);
    CameraKeyframe key;
    if (k.contains("frame")) {
        if (!k["frame"].is_number_integer()) throw ValidationError(entity + ": frame must be an integer");
        key.frame = k["frame"].get<int>();
    }
    key.origin = read_vec3(require(k, "origin", entity), entity + " origin");
    key.look_at = read_vec3(require(k, "look_at", entity), entity + " look_at");
    if (k.contains("up")) key.up = read_vec3(k["up"], entity + " up");
    key.fov_deg = read_number(require(k, "fov_deg", entity), entity + " fov_deg");
    if (!(key.fov_deg > 1.0 && key.fov_deg < 179.0)) throw ValidationError(entity + ": fov_deg must lie in (1, 179)");
    const Vec3 view = key.look_at - key.origin;
    if (!(length(view) > 1e-12)) throw ValidationError(entity + ": look_at equals origin");
    if (!(length(key.up) > 1e-12) || length(cross(normalize(view), normalize(key.up))) < 1e-6)
        throw ValidationError(entity + ": up is parallel to the view direction");
    return key;
}

}  // namespace detail

/// Parses and validates a scene document. Throws FormatError on malformed
/// JSON (with line and column) and ValidationError on invariant violations.
inline Scene load_scene_json(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw FormatError("scene parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("scene: top level must be an object");
    detail::reject_unknown(doc, {"materials", "primitives", "camera", "background"}, "scene");

    Scene scene;
    const json& mats = detail::require(doc, "materials", "scene");
    if (!mats.is_array() || mats.empty()) throw ValidationError("scene: materials must be a non-empty array");
    for (std::size_t i = 0; i < mats.size(); ++i) scene.materials.push_back(detail::parse_material(mats[i], i));

    const json& prims = detail::require(doc, "primitives", "scene");
    if (!prims.is_array()) throw ValidationError("scene: primitives must be an array");
    for (std::size_t i = 0; i < prims.size(); ++i)
        scene.primitives.push_back(detail::parse_primitive(prims[i], i, scene.materials));

    const json& cam = detail::require(doc, "camera", "scene");
    if (!cam.is_array() || cam.empty()) throw ValidationError("scene: camera must be a non-empty array of keyframes");
    for (std::size_t i = 0; i < cam.size(); ++i) scene.camera.push_back(detail::parse_keyframe(cam[i], i));
    std::stable_sort(scene.camera.begin(), scene.camera.end(),
                     [](const CameraKeyframe& a, const CameraKeyframe& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < scene.camera.size(); ++i)
        if (scene.camera[i].frame == scene.camera[i - 1].frame)
            throw ValidationError("camera: duplicate keyframe for frame " + std::to_string(scene.camera[i].frame));

    if (doc.contains("background")) {
        scene.background = detail::read_vec3(doc["background"], "background");
        for (int c = 0; c < 3; ++c)
            if (scene.background[c] < 0.0) throw ValidationError("background: negative radiance");
    }

    scene.index_emitters();
    if (scene.emitters.empty() && is_black(scene.background))
        throw ValidationError("scene: no emitters and a black background");
    return scene;
}

inline bool is_builtin_scene(std::string_view name) {
    return std::any_of(builtin::kRegistry.begin(), builtin::kRegistry.end(),
                       [&](const builtin::Entry& e) { return e.name == name; });
}

inline std::vector<std::string> builtin_scene_names() {
    std::vector<std::string> names;
    for (const auto& e : builtin::kRegistry) names.emplace_back(e.name);
    return names;
}

/// Resolves a built-in scene name, otherwise reads the named JSON file.
inline Scene load_scene(const std::string& name_or_path) {
    for (const auto& e : builtin::kRegistry)
        if (e.name == name_or_path) return load_scene_json(e.document);
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) throw IoError("cannot open scene '" + name_or_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scene_json(ss.str());
}

}  // namespace sspg
