// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sspg/math.hpp"
#include "sspg/rng.hpp"

namespace sspg {

/// Offset applied at both ends of shadow rays and to spawned rays.
inline constexpr double kRayEpsilon = 1e-4;

enum class MaterialKind { Diffuse, Glossy };

struct Material {
    std::string name;
    MaterialKind kind{MaterialKind::Diffuse};
    Rgb albedo{0.8, 0.8, 0.8};
    double roughness{1.0};
    Rgb emission{};

    bool is_emissive() const { return !is_black(emission); }

    /// Roughness used by the guiding-disable rule; diffuse surfaces count as rough.
    double guiding_roughness() const { return kind == MaterialKind::Diffuse ? 1.0 : roughness; }
};

struct Sphere {
    Vec3 center;
    double radius{1.0};
    int material{0};
};

/// Parallelogram corner + s*edge_u + t*edge_v, s,t in [0,1]. The front side
/// faces along edge_u x edge_v.
struct Quad {
    Vec3 corner;
    Vec3 edge_u;
    Vec3 edge_v;
    int material{0};

    Vec3 normal() const { return normalize(cross(edge_u, edge_v)); }
    double area() const { return length(cross(edge_u, edge_v)); }
};

using Primitive = std::variant<Sphere, Quad>;

inline int material_of(const Primitive& p) {
    return std::visit([](const auto& s) { return s.material; }, p);
}

struct Ray {
    Vec3 origin;
    Vec3 dir;
    double t_min{kRayEpsilon};
    double t_max{std::numeric_limits<double>::infinity()};
};

struct Hit {
    double t{0.0};
    Vec3 pos;
    /// Shading normal, flipped to oppose the incoming ray.
    Vec3 normal;
    int material_id{0};
    int primitive{0};
    bool is_emitter{false};
    /// True when the ray struck the outward / front side.
    bool front_face{true};
};

struct CameraKeyframe {
    int frame{0};
    Vec3 origin{0.0, 0.0, 1.0};
    Vec3 look_at{0.0, 0.0, 0.0};
    Vec3 up{0.0, 1.0, 0.0};
    double fov_deg{45.0};
};

/// Pinhole camera resolved for one frame. Pixel (0,0) is the top-left corner.
class Camera {
public:
    Camera() = default;
    explicit Camera(const CameraKeyframe& k)
        : origin_(k.origin), tan_half_fov_(std::tan(0.5 * k.fov_deg * kPi / 180.0)) {
        forward_ = normalize(k.look_at - k.origin);
        right_ = normalize(cross(forward_, k.up));
        up_ = cross(right_, forward_);
    }

    const Vec3& origin() const { return origin_; }
    const Vec3& forward() const { return forward_; }

    /// Primary ray through the center of pixel (px, py); no jitter.
    Ray primary_ray(int px, int py, int width, int height) const {
        const double aspect = double(width) / double(height);
        const double sx = (2.0 * (px + 0.5) / width - 1.0) * tan_half_fov_ * aspect;
        const double sy = (1.0 - 2.0 * (py + 0.5) / height) * tan_half_fov_;
        return {origin_, normalize(forward_ + right_ * sx + up_ * sy), 0.0,
                std::numeric_limits<double>::infinity()};
    }

    /// Distance along the view axis.
    double view_depth(const Vec3& p) const { return dot(p - origin_, forward_); }

    struct Projection {
        double px;  ///< continuous pixel coordinate; pixel centers sit at integers
        double py;
        double depth;
    };

    /// Projects a world point; nullopt when it lies behind the camera.
    std::optional<Projection> project(const Vec3& p, int width, int height) const {
        const Vec3 d = p - origin_;
        const double z = dot(d, forward_);
        if (!(z > 1e-9)) return std::nullopt;
        const double aspect = double(width) / double(height);
        const double sx = dot(d, right_) / (z * tan_half_fov_ * aspect);
        const double sy = dot(d, up_) / (z * tan_half_fov_);
        return Projection{(sx + 1.0) * 0.5 * width - 0.5, (1.0 - sy) * 0.5 * height - 0.5, z};
    }

private:
    Vec3 origin_;
    Vec3 forward_{0.0, 0.0, -1.0};
    Vec3 right_{1.0, 0.0, 0.0};
    Vec3 up_{0.0, 1.0, 0.0};
    double tan_half_fov_{1.0};
};

struct Scene {
    std::vector<Primitive> primitives;
    std::vector<Material> materials;
    /// Indices into `primitives` whose material emits.
    std::vector<int> emitters;
    /// Sorted by frame index.
    std::vector<CameraKeyframe> camera;
    Rgb background{};

    const Material& material(int id) const { return materials[static_cast<std::size_t>(id)]; }

    /// Keyframe linearly interpolated at `frame`, clamped to the keyed range.
    CameraKeyframe keyframe_at(int frame) const {
        if (camera.empty()) return {};
        if (frame <= camera.front().frame) return camera.front();
        if (frame >= camera.back().frame) return camera.back();
        for (std::size_t i = 1; i < camera.size(); ++i) {
            const auto& a = camera[i - 1];
            const auto& b = camera[i];
            if (frame <= b.frame) {
                const double t = double(frame - a.frame) / double(b.frame - a.frame);
                CameraKeyframe k;
                k.frame = frame;
                k.origin = lerp(a.origin, b.origin, t);
                k.look_at = lerp(a.look_at, b.look_at, t);
                k.up = lerp(a.up, b.up, t);
                k.fov_deg = a.fov_deg + (b.fov_deg - a.fov_deg) * t;
                return k;
            }
        }
        return camera.back();
    }

    Camera camera_at(int frame) const { return Camera(keyframe_at(frame)); }

    bool camera_is_static() const {
        for (const auto& k : camera) {
            const auto& f = camera.front();
            if (k.origin != f.origin || k.look_at != f.look_at || k.up != f.up || k.fov_deg != f.fov_deg)
                return false;
        }
        return true;
    }

    /// Rebuilds `emitters` from the materials.
    void index_emitters() {
        emitters.clear();
        for (std::size_t i = 0; i < primitives.size(); ++i)
            if (material(material_of(primitives[i])).is_emissive()) emitters.push_back(static_cast<int>(i));
    }
};

namespace detail {

inline std::optional<double> intersect_sphere(const Sphere& s, const Ray& r) {
    const Vec3 oc = r.origin - s.center;
    const double b = dot(oc, r.dir);
    const double c = dot(oc, oc) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t <= r.t_min || t >= r.t_max) {
        t = -b + sq;
        if (t <= r.t_min || t >= r.t_max) return std::nullopt;
    }
    return t;
}

inline std::optional<double> intersect_quad(const Quad& q, const Ray& r) {
    const Vec3 n = cross(q.edge_u, q.edge_v);
    const double denom = dot(n, r.dir);
    if (std::abs(denom) < 1e-12 * length(n)) return std::nullopt;
    const double t = dot(q.corner - r.origin, n) / denom;
    if (t <= r.t_min || t >= r.t_max) return std::nullopt;
    const Vec3 rel = r.origin + r.dir * t - q.corner;
    const double nn = dot(n, n);
    const double s = dot(cross(rel, q.edge_v), n) / nn;
    const double u = dot(cross(q.edge_u, rel), n) / nn;
    if (s < 0.0 || s > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

inline std::optional<double> intersect_primitive(const Primitive& p, const Ray& r) {
    if (const auto* s = std::get_if<Sphere>(&p)) return intersect_sphere(*s, r);
    return intersect_quad(std::get<Quad>(p), r);
}

inline Vec3 outward_normal(const Primitive& p, const Vec3& pos) {
    if (const auto* s = std::get_if<Sphere>(&p)) return normalize(pos - s->center);
    return std::get<Quad>(p).normal();
}

}  // namespace detail

/// Nearest hit with t in (t_min, t_max), by linear scan over all primitives.
inline std::optional<Hit> intersect(const Scene& scene, const Ray& ray) {
    Ray r = ray;
    int best = -1;
    for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
        if (auto t = detail::intersect_primitive(scene.primitives[i], r)) {
            r.t_max = *t;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) return std::nullopt;
    const Primitive& prim = scene.primitives[static_cast<std::size_t>(best)];
    Hit h;
    h.t = r.t_max;
    h.pos = ray.origin + ray.dir * h.t;
    const Vec3 outward = detail::outward_normal(prim, h.pos);
    h.front_face = dot(outward, ray.dir) < 0.0;
    h.normal = h.front_face ? outward : -outward;
    h.primitive = best;
    h.material_id = material_of(prim);
    h.is_emitter = scene.material(h.material_id).is_emissive();
    return h;
}

/// True when nothing blocks the open segment between a and b.
inline bool visible(const Scene& scene, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double dist = length(d);
    Ray r{a, d / dist, kRayEpsilon, dist - kRayEpsilon};
    for (const auto& p : scene.primitives)
        if (detail::intersect_primitive(p, r)) return false;
    return true;
}

/// Radiance leaving an emitter surface point along -dir_to_point. Emitters are one-sided.
inline Rgb emitted(const Scene& scene, const Hit& h) {
    if (!h.is_emitter || !h.front_face) return {};
    return scene.material(h.material_id).emission;
}

struct EmitterSample {
    Vec3 dir;  ///< unit direction from the shading point to the light point
    double dist{0.0};
    Rgb radiance;
    double pdf_sr{0.0};
    Vec3 point;
};

/// Sample of emitter `pick` at surface coordinates (u, v) in [0,1)^2, seen
/// from x. The pdf includes the uniform 1/count emitter choice.
inline EmitterSample emitter_sample_at(const Scene& scene, const Vec3& x, std::size_t pick, double u, double v) {
    EmitterSample out;
    const std::size_t count = scene.emitters.size();
    const Primitive& prim = scene.primitives[static_cast<std::size_t>(scene.emitters[pick])];
    Vec3 p, n;
    double area;
    if (const auto* s = std::get_if<Sphere>(&prim)) {
        const double z = 1.0 - 2.0 * u;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = kTwoPi * v;
        n = {r * std::cos(phi), r * std::sin(phi), z};
        p = s->center + n * s->radius;
        area = 4.0 * kPi * s->radius * s->radius;
    } else {
        const Quad& q = std::get<Quad>(prim);
        p = q.corner + q.edge_u * u + q.edge_v * v;
        n = q.normal();
        area = q.area();
    }
    const Vec3 d = p - x;
    const double dist2 = dot(d, d);
    out.dist = std::sqrt(dist2);
    out.dir = d / out.dist;
    out.point = p;
    const double cos_light = -dot(n, out.dir);
    if (cos_light <= 0.0) return out;  // back side of a one-sided emitter
    out.radiance = scene.material(material_of(prim)).emission;
    out.pdf_sr = dist2 / (cos_light * area * double(count));
    return out;
}

/// Picks an emitter uniformly, then a point uniformly on its area; the pdf is
/// converted to solid angle at x. Back-facing samples return black with pdf 0.
inline EmitterSample sample_emitter(const Scene& scene, const Vec3& x, Sampler& rng) {
    if (scene.emitters.empty()) return {};
    const std::size_t count = scene.emitters.size();
    const std::size_t pick = std::min(count - 1, static_cast<std::size_t>(rng.next() * double(count)));
    const double u = rng.next();
    const double v = rng.next();
    return emitter_sample_at(scene, x, pick, u, v);
}

}  // namespace sspg
