// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Lambertian and GGX reflection. All public functions take world-space
// directions pointing away from the surface and the shading normal n.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "sspg/math.hpp"
#include "sspg/rng.hpp"
#include "sspg/scene.hpp"
#include "sspg/sgmap.hpp"

namespace sspg {

namespace ggx {

/// Microfacet width; alpha = roughness^2, floored to stay finite.
inline double alpha(double roughness) { return std::max(roughness * roughness, 1e-4); }

/// Normal distribution D(h) for a local half vector.
inline double distribution(const Vec3& h, double a) {
    if (h.z <= 0.0) return 0.0;
    const double a2 = a * a;
    const double c2 = h.z * h.z;
    const double d = c2 * (a2 - 1.0) + 1.0;
    return a2 / (kPi * d * d);
}

inline double lambda(const Vec3& w, double a) {
    const double c2 = w.z * w.z;
    if (c2 <= 0.0) return 0.0;
    const double tan2 = std::max(0.0, 1.0 - c2) / c2;
    return 0.5 * (std::sqrt(1.0 + a * a * tan2) - 1.0);
}

inline double smith_g1(const Vec3& w, double a) { return 1.0 / (1.0 + lambda(w, a)); }

/// Visible-normal sampling (Heitz 2018) for a local outgoing direction wo.
inline Vec3 sample_visible_normal(const Vec3& wo, double a, double u1, double u2) {
    const Vec3 vh = normalize(Vec3{a * wo.x, a * wo.y, wo.z});
    const double len2 = vh.x * vh.x + vh.y * vh.y;
    const Vec3 t1 = len2 > 0.0 ? Vec3{-vh.y, vh.x, 0.0} / std::sqrt(len2) : Vec3{1.0, 0.0, 0.0};
    const Vec3 t2 = cross(vh, t1);
    const double r = std::sqrt(u1);
    const double phi = kTwoPi * u2;
    const double p1 = r * std::cos(phi);
    double p2 = r * std::sin(phi);
    const double s = 0.5 * (1.0 + vh.z);
    p2 = (1.0 - s) * std::sqrt(std::max(0.0, 1.0 - p1 * p1)) + s * p2;
    const Vec3 nh = t1 * p1 + t2 * p2 + vh * std::sqrt(std::max(0.0, 1.0 - p1 * p1 - p2 * p2));
    return normalize(Vec3{a * nh.x, a * nh.y, std::max(1e-9, nh.z)});
}

inline Vec3 reflect(const Vec3& wo, const Vec3& h) { return h * (2.0 * dot(wo, h)) - wo; }

}  // namespace ggx

namespace detail {

inline Rgb schlick_fresnel(const Rgb& f0, double cos_theta) {
    const double m = std::pow(1.0 - std::clamp(cos_theta, 0.0, 1.0), 5.0);
    return f0 + (Rgb(1.0) - f0) * m;
}

inline Rgb eval_local(const Material& m, const Vec3& wi, const Vec3& wo) {
    if (wi.z <= 0.0 || wo.z <= 0.0) return {};
    if (m.kind == MaterialKind::Diffuse) return m.albedo * kInvPi;
    const double a = ggx::alpha(m.roughness);
    const Vec3 h = normalize(wi + wo);
    const double d = ggx::distribution(h, a);
    const double g = ggx::smith_g1(wi, a) * ggx::smith_g1(wo, a);
    return schlick_fresnel(m.albedo, dot(wi, h)) * (d * g / (4.0 * wi.z * wo.z));
}

inline double pdf_local(const Material& m, const Vec3& wi, const Vec3& wo) {
    if (wi.z <= 0.0 || wo.z <= 0.0) return 0.0;
    if (m.kind == MaterialKind::Diffuse) return wi.z * kInvPi;
    const double a = ggx::alpha(m.roughness);
    const Vec3 h = normalize(wi + wo);
    return ggx::smith_g1(wo, a) * ggx::distribution(h, a) / (4.0 * wo.z);
}

inline std::optional<Vec3> sample_local(const Material& m, const Vec3& wo, Sampler& rng) {
    if (wo.z <= 0.0) return std::nullopt;
    const double u1 = rng.next();
    const double u2 = rng.next();
    if (m.kind == MaterialKind::Diffuse) {
        const double r = std::sqrt(u1);
        const double phi = kTwoPi * u2;
        const Vec3 wi{r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
        if (wi.z <= 0.0) return std::nullopt;
        return wi;
    }
    const Vec3 h = ggx::sample_visible_normal(wo, ggx::alpha(m.roughness), u1, u2);
    const Vec3 wi = ggx::reflect(wo, h);
    if (wi.z <= 0.0) return std::nullopt;
    return normalize(wi);
}

}  // namespace detail

/// f_r(wi, wo). Black when either direction is below the surface.
inline Rgb brdf_eval(const Material& m, const Vec3& wi, const Vec3& wo, const Vec3& n) {
    const TangentFrame f = build_tangent_frame(n);
    return detail::eval_local(m, f.to_local(wi), f.to_local(wo));
}

/// Solid-angle density of brdf_sample.
inline double brdf_pdf(const Material& m, const Vec3& wi, const Vec3& wo, const Vec3& n) {
    const TangentFrame f = build_tangent_frame(n);
    return detail::pdf_local(m, f.to_local(wi), f.to_local(wo));
}

struct BrdfSample {
    Vec3 wi;
    double pdf{0.0};
};

/// Cosine-weighted (diffuse) or visible-normal GGX (glossy) sampling.
/// nullopt signals a degenerate sample below the surface.
inline std::optional<BrdfSample> brdf_sample(const Material& m, const Vec3& wo, const Vec3& n, Sampler& rng) {
    const TangentFrame f = build_tangent_frame(n);
    const Vec3 lo = f.to_local(wo);
    const auto li = detail::sample_local(m, lo, rng);
    if (!li) return std::nullopt;
    const double pdf = detail::pdf_local(m, *li, lo);
    if (!(pdf > 0.0)) return std::nullopt;
    return BrdfSample{f.to_world(*li), pdf};
}

}  // namespace sspg
