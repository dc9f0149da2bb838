// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Path-tracing pass: ray-cast G-buffer, guided first bounce, next-event
// estimation, and the per-pixel VPL write-out consumed by training.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "sspg/brdf.hpp"
#include "sspg/frame_buffers.hpp"
#include "sspg/image.hpp"
#include "sspg/mixture.hpp"
#include "sspg/parallel.hpp"
#include "sspg/rng.hpp"
#include "sspg/scene.hpp"
#include "sspg/sgmap.hpp"

namespace sspg {

struct PathConfig {
    /// Maximum number of path segments counted from the camera; 2 allows
    /// direct lighting at the primary hit plus the first bounce ray.
    int max_depth{4};
    bool nee{true};
    bool guiding{false};
    double roughness_min_guide{0.05};
    int spp{1};
};

inline void validate(const PathConfig& cfg) {
    if (cfg.max_depth < 1) throw ValidationError("max_depth must be at least 1");
    if (cfg.guiding && cfg.max_depth < 2) throw ValidationError("guiding needs max_depth >= 2");
    if (cfg.spp < 1) throw ValidationError("spp must be at least 1");
}

/// Motion of each valid pixel toward its location under `prev`; points that
/// fall behind the previous camera or outside its frame lose their history.
inline void motion_vectors(const Camera& prev, GBuffer& gbuf) {
    const int w = gbuf.width(), h = gbuf.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            GBufferPixel& p = gbuf.at(x, y);
            p.motion_u = p.motion_v = 0.0;
            p.has_history = false;
            if (!p.valid) continue;
            const auto proj = prev.project(p.pos, w, h);
            if (!proj) continue;
            if (proj->px < -0.5 || proj->px >= w - 0.5 || proj->py < -0.5 || proj->py >= h - 0.5) continue;
            p.motion_u = proj->px - x;
            p.motion_v = proj->py - y;
            p.has_history = true;
        }
}

/// One primary ray through each pixel center. Motion vectors point at the
/// camera of frame_index - 1 (the same camera for the first frame).
inline GBuffer gbuffer_pass(const Scene& scene, int frame_index, int width, int height) {
    GBuffer g(width, height);
    g.camera = scene.camera_at(frame_index);
    g.frame_index = frame_index;
    g.background = scene.background;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Ray ray = g.camera.primary_ray(x, y, width, height);
            const auto hit = intersect(scene, ray);
            if (!hit) continue;
            GBufferPixel& p = g.at(x, y);
            p.valid = true;
            p.pos = hit->pos;
            p.normal = hit->normal;
            p.wo = -ray.dir;
            p.depth = g.camera.view_depth(hit->pos);
            p.material_id = hit->material_id;
            p.roughness = scene.material(hit->material_id).guiding_roughness();
            p.emission = emitted(scene, *hit);
        }
    motion_vectors(scene.camera_at(frame_index - 1), g);
    return g;
}

/// Guiding state for one pixel, resolved from the guiding buffer.
struct GuidingEntry {
    GuidingStats stats;
    GaussianLobe lobe;
};

struct PixelSample {
    Rgb color;
    Vpl vpl;
    int segments{1};
    bool nonfinite{false};
    bool guided{false};
};

namespace detail {

/// Next-event estimate of reflected direct light at a surface point.
inline Rgb direct_light(const Scene& scene, const Vec3& x, const Vec3& n, const Vec3& wo, const Material& m,
                        Sampler& rng) {
    const EmitterSample es = sample_emitter(scene, x, rng);
    if (!(es.pdf_sr > 0.0)) return {};
    const double cos_i = dot(n, es.dir);
    if (cos_i <= 0.0) return {};
    const Rgb f = brdf_eval(m, es.dir, wo, n);
    if (is_black(f)) return {};
    if (!visible(scene, x, es.point)) return {};
    return f * es.radiance * (cos_i / es.pdf_sr);
}

struct IncomingResult {
    Rgb radiance;
    std::optional<Hit> first_hit;
    int segments{0};
};

/// Radiance arriving at `origin` from `dir`, where `segment` is the index of
/// this ray counted from the camera (the first bounce ray is segment 2).
/// With NEE on, emitters hit by this ray are not counted: NEE at the previous
/// vertex already sampled them.
inline IncomingResult incoming(const Scene& scene, const Vec3& origin, const Vec3& dir, int segment,
                               const PathConfig& cfg, Sampler& rng) {
    IncomingResult out;
    auto hit = intersect(scene, Ray{origin, dir});
    out.segments = 1;
    if (!hit) {
        out.radiance = scene.background;
        return out;
    }
    out.first_hit = hit;
    Rgb throughput(1.0);
    if (!cfg.nee) out.radiance += emitted(scene, *hit);
    Vec3 wo = -dir;
    while (segment + 1 <= cfg.max_depth) {
        const Material& m = scene.material(hit->material_id);
        if (cfg.nee) out.radiance += throughput * direct_light(scene, hit->pos, hit->normal, wo, m, rng);
        const auto bs = brdf_sample(m, wo, hit->normal, rng);
        if (!bs) break;
        const Rgb f = brdf_eval(m, bs->wi, wo, hit->normal);
        throughput *= f * (dot(bs->wi, hit->normal) / bs->pdf);
        if (is_black(throughput)) break;
        const auto next = intersect(scene, Ray{hit->pos, bs->wi});
        ++out.segments;
        ++segment;
        if (!next) {
            out.radiance += throughput * scene.background;
            break;
        }
        if (!cfg.nee) out.radiance += throughput * emitted(scene, *next);
        hit = next;
        wo = -bs->wi;
    }
    return out;
}

}  // namespace detail

/// Estimates the radiance leaving the primary hit toward the camera. The first
/// bounce samples the guiding mixture when guiding is on, the surface is rough
/// enough, and the pixel has trained history (k > 0); the contribution is
/// divided by the full mixture pdf. Deeper bounces use BRDF sampling.
inline PixelSample trace_pixel(const Scene& scene, const GBufferPixel& gpx, const Rgb& background,
                               const GuidingEntry* guide, const PathConfig& cfg, Sampler& rng) {
    PixelSample out;
    if (!gpx.valid) {
        out.color = background;
        return out;
    }
    out.color = gpx.emission;
    if (cfg.max_depth < 2) return out;

    const Material& m = scene.material(gpx.material_id);
    if (cfg.nee) out.color += detail::direct_light(scene, gpx.pos, gpx.normal, gpx.wo, m, rng);

    const TangentFrame frame = build_tangent_frame(gpx.normal);
    const Vec3 wo_local = frame.to_local(gpx.wo);
    const bool use_guide = cfg.guiding && guide != nullptr && guide->stats.k > 0.0f &&
                           gpx.roughness >= cfg.roughness_min_guide;

    Vec3 wi;
    double pdf = 0.0;
    Strategy strategy = Strategy::Brdf;
    if (use_guide) {
        auto sample_brdf = [&](Sampler& r) { return detail::sample_local(m, wo_local, r); };
        auto pdf_brdf = [&](const Vec3& d) { return detail::pdf_local(m, d, wo_local); };
        const auto ms = sample_mixture(guide->stats, guide->lobe, sample_brdf, pdf_brdf, rng);
        if (!ms) return out;
        wi = frame.to_world(ms->dir);
        pdf = ms->pdf;
        strategy = ms->strategy;
        out.guided = true;
    } else {
        const auto bs = brdf_sample(m, gpx.wo, gpx.normal, rng);
        if (!bs) return out;
        wi = bs->wi;
        pdf = bs->pdf;
    }
    const double cos_i = dot(wi, gpx.normal);
    if (!(pdf > 0.0) || cos_i <= 0.0) return out;

    const auto li = detail::incoming(scene, gpx.pos, wi, 2, cfg, rng);
    out.segments += li.segments;
    const Rgb f = brdf_eval(m, wi, gpx.wo, gpx.normal);
    out.color += f * li.radiance * (cos_i / pdf);
    if (li.first_hit && is_finite(li.radiance)) {
        out.vpl.valid = true;
        out.vpl.y = li.first_hit->pos;
        out.vpl.radiance = li.radiance;
        out.vpl.strategy = strategy;
    }
    if (!is_finite(out.color)) {
        out.color = {};
        out.nonfinite = true;
    }
    return out;
}

struct FrameDiagnostics {
    std::uint64_t paths{0};
    std::uint64_t segments{0};
    std::uint64_t nonfinite{0};
    std::uint64_t guided{0};
    /// Per-pixel reads of the guiding buffer.
    std::uint64_t gamma_reads{0};

    double mean_path_length() const { return paths ? double(segments) / double(paths) : 0.0; }

    FrameDiagnostics& operator+=(const FrameDiagnostics& o) {
        paths += o.paths;
        segments += o.segments;
        nonfinite += o.nonfinite;
        guided += o.guided;
        gamma_reads += o.gamma_reads;
        return *this;
    }
};

struct RenderOptions {
    int threads{default_thread_count()};
    /// Also return the per-pixel mean of squared samples (for standard errors).
    bool second_moment{false};
};

struct RenderOutput {
    ImageRGB image;
    ImageRGB second_moment;
    VplBuffer vpls;
    FrameDiagnostics diag;
};

/// Renders cfg.spp samples per pixel. Each pixel draws from its own stream
/// seeded by (seed, frame, pixel), so the output is bitwise reproducible for
/// any thread count. `gamma` may be null (plain path tracing). The VPL of the
/// first sample of each pixel is kept.
inline RenderOutput render_frame(const Scene& scene, const GBuffer& gbuf, const GuidingBuffer* gamma,
                                 const PathConfig& cfg, std::uint64_t seed, const RenderOptions& opts = {}) {
    validate(cfg);
    if (gamma && !gamma->same_size(gbuf)) throw DimensionError("guiding buffer does not match the frame size");
    const int w = gbuf.width(), h = gbuf.height();
    RenderOutput out;
    out.image = ImageRGB(w, h);
    if (opts.second_moment) out.second_moment = ImageRGB(w, h);
    out.vpls = VplBuffer(w, h);
    std::vector<FrameDiagnostics> row_diag(static_cast<std::size_t>(h));

    parallel_for(h, opts.threads, [&](int y) {
        FrameDiagnostics& d = row_diag[static_cast<std::size_t>(y)];
        for (int x = 0; x < w; ++x) {
            const std::uint64_t pixel = static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w) + x;
            Sampler rng(stream_seed(seed, static_cast<std::uint64_t>(gbuf.frame_index), pixel, salt::kPathTrace));
            const GBufferPixel& gpx = gbuf.at(x, y);
            std::optional<GuidingEntry> entry;
            if (cfg.guiding && gamma && gpx.valid && gpx.roughness >= cfg.roughness_min_guide) {
                const GuidingStats& s = gamma->at(x, y);
                ++d.gamma_reads;
                if (s.k > 0.0f) entry = GuidingEntry{s, lobe_from_stats(s)};
            }
            Rgb sum, sum_sq;
            for (int s = 0; s < cfg.spp; ++s) {
                const PixelSample ps = trace_pixel(scene, gpx, gbuf.background, entry ? &*entry : nullptr, cfg, rng);
                sum += ps.color;
                sum_sq += ps.color * ps.color;
                if (s == 0) out.vpls.at(x, y) = ps.vpl;
                ++d.paths;
                d.segments += static_cast<std::uint64_t>(ps.segments);
                d.nonfinite += ps.nonfinite ? 1 : 0;
                d.guided += ps.guided ? 1 : 0;
            }
            out.image.set(x, y, sum / double(cfg.spp));
            if (opts.second_moment) out.second_moment.set(x, y, sum_sq / double(cfg.spp));
        }
    });
    for (const auto& d : row_diag) out.diag += d;
    return out;
}

/// Convenience overload that ray-casts the G-buffer first.
inline RenderOutput render_frame(const Scene& scene, int frame_index, int width, int height,
                                 const GuidingBuffer* gamma, const PathConfig& cfg, std::uint64_t seed,
                                 const RenderOptions& opts = {}) {
    return render_frame(scene, gbuffer_pass(scene, frame_index, width, height), gamma, cfg, seed, opts);
}

}  // namespace sspg
