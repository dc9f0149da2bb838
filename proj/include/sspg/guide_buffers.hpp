// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Temporal reprojection of the guiding buffer, the per-pixel training pass,
// and guiding-buffer checkpoints.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "sspg/brdf.hpp"
#include "sspg/errors.hpp"
#include "sspg/frame_buffers.hpp"
#include "sspg/mixture.hpp"
#include "sspg/parallel.hpp"
#include "sspg/rng.hpp"
#include "sspg/scene.hpp"
#include "sspg/sgmap.hpp"

namespace sspg {

struct ReprojectionPolicy {
    double depth_rel_tol{0.1};
    double normal_dot_min{0.9};
    bool rotate_mean{true};
};

inline void validate(const ReprojectionPolicy& p) {
    if (!(p.depth_rel_tol > 0.0)) throw ValidationError("depth_rel_tol must be positive");
    if (!(p.normal_dot_min > -1.0 && p.normal_dot_min < 1.0))
        throw ValidationError("normal_dot_min must lie in (-1, 1)");
}

struct ReprojectResult {
    GuidingBuffer gamma;
    std::uint64_t accepted{0};
    std::uint64_t rejected{0};
};

/// Moves the lobe mean of `s` from the tangent frame of `from` to that of
/// `to`, carrying covariance, pi and k. Returns nullopt when the mean ends
/// up below the new hemisphere.
inline std::optional<GuidingStats> rotate_stats(const GuidingStats& s, const Vec3& from, const Vec3& to) {
    if (from == to) return s;
    const double mx = s.mean_x, my = s.mean_y;
    const double cxx = double(s.m2_xx) - mx * mx;
    const double cyy = double(s.m2_yy) - my * my;
    const double cxy = double(s.m2_xy) - mx * my;
    const Vec3 world = build_tangent_frame(from).to_world(square_to_hemisphere({mx, my}));
    const Vec3 local = build_tangent_frame(to).to_local(world);
    if (!(local.z > 0.0)) return std::nullopt;
    const SquarePoint mu = hemisphere_to_square(normalize(local));
    GuidingStats out = s;
    out.mean_x = static_cast<float>(mu.u);
    out.mean_y = static_cast<float>(mu.v);
    out.m2_xx = static_cast<float>(cxx + mu.u * mu.u);
    out.m2_yy = static_cast<float>(cyy + mu.v * mu.v);
    out.m2_xy = static_cast<float>(cxy + mu.u * mu.v);
    return out;
}

/// Fetches each current pixel's history from the nearest previous pixel
/// along its motion vector. History is kept only when the previous pixel is
/// valid and agrees in depth and normal; everything else restarts from
/// init_stats().
inline ReprojectResult reproject(const GuidingBuffer& prev, const GBuffer& gbuf_prev, const GBuffer& gbuf_cur,
                                 const ReprojectionPolicy& policy = {}) {
    if (!prev.same_size(gbuf_prev) || !prev.same_size(gbuf_cur))
        throw DimensionError("reproject: buffer dimensions differ");
    const int w = gbuf_cur.width(), h = gbuf_cur.height();
    ReprojectResult out{GuidingBuffer(w, h), 0, 0};
    out.gamma.generation = prev.generation;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const GBufferPixel& cur = gbuf_cur.at(x, y);
            if (!cur.valid) continue;
            auto reject = [&] { ++out.rejected; };
            if (!cur.has_history) {
                reject();
                continue;
            }
            const int px = static_cast<int>(std::floor(x + cur.motion_u + 0.5));
            const int py = static_cast<int>(std::floor(y + cur.motion_v + 0.5));
            if (!gbuf_prev.contains(px, py)) {
                reject();
                continue;
            }
            const GBufferPixel& old = gbuf_prev.at(px, py);
            if (!old.valid) {
                reject();
                continue;
            }
            const double expected = gbuf_prev.camera.view_depth(cur.pos);
            if (!(expected > 0.0) || !(std::abs(old.depth - expected) / expected < policy.depth_rel_tol) ||
                !(dot(old.normal, cur.normal) > policy.normal_dot_min)) {
                reject();
                continue;
            }
            const GuidingStats& s = prev.at(px, py);
            if (!policy.rotate_mean) {
                out.gamma.at(x, y) = s;
                ++out.accepted;
                continue;
            }
            const auto rotated = rotate_stats(s, old.normal, cur.normal);
            if (!rotated) {
                reject();
                continue;
            }
            out.gamma.at(x, y) = *rotated;
            ++out.accepted;
        }
    return out;
}

inline constexpr double kDefaultNeighborRadius = 10.0;

struct TrainingBatch {
    std::vector<RadianceSampleRec> records;
    /// Candidate pixels drawn, including the pixel itself.
    int lookups{0};
};

/// Training records for pixel (x, y) from its own VPL and up to N - 1
/// neighbors drawn uniformly from a disk. Only VPLs produced by BRDF
/// sampling are used.
inline TrainingBatch gather_training_batch(int x, int y, const VplBuffer& vpls, const GBuffer& gbuf,
                                           const GuidingBuffer& gamma, const Scene& scene, double k_max,
                                           Sampler& rng, double radius = kDefaultNeighborRadius) {
    TrainingBatch batch;
    const GBufferPixel& self = gbuf.at(x, y);
    if (!self.valid) return batch;
    const Material& m = scene.material(self.material_id);
    const TangentFrame frame = build_tangent_frame(self.normal);
    const int n = neighbor_count(gamma.at(x, y).k, k_max);
    batch.records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int cx = x, cy = y;
        if (i > 0) {
            const double r = radius * std::sqrt(rng.next());
            const double phi = kTwoPi * rng.next();
            cx = static_cast<int>(std::floor(x + r * std::cos(phi) + 0.5));
            cy = static_cast<int>(std::floor(y + r * std::sin(phi) + 0.5));
        }
        ++batch.lookups;
        if (!vpls.contains(cx, cy)) continue;
        const Vpl& v = vpls.at(cx, cy);
        if (!v.valid || v.strategy != Strategy::Brdf) continue;
        const Vec3 d = v.y - self.pos;
        const double len = length(d);
        if (!(len > 0.0)) continue;
        const Vec3 dir = d / len;
        const double cos_i = dot(dir, self.normal);
        if (cos_i <= 0.0) continue;
        const double weight = luminance(v.radiance * brdf_eval(m, dir, self.wo, self.normal) * cos_i);
        if (!std::isfinite(weight) || weight <= 0.0) continue;
        Vec3 local = frame.to_local(dir);
        local.z = std::max(local.z, 0.0);
        batch.records.push_back({hemisphere_to_square(normalize(local)), dir, weight, Strategy::Brdf});
    }
    return batch;
}

struct TrainingConfig {
    double k_max{kDefaultKMax};
    double radius{kDefaultNeighborRadius};
    std::uint64_t seed{0};
    int frame{0};
    int threads{default_thread_count()};
};

struct TrainingDiagnostics {
    std::uint64_t records{0};
    std::uint64_t lookups{0};
    std::uint64_t updated_pixels{0};
    UpdateDiagnostics update;
};

struct TrainingResult {
    GuidingBuffer gamma;
    TrainingDiagnostics diag;
};

/// One EM step per valid pixel using the VPLs of the frame just rendered.
/// Reads `gamma` and writes a fresh buffer; invalid pixels keep their stats.
inline TrainingResult training_pass(const GuidingBuffer& gamma, const VplBuffer& vpls, const GBuffer& gbuf,
                                    const Scene& scene, const TrainingConfig& cfg = {}) {
    if (!gamma.same_size(vpls) || !gamma.same_size(gbuf))
        throw DimensionError("training_pass: buffer dimensions differ");
    if (!(cfg.k_max >= 1.0)) throw ValidationError("kMax must be at least 1");
    if (!(cfg.radius >= 0.0)) throw ValidationError("neighbor radius must be non-negative");
    const int w = gamma.width(), h = gamma.height();
    TrainingResult out{gamma, {}};
    out.gamma.generation = gamma.generation + 1;
    std::vector<TrainingDiagnostics> rows(static_cast<std::size_t>(h));

    parallel_for(h, cfg.threads, [&](int y) {
        TrainingDiagnostics& d = rows[static_cast<std::size_t>(y)];
        std::vector<WeightedRecord> weighted;
        for (int x = 0; x < w; ++x) {
            const GBufferPixel& gpx = gbuf.at(x, y);
            if (!gpx.valid) continue;
            const std::uint64_t pixel = static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w) + x;
            Sampler rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(cfg.frame), pixel, salt::kTraining));
            const GuidingStats& s = gamma.at(x, y);
            const TrainingBatch batch = gather_training_batch(x, y, vpls, gbuf, gamma, scene, cfg.k_max, rng, cfg.radius);
            d.lookups += static_cast<std::uint64_t>(batch.lookups);
            if (batch.records.empty()) continue;
            const GaussianLobe lobe = lobe_from_stats(s);
            const Material& m = scene.material(gpx.material_id);
            weighted.clear();
            for (const auto& rec : batch.records) {
                const double g = square_density_to_solid_angle(gaussian_pdf_square(lobe, rec.sq));
                const double b = brdf_pdf(m, rec.dir, gpx.wo, gpx.normal);
                weighted.push_back({rec, e_step_responsibility(s.pi, g, b)});
            }
            out.gamma.at(x, y) = m_step_update(s, weighted, cfg.k_max, &d.update);
            d.records += batch.records.size();
            ++d.updated_pixels;
        }
    });
    for (const auto& r : rows) {
        out.diag.records += r.records;
        out.diag.lookups += r.lookups;
        out.diag.updated_pixels += r.updated_pixels;
        out.diag.update.skipped_nonfinite += r.update.skipped_nonfinite;
        out.diag.update.degenerate_responsibility += r.update.degenerate_responsibility;
    }
    return out;
}

inline constexpr char kCheckpointMagic[4] = {'P', 'G', 'G', '1'};

inline void checkpoint_save(const GuidingBuffer& gamma, const std::string& path) {
    std::vector<unsigned char> buf;
    buf.reserve(12 + gamma.size() * 32);
    buf.insert(buf.end(), kCheckpointMagic, kCheckpointMagic + 4);
    auto put_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
    };
    put_u32(static_cast<std::uint32_t>(gamma.width()));
    put_u32(static_cast<std::uint32_t>(gamma.height()));
    for (const GuidingStats& s : gamma.pixels())
        for (float f : {s.mean_x, s.mean_y, s.m2_xx, s.m2_yy, s.m2_xy, s.w_sum, s.pi, s.k})
            put_u32(std::bit_cast<std::uint32_t>(f));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed for checkpoint '" + path + "'");
}

class CheckpointVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Loads a checkpoint. When expected dimensions are given, a mismatch throws
/// DimensionError.
inline GuidingBuffer checkpoint_load(const std::string& path, std::optional<std::pair<int, int>> expected = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12) throw FormatError(path + ": truncated checkpoint header");
    if (std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
        throw CheckpointVersionError(path + ": unsupported checkpoint version (expected PGG1)");
    auto get_u32 = [&](std::size_t at) {
        return std::uint32_t(bytes[at]) | (std::uint32_t(bytes[at + 1]) << 8) | (std::uint32_t(bytes[at + 2]) << 16) |
               (std::uint32_t(bytes[at + 3]) << 24);
    };
    const std::uint32_t w = get_u32(4), h = get_u32(8);
    if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) throw FormatError(path + ": bad checkpoint dimensions");
    if (expected && (int(w) != expected->first || int(h) != expected->second))
        throw DimensionError(path + ": checkpoint is " + std::to_string(w) + "x" + std::to_string(h) +
                             ", session is " + std::to_string(expected->first) + "x" +
                             std::to_string(expected->second));
    const std::size_t need = 12 + std::size_t(w) * h * 32;
    if (bytes.size() < need) throw FormatError(path + ": truncated checkpoint payload");
    if (bytes.size() > need) throw FormatError(path + ": trailing bytes after checkpoint payload");
    GuidingBuffer gamma(static_cast<int>(w), static_cast<int>(h));
    std::size_t at = 12;
    for (GuidingStats& s : gamma.pixels())
        for (float* f : {&s.mean_x, &s.mean_y, &s.m2_xx, &s.m2_yy, &s.m2_xy, &s.w_sum, &s.pi, &s.k}) {
            *f = std::bit_cast<float>(get_u32(at));
            at += 4;
        }
    return gamma;
}

}  // namespace sspg
