// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Experiment driver shared by the command-line tool and the tests: frame
// sequences with reprojection and training, references, image comparison,
// flicker measurement and paired PT/PG runs.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sspg/errors.hpp"
#include "sspg/guide_buffers.hpp"
#include "sspg/image.hpp"
#include "sspg/image_io.hpp"
#include "sspg/metrics.hpp"
#include "sspg/ptrace.hpp"
#include "sspg/scene_io.hpp"

namespace sspg {

enum class Mode { Pt, Pg };

inline Mode parse_mode(const std::string& s) {
    if (s == "pt") return Mode::Pt;
    if (s == "pg") return Mode::Pg;
    throw UsageError("mode must be 'pt' or 'pg', got '" + s + "'");
}

inline const char* mode_name(Mode m) { return m == Mode::Pt ? "pt" : "pg"; }

struct RunConfig {
    std::string scene{"cornell-occluder"};
    int width{64};
    int height{64};
    int frames{1};
    int spp{1};
    Mode mode{Mode::Pt};
    std::uint64_t seed{1};
    double k_max{kDefaultKMax};
    std::string out{"."};
    std::string checkpoint_in;
    std::string checkpoint_out;
    /// Frames of guided rendering plus training before measurement starts.
    int warmup{128};
    int pairs{64};
    int reference_spp{4096};
    int max_depth{4};
    double exposure{1.0};
    ReprojectionPolicy policy;
    double neighbor_radius{kDefaultNeighborRadius};
    double roughness_min_guide{0.05};
    int threads{default_thread_count()};
    /// When false, no image files are written for each frame (used by ab/flicker).
    bool write_frames{true};
};

/// Throws UsageError for values outside their documented ranges.
inline void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw UsageError(msg);
    };
    need(c.width >= 1 && c.height >= 1, "resolution must be at least 1x1");
    need(c.width <= 16384 && c.height <= 16384, "resolution too large");
    need(c.frames >= 1, "frames must be at least 1");
    need(c.spp >= 1, "spp must be at least 1");
    need(c.k_max >= 1.0, "kmax must be at least 1");
    need(c.warmup >= 0, "warmup must be non-negative");
    need(c.pairs >= 1, "pairs must be at least 1");
    need(c.reference_spp >= 1, "reference spp must be at least 1");
    need(c.max_depth >= 2, "max depth must be at least 2");
    need(c.exposure > 0.0, "exposure must be positive");
    need(c.policy.depth_rel_tol > 0.0, "depth_rel_tol must be positive");
    need(c.policy.normal_dot_min > -1.0 && c.policy.normal_dot_min < 1.0, "normal_dot_min must lie in (-1, 1)");
    need(c.neighbor_radius >= 0.0, "neighbor radius must be non-negative");
    need(c.roughness_min_guide >= 0.0, "roughness_min_guide must be non-negative");
    need(c.threads >= 1, "threads must be at least 1");
    need(!c.scene.empty(), "scene must be given");
}

inline PathConfig path_config(const RunConfig& c, Mode mode, int spp) {
    PathConfig p;
    p.max_depth = c.max_depth;
    p.guiding = mode == Mode::Pg;
    p.roughness_min_guide = c.roughness_min_guide;
    p.spp = spp;
    return p;
}

struct FrameTiming {
    int frame{0};
    double gbuffer_ms{0.0};
    double reproject_ms{0.0};
    double render_ms{0.0};
    double train_ms{0.0};
    double mean_path_length{0.0};
    std::uint64_t nonfinite{0};
    std::uint64_t history_accepted{0};
};

namespace detail {
inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string frame_name(int frame, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04d.%s", frame, ext);
    return buf;
}
}  // namespace detail

/// Frame-sequential renderer owning the guiding buffer. In pg mode each step
/// reprojects the buffer from the previous frame, renders, then trains.
class Session {
public:
    Session(Scene scene, const RunConfig& cfg, Mode mode)
        : scene_(std::move(scene)), cfg_(cfg), mode_(mode) {
        if (mode_ == Mode::Pg) gamma_ = GuidingBuffer(cfg.width, cfg.height);
    }

    const Scene& scene() const { return scene_; }
    Mode mode() const { return mode_; }

    /// Replaces the guiding buffer; its dimensions must match the session.
    void set_guiding(GuidingBuffer g) {
        if (g.width() != cfg_.width || g.height() != cfg_.height)
            throw DimensionError("guiding buffer is " + std::to_string(g.width()) + "x" + std::to_string(g.height()) +
                                 ", session is " + std::to_string(cfg_.width) + "x" + std::to_string(cfg_.height));
        gamma_ = std::move(g);
    }

    const std::optional<GuidingBuffer>& guiding() const { return gamma_; }

    /// Per-pixel guiding-buffer accesses made so far (reads while rendering
    /// plus pixels reprojected and trained).
    std::uint64_t gamma_accesses() const { return gamma_accesses_; }

    struct Step {
        RenderOutput render;
        FrameTiming timing;
    };

    /// Renders frame `frame` with `spp` samples. When `train` is false the
    /// guiding buffer is left untouched (frozen).
    Step step(int frame, std::uint64_t seed, int spp = 1, bool train = true, const RenderOptions* opts = nullptr) {
        Step s;
        s.timing.frame = frame;
        auto t0 = std::chrono::steady_clock::now();
        GBuffer gbuf = gbuffer_pass(scene_, frame, cfg_.width, cfg_.height);
        s.timing.gbuffer_ms = detail::ms_since(t0);

        if (mode_ == Mode::Pg && train && prev_gbuf_) {
            t0 = std::chrono::steady_clock::now();
            ReprojectResult rp = reproject(*gamma_, *prev_gbuf_, gbuf, cfg_.policy);
            gamma_accesses_ += gbuf.size();
            s.timing.history_accepted = rp.accepted;
            gamma_ = std::move(rp.gamma);
            s.timing.reproject_ms = detail::ms_since(t0);
        }

        RenderOptions ro;
        ro.threads = cfg_.threads;
        if (opts) ro = *opts;
        t0 = std::chrono::steady_clock::now();
        const GuidingBuffer* g = mode_ == Mode::Pg ? &*gamma_ : nullptr;
        s.render = render_frame(scene_, gbuf, g, path_config(cfg_, mode_, spp), seed, ro);
        s.timing.render_ms = detail::ms_since(t0);
        s.timing.mean_path_length = s.render.diag.mean_path_length();
        s.timing.nonfinite = s.render.diag.nonfinite;
        gamma_accesses_ += s.render.diag.gamma_reads;

        if (mode_ == Mode::Pg && train) {
            t0 = std::chrono::steady_clock::now();
            TrainingConfig tc;
            tc.k_max = cfg_.k_max;
            tc.radius = cfg_.neighbor_radius;
            tc.seed = seed;
            tc.frame = frame;
            tc.threads = cfg_.threads;
            gamma_ = training_pass(*gamma_, s.render.vpls, gbuf, scene_, tc).gamma;
            gamma_accesses_ += gbuf.size();
            s.timing.train_ms = detail::ms_since(t0);
            prev_gbuf_ = std::move(gbuf);
        }
        return s;
    }

private:
    Scene scene_;
    RunConfig cfg_;
    Mode mode_;
    std::optional<GuidingBuffer> gamma_;
    std::optional<GBuffer> prev_gbuf_;
    std::uint64_t gamma_accesses_{0};
};

inline void write_timing_csv(const std::vector<FrameTiming>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "frame,gbuffer_ms,reproject_ms,render_ms,train_ms,mean_path_length,nonfinite,history_accepted\n";
    out.precision(6);
    for (const auto& r : rows)
        out << r.frame << ',' << r.gbuffer_ms << ',' << r.reproject_ms << ',' << r.render_ms << ',' << r.train_ms
            << ',' << r.mean_path_length << ',' << r.nonfinite << ',' << r.history_accepted << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

struct RenderRun {
    std::vector<ImageRGB> frames;
    std::vector<FrameTiming> timing;
    std::optional<GuidingBuffer> final_guiding;
};

/// Renders cfg.frames frames in cfg.mode and writes frame_NNNN.pfm/.ppm,
/// timing.csv and the optional checkpoint. With a checkpoint-in the first
/// frame starts from the stored buffer as is.
inline RenderRun run_render(const RunConfig& cfg, bool keep_frames = false) {
    validate(cfg);
    Session session(load_scene(cfg.scene), cfg, cfg.mode);
    if (!cfg.checkpoint_in.empty()) {
        if (cfg.mode != Mode::Pg) throw UsageError("--checkpoint-in requires mode pg");
        session.set_guiding(checkpoint_load(cfg.checkpoint_in, std::pair{cfg.width, cfg.height}));
    }
    if (!cfg.checkpoint_out.empty() && cfg.mode != Mode::Pg) throw UsageError("--checkpoint-out requires mode pg");
    ensure_directory(cfg.out);
    RenderRun run;
    for (int f = 0; f < cfg.frames; ++f) {
        Session::Step s = session.step(f, cfg.seed, cfg.spp);
        if (cfg.write_frames) {
            write_pfm(s.render.image, join_path(cfg.out, detail::frame_name(f, "pfm")));
            write_ppm_tonemapped(s.render.image, join_path(cfg.out, detail::frame_name(f, "ppm")), cfg.exposure);
        }
        run.timing.push_back(s.timing);
        if (keep_frames) run.frames.push_back(std::move(s.render.image));
    }
    write_timing_csv(run.timing, join_path(cfg.out, "timing.csv"));
    if (session.guiding()) {
        run.final_guiding = *session.guiding();
        if (!cfg.checkpoint_out.empty()) checkpoint_save(*run.final_guiding, cfg.checkpoint_out);
    }
    return run;
}

struct Reference {
    ImageRGB mean;
    /// Per-pixel mean of squared samples.
    ImageRGB second_moment;
    int spp{0};
};

/// Plain path-traced accumulation of `spp` samples per pixel of frame 0.
inline Reference render_reference(const Scene& scene, const RunConfig& cfg, int spp, std::uint64_t seed) {
    RenderOptions ro;
    ro.threads = cfg.threads;
    ro.second_moment = true;
    RenderOutput r = render_frame(scene, 0, cfg.width, cfg.height, nullptr, path_config(cfg, Mode::Pt, spp),
                                  stream_seed(seed, 0, 0, salt::kReference), ro);
    return {std::move(r.image), std::move(r.second_moment), spp};
}

/// Writes reference.pfm (and a preview) using cfg.spp samples per pixel.
inline Reference run_reference(const RunConfig& cfg) {
    validate(cfg);
    const Scene scene = load_scene(cfg.scene);
    ensure_directory(cfg.out);
    Reference ref = render_reference(scene, cfg, cfg.spp, cfg.seed);
    write_pfm(ref.mean, join_path(cfg.out, "reference.pfm"));
    write_ppm_tonemapped(ref.mean, join_path(cfg.out, "reference.ppm"), cfg.exposure);
    return ref;
}

/// b / a with 0/0 treated as 1.
inline double safe_ratio(double b, double a) {
    if (a == 0.0) return b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return b / a;
}

inline std::vector<MetricRow> compare_images(const ImageRGB& a, const ImageRGB& b, const ImageRGB& ref) {
    const double ma = mse(a, ref), mb = mse(b, ref);
    const double ra = rel_mse(a, ref), rb = rel_mse(b, ref);
    return {{0, "mse_a", ma},         {0, "mse_b", mb},         {0, "mse_ratio_b_over_a", safe_ratio(mb, ma)},
            {0, "relmse_a", ra},      {0, "relmse_b", rb},      {0, "relmse_ratio_b_over_a", safe_ratio(rb, ra)}};
}

inline std::vector<MetricRow> run_compare(const std::string& a, const std::string& b, const std::string& ref,
                                          const std::string& csv_path) {
    const auto rows = compare_images(read_pfm(a), read_pfm(b), read_pfm(ref));
    if (!csv_path.empty()) write_metrics_csv(rows, csv_path);
    return rows;
}

/// Static-camera sequence in cfg.mode: cfg.warmup frames first (pg trains
/// during warmup), then cfg.frames measured frames, still training in pg.
/// Returns the temporal-MSE rows of the measured frames.
inline std::vector<MetricRow> run_flicker(const RunConfig& cfg, std::vector<ImageRGB>* frames_out = nullptr) {
    validate(cfg);
    if (cfg.frames < 2) throw UsageError("flicker needs at least 2 frames");
    Scene scene = load_scene(cfg.scene);
    if (!scene.camera_is_static()) throw UsageError("flicker needs a static camera; scene '" + cfg.scene + "' animates");
    Session session(std::move(scene), cfg, cfg.mode);
    if (!cfg.checkpoint_in.empty() && cfg.mode == Mode::Pg)
        session.set_guiding(checkpoint_load(cfg.checkpoint_in, std::pair{cfg.width, cfg.height}));
    for (int f = 0; f < cfg.warmup; ++f) session.step(f, cfg.seed, 1);
    std::vector<ImageRGB> frames;
    frames.reserve(static_cast<std::size_t>(cfg.frames));
    for (int f = 0; f < cfg.frames; ++f) frames.push_back(session.step(cfg.warmup + f, cfg.seed, cfg.spp).render.image);
    auto rows = flicker_series(frames);
    if (!cfg.out.empty()) {
        ensure_directory(cfg.out);
        write_metrics_csv(rows, join_path(cfg.out, std::string("flicker_") + mode_name(cfg.mode) + ".csv"));
    }
    if (frames_out) *frames_out = std::move(frames);
    return rows;
}

struct AbResult {
    std::vector<double> relmse_pt;
    std::vector<double> relmse_pg;
    double mean_pt{0.0};
    double mean_pg{0.0};
    double ratio{0.0};
    /// Guiding-buffer accesses made by each arm while measuring.
    std::uint64_t gamma_accesses_pt{0};
    std::uint64_t gamma_accesses_pg{0};
    Reference reference;
};

/// Paired comparison: a plain path-traced reference (cfg.reference_spp),
/// cfg.warmup guided frames with training, then cfg.pairs paired renders with
/// cfg.spp samples per arm. Both arms of a pair share a seed; the guiding
/// buffer is frozen during the pairs.
inline AbResult run_ab(const RunConfig& cfg, const Reference* precomputed_reference = nullptr) {
    validate(cfg);
    Scene scene = load_scene(cfg.scene);
    AbResult res;
    res.reference = precomputed_reference ? *precomputed_reference
                                          : render_reference(scene, cfg, cfg.reference_spp, cfg.seed);
    if (res.reference.mean.width() != cfg.width || res.reference.mean.height() != cfg.height)
        throw DimensionError("reference size does not match the run");
    Session pt(scene, cfg, Mode::Pt);
    Session pg(std::move(scene), cfg, Mode::Pg);
    if (!cfg.checkpoint_in.empty())
        pg.set_guiding(checkpoint_load(cfg.checkpoint_in, std::pair{cfg.width, cfg.height}));
    for (int f = 0; f < cfg.warmup; ++f) pg.step(f, cfg.seed, 1);
    const std::uint64_t pg_before = pg.gamma_accesses();
    for (int i = 0; i < cfg.pairs; ++i) {
        const std::uint64_t pair_seed = stream_seed(cfg.seed, static_cast<std::uint64_t>(i), 0, salt::kPairs);
        const int frame = cfg.warmup + i;
        res.relmse_pt.push_back(rel_mse(pt.step(frame, pair_seed, cfg.spp, false).render.image, res.reference.mean));
        res.relmse_pg.push_back(rel_mse(pg.step(frame, pair_seed, cfg.spp, false).render.image, res.reference.mean));
    }
    for (double v : res.relmse_pt) res.mean_pt += v;
    for (double v : res.relmse_pg) res.mean_pg += v;
    res.mean_pt /= cfg.pairs;
    res.mean_pg /= cfg.pairs;
    res.ratio = safe_ratio(res.mean_pg, res.mean_pt);
    res.gamma_accesses_pt = pt.gamma_accesses();
    res.gamma_accesses_pg = pg.gamma_accesses() - pg_before;

    if (!cfg.out.empty()) {
        ensure_directory(cfg.out);
        write_pfm(res.reference.mean, join_path(cfg.out, "reference.pfm"));
        std::vector<MetricRow> pairs;
        for (int i = 0; i < cfg.pairs; ++i) {
            pairs.push_back({i, "relmse_pt", res.relmse_pt[static_cast<std::size_t>(i)]});
            pairs.push_back({i, "relmse_pg", res.relmse_pg[static_cast<std::size_t>(i)]});
        }
        write_metrics_csv(pairs, join_path(cfg.out, "pairs.csv"));
        const std::vector<MetricRow> summary = {{0, "relmse_pt_mean", res.mean_pt},
                                                {0, "relmse_pg_mean", res.mean_pg},
                                                {0, "relmse_ratio_pg_over_pt", res.ratio}};
        write_metrics_csv(summary, join_path(cfg.out, "summary.csv"));
    }
    return res;
}

}  // namespace sspg
