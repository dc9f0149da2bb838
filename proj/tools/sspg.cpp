// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// sspg: render PT/PG sequences, references, comparisons, flicker series and
// paired A/B runs. Exit status 0 on success, 1 on IO/runtime errors, 2 on
// usage errors.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sspg/harness.hpp"

namespace {

using sspg::RunConfig;
using json = nlohmann::json;

struct Binding {
    CLI::Option* opt{nullptr};
    std::function<void(const json&)> from_json;
};

/// Options shared by every rendering subcommand. Each is registered with a
/// JSON setter so a --config file can fill in whatever the flags leave unset.
class ConfigOptions {
public:
    ConfigOptions(CLI::App* app, RunConfig& cfg) : cfg_(cfg) {
        add(app, "--scene", cfg.scene, "built-in scene name or scene JSON path");
        add(app, "--width", cfg.width, "image width in pixels");
        add(app, "--height", cfg.height, "image height in pixels");
        add(app, "--frames", cfg.frames, "number of frames");
        add(app, "--spp", cfg.spp, "samples per pixel per frame");
        add(app, "--mode", mode_, "pt or pg");
        add(app, "--seed", cfg.seed, "random seed");
        add(app, "--kmax", cfg.k_max, "maximum training epoch count");
        add(app, "--out", cfg.out, "output directory");
        add(app, "--checkpoint-in", cfg.checkpoint_in, "guiding checkpoint to start from");
        add(app, "--checkpoint-out", cfg.checkpoint_out, "write the final guiding buffer here");
        add(app, "--warmup", cfg.warmup, "training frames before measuring");
        add(app, "--pairs", cfg.pairs, "paired frames per arm (ab)");
        add(app, "--reference-spp", cfg.reference_spp, "reference samples per pixel (ab)");
        add(app, "--max-depth", cfg.max_depth, "maximum path segments");
        add(app, "--exposure", cfg.exposure, "preview exposure");
        add(app, "--depth-rel-tol", cfg.policy.depth_rel_tol, "reprojection depth tolerance");
        add(app, "--normal-dot-min", cfg.policy.normal_dot_min, "reprojection normal agreement");
        add(app, "--neighbor-radius", cfg.neighbor_radius, "training neighbor radius in pixels");
        add(app, "--roughness-min-guide", cfg.roughness_min_guide, "roughness below which guiding is off");
        add(app, "--threads", cfg.threads, "worker threads (default PG_THREADS or all cores)");
        app->add_option("--config", config_path_, "JSON file with the same keys as the flags");
    }

    /// Applies the config file for keys not given on the command line.
    void finalize() {
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            if (!in) throw sspg::IoError("cannot open config '" + config_path_ + "'");
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::parse_error& e) {
                throw sspg::UsageError("config '" + config_path_ + "': " + e.what());
            }
            if (!doc.is_object()) throw sspg::UsageError("config '" + config_path_ + "' must hold a JSON object");
            for (const auto& [key, value] : doc.items()) {
                auto it = bindings_.find(key);
                if (it == bindings_.end()) throw sspg::UsageError("config: unknown key '" + key + "'");
                if (it->second.opt->count() > 0) continue;
                try {
                    it->second.from_json(value);
                } catch (const json::exception&) {
                    throw sspg::UsageError("config: bad value for '" + key + "'");
                }
            }
        }
        cfg_.mode = sspg::parse_mode(mode_);
    }

private:
    template <class T>
    void add(CLI::App* app, const std::string& flag, T& target, const std::string& help) {
        CLI::Option* opt = app->add_option(flag, target, help)->capture_default_str();
        bindings_[flag.substr(2)] = {opt, [&target](const json& v) { target = v.get<T>(); }};
    }

    RunConfig& cfg_;
    std::string mode_{"pt"};
    std::string config_path_;
    std::map<std::string, Binding> bindings_;
};

void print_rows(const std::vector<sspg::MetricRow>& rows) {
    for (const auto& r : rows) std::printf("%d,%s,%.17g\n", r.frame, r.metric.c_str(), r.value);
}

int run(int argc, char** argv) {
    CLI::App app{"Screen-space path guiding renderer and experiment harness"};
    app.require_subcommand(1);

    RunConfig render_cfg, ref_cfg, flicker_cfg, ab_cfg;
    ref_cfg.spp = 4096;
    flicker_cfg.frames = 64;

    auto* render = app.add_subcommand("render", "render a PT or PG frame sequence");
    ConfigOptions render_opts(render, render_cfg);

    auto* reference = app.add_subcommand("reference", "accumulate a path-traced reference image");
    ConfigOptions ref_opts(reference, ref_cfg);

    std::string cmp_a, cmp_b, cmp_ref, cmp_out{"compare.csv"};
    auto* compare = app.add_subcommand("compare", "mse/relMSE of two images against a reference");
    compare->add_option("image_a", cmp_a, "first image (PFM)")->required();
    compare->add_option("image_b", cmp_b, "second image (PFM)")->required();
    compare->add_option("reference", cmp_ref, "reference image (PFM)")->required();
    compare->add_option("--out", cmp_out, "CSV output path")->capture_default_str();

    auto* flicker = app.add_subcommand("flicker", "temporal MSE of a static-camera sequence");
    ConfigOptions flicker_opts(flicker, flicker_cfg);

    auto* ab = app.add_subcommand("ab", "paired PT vs PG relMSE after warmup");
    ConfigOptions ab_opts(ab, ab_cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (render->parsed()) {
        render_opts.finalize();
        const auto run = sspg::run_render(render_cfg);
        double total = 0.0;
        for (const auto& t : run.timing) total += t.gbuffer_ms + t.reproject_ms + t.render_ms + t.train_ms;
        std::printf("rendered %zu frame(s) in %.1f ms -> %s\n", run.timing.size(), total, render_cfg.out.c_str());
    } else if (reference->parsed()) {
        ref_opts.finalize();
        if (ref_cfg.mode != sspg::Mode::Pt) std::fprintf(stderr, "note: reference always uses mode pt\n");
        ref_cfg.mode = sspg::Mode::Pt;
        sspg::run_reference(ref_cfg);
        std::printf("reference (%d spp) -> %s\n", ref_cfg.spp,
                    sspg::join_path(ref_cfg.out, "reference.pfm").c_str());
    } else if (compare->parsed()) {
        print_rows(sspg::run_compare(cmp_a, cmp_b, cmp_ref, cmp_out));
    } else if (flicker->parsed()) {
        flicker_opts.finalize();
        const auto rows = sspg::run_flicker(flicker_cfg);
        double mean = 0.0;
        for (const auto& r : rows) mean += r.value;
        std::printf("mean temporal_mse (%s) = %.9g over %zu pairs\n", sspg::mode_name(flicker_cfg.mode),
                    mean / double(rows.size()), rows.size());
    } else if (ab->parsed()) {
        ab_opts.finalize();
        const auto res = sspg::run_ab(ab_cfg);
        std::printf("relmse_pt_mean %.9g\nrelmse_pg_mean %.9g\nratio_pg_over_pt %.6f\n", res.mean_pt, res.mean_pg,
                    res.ratio);
        std::printf("guiding buffer accesses: pt %llu, pg %llu\n",
                    static_cast<unsigned long long>(res.gamma_accesses_pt),
                    static_cast<unsigned long long>(res.gamma_accesses_pg));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const sspg::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
