// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Per-pixel mean and standard error of luminance from independent batches,
// used by the unbiasedness checks in the unit tests and the acceptance run.

#pragma once

#include <cmath>
#include <vector>

#include "sspg/ptrace.hpp"

namespace sspg::test {

struct PixelEstimate {
    std::vector<double> mean;
    std::vector<double> se;
};

/// Renders `batches` frames of `spp_per_batch` samples, each with its own
/// seed, and returns the luminance mean and its standard error per pixel.
inline PixelEstimate batched_estimate(const Scene& scene, const GBuffer& gbuf, const GuidingBuffer* gamma,
                                      PathConfig cfg, std::uint64_t seed, int batches, int spp_per_batch) {
    cfg.spp = spp_per_batch;
    const std::size_t n = gbuf.size();
    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
    for (int b = 0; b < batches; ++b) {
        const RenderOutput out =
            render_frame(scene, gbuf, gamma, cfg, stream_seed(seed, std::uint64_t(b), 0, 0xBA7C));
        for (int y = 0; y < gbuf.height(); ++y)
            for (int x = 0; x < gbuf.width(); ++x) {
                const double l = luminance(out.image.get(x, y));
                const std::size_t i = std::size_t(y) * std::size_t(gbuf.width()) + std::size_t(x);
                sum[i] += l;
                sum_sq[i] += l * l;
            }
    }
    PixelEstimate e;
    e.mean.resize(n);
    e.se.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = sum[i] / batches;
        const double var = std::max(0.0, (sum_sq[i] - batches * m * m) / (batches - 1));
        e.mean[i] = m;
        e.se[i] = std::sqrt(var / batches);
    }
    return e;
}

/// Fraction of pixels whose means differ by at most `k` combined standard
/// errors. Pixels where both estimates are exact count as agreeing only when
/// the means match.
inline double fraction_within(const PixelEstimate& a, const PixelEstimate& b, double k) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        const double se = std::sqrt(a.se[i] * a.se[i] + b.se[i] * b.se[i]);
        const double d = std::abs(a.mean[i] - b.mean[i]);
        ok += (d <= k * se || d <= 1e-9 * std::max(1.0, std::abs(a.mean[i]))) ? 1 : 0;
    }
    return double(ok) / double(a.mean.size());
}

}  // namespace sspg::test
