// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Per-pixel guiding distribution: a truncated 2D Gaussian over the unit
// square (lifted to the hemisphere by the equal-area map) blended with the
// BRDF sampling density, plus its online expectation-maximization update.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "sspg/math.hpp"
#include "sspg/rng.hpp"
#include "sspg/sgmap.hpp"

namespace sspg {

inline constexpr double kPiMin = 0.05;
inline constexpr double kPiMax = 0.95;
inline constexpr double kSigmaEpsilon = 1e-4;
inline constexpr double kMinEigenvalue = 1e-6;
inline constexpr double kResetVariance = 0.05;
inline constexpr double kMinTruncationMass = 1e-4;
inline constexpr int kMaxGaussianAttempts = 16;
inline constexpr double kDefaultKMax = 64.0;

enum class Strategy : std::uint8_t { Brdf = 0, Gaussian = 1 };

/// The eight per-pixel scalars stored in the guiding buffer. Kept in single
/// precision so that checkpoints round-trip bit-exactly.
struct GuidingStats {
    float mean_x{0.5f};
    float mean_y{0.5f};
    float m2_xx{0.5f};
    float m2_yy{0.5f};
    float m2_xy{0.25f};
    float w_sum{0.0f};
    float pi{static_cast<float>(kPiMin)};
    float k{0.0f};

    friend constexpr bool operator==(const GuidingStats&, const GuidingStats&) = default;
};
static_assert(sizeof(GuidingStats) == 8 * sizeof(float));

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx{0.0};
    double xy{0.0};
    double yy{0.0};

    double det() const { return xx * yy - xy * xy; }

    /// Eigenvalues, smallest first.
    std::pair<double, double> eigenvalues() const {
        const double mean = 0.5 * (xx + yy);
        const double d = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
        return {mean - d, mean + d};
    }
};

/// Lower-triangular Cholesky factor [[l00, 0], [l10, l11]].
struct Lower2 {
    double l00{0.0};
    double l10{0.0};
    double l11{0.0};
};

struct GaussianLobe {
    SquarePoint mu;
    Sym2 sigma;
    Lower2 chol_l;
    /// Mass of the untruncated Gaussian inside [0,1]^2, clamped to [1e-4, 1].
    double trunc_z{1.0};
    /// Probability that the bounded rejection loop produces a Gaussian sample
    /// once the Gaussian strategy is selected, expressed relative to trunc_z
    /// (see mixture_pdf).
    double accept{1.0};
    Sym2 sigma_inv;
    /// 1 / (2 pi sqrt(det sigma)).
    double norm{1.0};
    /// True when the moments were degenerate and sigma was reset.
    bool was_reset{false};
};

struct RadianceSampleRec {
    SquarePoint sq;
    UnitDir dir;
    double weight{0.0};
    Strategy strategy{Strategy::Brdf};
};

struct WeightedRecord {
    RadianceSampleRec rec;
    double responsibility{0.0};
};

struct UpdateDiagnostics {
    std::uint64_t skipped_nonfinite{0};
    std::uint64_t degenerate_responsibility{0};
};

inline GuidingStats init_stats() { return GuidingStats{}; }

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1]; nodes are symmetric.
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

/// Integrates f over [a, b] with `panels` composite 16-point Gauss-Legendre panels.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 1) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < kGl16Nodes.size(); ++i) {
            const double dx = half * kGl16Nodes[i];
            sum += kGl16Weights[i] * half * (f(mid - dx) + f(mid + dx));
        }
    }
    return sum;
}

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

/// Unclamped mass of N(mu, sigma) inside [0,1]^2. The y-integral is done in
/// closed form through the conditional distribution y | x; the x-integral
/// uses composite Gauss-Legendre over the part of [0,1] within 8 sigma.
inline double raw_truncation_mass(const SquarePoint& mu, const Sym2& sigma) {
    const double sx = std::sqrt(sigma.xx);
    const double lo = std::max(0.0, mu.u - 8.0 * sx);
    const double hi = std::min(1.0, mu.u + 8.0 * sx);
    if (!(hi > lo)) return 0.0;
    const double slope = sigma.xy / sigma.xx;
    const double cond_sd = std::sqrt(std::max(sigma.det() / sigma.xx, 1e-300));
    auto integrand = [&](double x) {
        const double dx = x - mu.u;
        const double marginal = std::exp(-0.5 * dx * dx / sigma.xx) / (std::sqrt(kTwoPi) * sx);
        const double m = mu.v + slope * dx;
        return marginal * (normal_cdf((1.0 - m) / cond_sd) - normal_cdf(-m / cond_sd));
    };
    return std::clamp(gauss_legendre(integrand, lo, hi, 4), 0.0, 1.0);
}

inline double unnormalized_density(const GaussianLobe& lobe, const SquarePoint& p) {
    const double dx = p.u - lobe.mu.u;
    const double dy = p.v - lobe.mu.v;
    const double q = dx * dx * lobe.sigma_inv.xx + 2.0 * dx * dy * lobe.sigma_inv.xy +
                     dy * dy * lobe.sigma_inv.yy;
    return lobe.norm * std::exp(-0.5 * q);
}

inline GaussianLobe make_lobe(const SquarePoint& mu, Sym2 sigma, bool was_reset) {
    GaussianLobe lobe;
    lobe.mu = mu;
    lobe.sigma = sigma;
    lobe.was_reset = was_reset;
    const double det = sigma.det();
    lobe.sigma_inv = {sigma.yy / det, -sigma.xy / det, sigma.xx / det};
    lobe.norm = 1.0 / (kTwoPi * std::sqrt(det));
    lobe.chol_l.l00 = std::sqrt(sigma.xx);
    lobe.chol_l.l10 = sigma.xy / lobe.chol_l.l00;
    lobe.chol_l.l11 = std::sqrt(std::max(sigma.yy - lobe.chol_l.l10 * lobe.chol_l.l10, 0.0));

    const double raw_z = raw_truncation_mass(mu, sigma);
    lobe.trunc_z = std::clamp(raw_z, kMinTruncationMass, 1.0);
    // The sampler gives up after kMaxGaussianAttempts rejections, so the
    // Gaussian branch yields a Gaussian direction with probability
    // 1 - (1 - Z)^n. Folding that into the selection weight keeps the pdf
    // equal to the density the sampler actually realizes.
    double success;
    if (raw_z < 1e-12) {
        success = kMaxGaussianAttempts * raw_z;
        lobe.accept = kMaxGaussianAttempts * lobe.trunc_z;
    } else {
        success = -std::expm1(kMaxGaussianAttempts * std::log1p(-std::min(raw_z, 1.0 - 1e-16)));
        if (raw_z >= 1.0) success = 1.0;
        lobe.accept = success * lobe.trunc_z / raw_z;
    }
    lobe.accept = std::clamp(lobe.accept, 0.0, 1.0);
    return lobe;
}

}  // namespace detail

/// Builds the Gaussian described by the stored moments:
/// sigma = E[pp^T] - mu mu^T + 1e-4 I, reset to 0.05 I when degenerate.
inline GaussianLobe lobe_from_stats(const GuidingStats& s) {
    const SquarePoint mu{s.mean_x, s.mean_y};
    Sym2 sigma{double(s.m2_xx) - mu.u * mu.u + kSigmaEpsilon, double(s.m2_xy) - mu.u * mu.v,
               double(s.m2_yy) - mu.v * mu.v + kSigmaEpsilon};
    bool reset = false;
    const auto [lo, hi] = sigma.eigenvalues();
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo < kMinEigenvalue || !std::isfinite(mu.u) ||
        !std::isfinite(mu.v)) {
        sigma = {kResetVariance, 0.0, kResetVariance};
        reset = true;
    }
    SquarePoint m = mu;
    if (!std::isfinite(m.u) || !std::isfinite(m.v)) m = {0.5, 0.5};
    return detail::make_lobe(m, sigma, reset);
}

/// Gaussian mass inside the unit square, clamped to [1e-4, 1].
inline double truncation_mass(const GaussianLobe& lobe) {
    return std::clamp(detail::raw_truncation_mass(lobe.mu, lobe.sigma), kMinTruncationMass, 1.0);
}

/// Truncated Gaussian density on the unit square: N(p; mu, sigma) / Z.
inline double gaussian_pdf_square(const GaussianLobe& lobe, const SquarePoint& p) {
    return detail::unnormalized_density(lobe, p) / lobe.trunc_z;
}

/// Solid-angle density of the one-sample mixture:
/// pi' * N(M^-1(dir)) / (Z 2 pi) + (1 - pi') * brdf_pdf, with pi' = pi * accept.
inline double mixture_pdf(const GuidingStats& s, const GaussianLobe& lobe, const UnitDir& dir,
                          double brdf_pdf) {
    const double pi_eff = double(s.pi) * lobe.accept;
    double gauss = 0.0;
    if (dir.z > 0.0) gauss = square_density_to_solid_angle(gaussian_pdf_square(lobe, hemisphere_to_square(dir)));
    return pi_eff * gauss + (1.0 - pi_eff) * brdf_pdf;
}

/// Two independent standard normals from u1 in (0,1], u2 in [0,1).
inline std::pair<double, double> box_muller(double u1, double u2) {
    u1 = std::max(u1, 1e-12);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = kTwoPi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

struct MixtureSample {
    UnitDir dir;
    double pdf{0.0};
    Strategy strategy{Strategy::Brdf};
};

/// Draws one direction from the mixture. `sample_brdf(rng)` returns an
/// optional local direction; `brdf_pdf(dir)` its solid-angle density.
/// Returns nullopt when the BRDF sampler fails (the caller terminates the path).
template <class BrdfSampleFn, class BrdfPdfFn>
std::optional<MixtureSample> sample_mixture(const GuidingStats& s, const GaussianLobe& lobe,
                                            BrdfSampleFn&& sample_brdf, BrdfPdfFn&& brdf_pdf,
                                            Sampler& rng) {
    MixtureSample out;
    bool have_dir = false;
    if (rng.next() < double(s.pi)) {
        for (int attempt = 0; attempt < kMaxGaussianAttempts; ++attempt) {
            const double u1 = 1.0 - rng.next();
            const double u2 = rng.next();
            const auto [z0, z1] = box_muller(u1, u2);
            const SquarePoint p{lobe.mu.u + lobe.chol_l.l00 * z0,
                                lobe.mu.v + lobe.chol_l.l10 * z0 + lobe.chol_l.l11 * z1};
            if (p.u < 0.0 || p.u > 1.0 || p.v < 0.0 || p.v > 1.0) continue;
            out.dir = square_to_hemisphere(p);
            out.strategy = Strategy::Gaussian;
            have_dir = true;
            break;
        }
    }
    if (!have_dir) {
        const std::optional<UnitDir> d = sample_brdf(rng);
        if (!d) return std::nullopt;
        out.dir = *d;
        out.strategy = Strategy::Brdf;
    }
    out.pdf = mixture_pdf(s, lobe, out.dir, brdf_pdf(out.dir));
    return out;
}

/// Posterior probability that the Gaussian component produced a sample.
inline double e_step_responsibility(double pi, double gauss_pdf_sr, double brdf_pdf_sr) {
    const double g = pi * gauss_pdf_sr;
    const double total = g + (1.0 - pi) * brdf_pdf_sr;
    if (!(total > 0.0)) return 0.0;
    return std::clamp(g / total, 0.0, 1.0);
}

/// Learning rate of the temporally filtered M-step.
inline double learning_rate(double k, double k_max) { return std::max(1.0 / (k + 1.0), 1.0 / k_max); }

/// Online M-step: blends the batch's responsibility-weighted moments into the
/// running moments with rate max(1/(k+1), 1/kMax) and updates pi from the
/// batch's responsibility mass fraction.
inline GuidingStats m_step_update(const GuidingStats& s, std::span<const WeightedRecord> batch,
                                  double k_max = kDefaultKMax, UpdateDiagnostics* diag = nullptr) {
    double w_total = 0.0, b_total = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    double ux = 0.0, uy = 0.0, uxx = 0.0, uyy = 0.0, uxy = 0.0;
    for (const auto& wr : batch) {
        const double w = wr.rec.weight;
        const double r = wr.responsibility;
        if (!std::isfinite(w) || !std::isfinite(r) || w < 0.0) {
            if (diag) ++diag->skipped_nonfinite;
            continue;
        }
        const double x = wr.rec.sq.u, y = wr.rec.sq.v;
        const double wrr = w * r;
        w_total += w;
        b_total += wrr;
        sx += wrr * x;
        sy += wrr * y;
        sxx += wrr * x * x;
        syy += wrr * y * y;
        sxy += wrr * x * y;
        ux += w * x;
        uy += w * y;
        uxx += w * x * x;
        uyy += w * y * y;
        uxy += w * x * y;
    }
    if (!(w_total > 0.0)) return s;

    // When every responsibility underflows the lobe sits far from all data;
    // fall back to plain weights so it can move back.
    double norm = b_total;
    if (!(b_total > 1e-12 * w_total)) {
        if (diag) ++diag->degenerate_responsibility;
        sx = ux, sy = uy, sxx = uxx, syy = uyy, sxy = uxy;
        norm = w_total;
    }
    norm = std::max(norm, 1e-8);

    const double eta = learning_rate(s.k, k_max);
    auto blend = [eta](double old_v, double batch_v) { return (1.0 - eta) * old_v + eta * batch_v; };

    GuidingStats out = s;
    out.mean_x = static_cast<float>(std::clamp(blend(s.mean_x, sx / norm), 0.0, 1.0));
    out.mean_y = static_cast<float>(std::clamp(blend(s.mean_y, sy / norm), 0.0, 1.0));
    out.m2_xx = static_cast<float>(blend(s.m2_xx, sxx / norm));
    out.m2_yy = static_cast<float>(blend(s.m2_yy, syy / norm));
    out.m2_xy = static_cast<float>(blend(s.m2_xy, sxy / norm));
    out.pi = static_cast<float>(std::clamp(blend(s.pi, b_total / std::max(w_total, 1e-8)), kPiMin, kPiMax));
    out.w_sum = static_cast<float>(blend(s.w_sum, b_total));
    out.k = s.k + 1.0f;
    return out;
}

/// Number of VPL lookups per training step: round((1 - k/kMax) * 15 + 5),
/// half rounding up.
inline int neighbor_count(double k, double k_max) {
    const double frac = std::min(std::max(k, 0.0), k_max) / k_max;
    return static_cast<int>(std::floor((1.0 - frac) * 15.0 + 5.0 + 0.5));
}

}  // namespace sspg
