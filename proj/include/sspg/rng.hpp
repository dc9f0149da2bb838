// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sspg {

/// splitmix64 finalizer; used to derive decorrelated stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the random stream owned by one pixel of one pass of one frame.
/// The salt separates passes (path tracing, training) that touch the same pixel.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t pixel,
                                    std::uint64_t salt = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ frame);
    h = mix64(h ^ pixel);
    return mix64(h ^ salt);
}

namespace salt {
inline constexpr std::uint64_t kPathTrace = 0x5054;
inline constexpr std::uint64_t kTraining = 0x5452;
inline constexpr std::uint64_t kPairs = 0x4142;
inline constexpr std::uint64_t kReference = 0x5246;
}  // namespace salt

/// Uniform sample source over [0, 1). Each pixel owns one, so results do not
/// depend on scheduling.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double next() {
        double u = dist_(engine_);
        // generate_canonical may round up to 1 on some standard libraries.
        return u < 1.0 ? u : std::nextafter(1.0, 0.0);
    }

    double operator()() { return next(); }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> dist_{0.0, 1.0};
};

}  // namespace sspg
