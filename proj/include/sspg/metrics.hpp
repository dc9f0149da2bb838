// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sspg/errors.hpp"
#include "sspg/image.hpp"

namespace sspg {

inline constexpr double kRelMseEpsilon = 0.01;

struct MetricRow {
    int frame{0};
    std::string metric;
    double value{0.0};
};

namespace detail {
inline void require_same_size(const ImageRGB& a, const ImageRGB& b, const char* what) {
    if (!a.same_size(b))
        throw DimensionError(std::string(what) + ": image sizes differ (" + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()) + ")");
}
}  // namespace detail

/// Mean over pixels and channels of (a - b)^2.
inline double mse(const ImageRGB& a, const ImageRGB& b) {
    detail::require_same_size(a, b, "mse");
    const auto& da = a.data();
    const auto& db = b.data();
    if (da.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = double(da[i]) - double(db[i]);
        sum += d * d;
    }
    return sum / double(da.size());
}

/// Mean over pixels and channels of (a - ref)^2 / (ref^2 + 0.01).
inline double rel_mse(const ImageRGB& a, const ImageRGB& ref) {
    detail::require_same_size(a, ref, "rel_mse");
    const auto& da = a.data();
    const auto& dr = ref.data();
    if (da.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double r = dr[i];
        const double d = double(da[i]) - r;
        sum += d * d / (r * r + kRelMseEpsilon);
    }
    return sum / double(da.size());
}

/// Temporal error of a sequence: one "temporal_mse" row per consecutive pair.
inline std::vector<MetricRow> flicker_series(std::span<const ImageRGB> frames) {
    if (frames.size() < 2) throw ValidationError("flicker_series needs at least 2 frames");
    std::vector<MetricRow> rows;
    rows.reserve(frames.size() - 1);
    for (std::size_t i = 0; i + 1 < frames.size(); ++i)
        rows.push_back({static_cast<int>(i), "temporal_mse", mse(frames[i], frames[i + 1])});
    return rows;
}

/// "frame,metric,value" CSV with LF endings. Values print with 17 significant digits.
inline void write_metrics_csv(std::span<const MetricRow> rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "frame,metric,value\n";
    out.precision(17);
    for (const auto& r : rows) out << r.frame << ',' << r.metric << ',' << r.value << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace sspg
