// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// PFM (float, bit-exact) and tonemapped 8-bit PPM image files.

#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sspg/errors.hpp"
#include "sspg/image.hpp"

namespace sspg {

namespace detail {

inline void put_f32_le(std::vector<char>& buf, float f) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

inline float get_f32_le(const unsigned char* p) {
    const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
                               (std::uint32_t(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

/// Reads one whitespace-delimited header token; PFM/PPM headers end with a
/// single whitespace byte before the payload.
inline std::string header_token(const std::vector<unsigned char>& bytes, std::size_t& pos) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
    return tok;
}

}  // namespace detail

/// Writes "PF\n<w> <h>\n-1.0\n" then little-endian float32 RGB rows, bottom row first.
inline void write_pfm(const ImageRGB& img, const std::string& path) {
    std::vector<char> buf;
    const std::string header = "PF\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n-1.0\n";
    buf.insert(buf.end(), header.begin(), header.end());
    buf.reserve(buf.size() + img.pixel_count() * 12);
    for (int y = img.height() - 1; y >= 0; --y)
        for (int x = 0; x < img.width(); ++x) {
            const float* p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) detail::put_f32_le(buf, p[c]);
        }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline ImageRGB read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    if (detail::header_token(bytes, pos) != "PF") throw FormatError(path + ": not an RGB PFM file");
    int w = 0, h = 0;
    double scale = 0.0;
    try {
        w = std::stoi(detail::header_token(bytes, pos));
        h = std::stoi(detail::header_token(bytes, pos));
        scale = std::stod(detail::header_token(bytes, pos));
    } catch (const std::exception&) {
        throw FormatError(path + ": malformed PFM header");
    }
    if (w <= 0 || h <= 0 || scale == 0.0 || !std::isfinite(scale)) throw FormatError(path + ": malformed PFM header");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError(path + ": truncated PFM header");
    ++pos;
    const bool little = scale < 0.0;
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 12;
    if (bytes.size() - pos < need) throw FormatError(path + ": truncated PFM payload");
    if (bytes.size() - pos > need) throw FormatError(path + ": PFM payload larger than header size");
    ImageRGB img(w, h);
    const unsigned char* p = bytes.data() + pos;
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x) {
            float* dst = img.pixel(x, y);
            for (int c = 0; c < 3; ++c, p += 4) {
                if (little) {
                    dst[c] = detail::get_f32_le(p);
                } else {
                    const unsigned char be[4] = {p[3], p[2], p[1], p[0]};
                    dst[c] = detail::get_f32_le(be);
                }
            }
        }
    return img;
}

/// Display byte for a linear value: round(255 * clamp01(v * exposure)^(1/2.2)), half up.
inline std::uint8_t tonemap_byte(double linear, double exposure) {
    const double v = std::clamp(linear * exposure, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(255.0 * std::pow(v, 1.0 / 2.2) + 0.5));
}

inline void write_ppm_tonemapped(const ImageRGB& img, const std::string& path, double exposure = 1.0) {
    if (!(exposure > 0.0)) throw ValidationError("exposure must be positive");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(img.width()) * 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const float* p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c)
                row[static_cast<std::size_t>(x) * 3 + c] = static_cast<char>(tonemap_byte(p[c], exposure));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace sspg
