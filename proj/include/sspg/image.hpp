// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "sspg/errors.hpp"
#include "sspg/math.hpp"

namespace sspg {

/// Row-major linear RGB image, row 0 at the top.
class ImageRGB {
public:
    ImageRGB() = default;
    ImageRGB(int width, int height)
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height * 3, 0.0f) {
        if (width < 0 || height < 0) throw DimensionError("negative image size");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    float* pixel(int x, int y) { return &data_[index(x, y)]; }
    const float* pixel(int x, int y) const { return &data_[index(x, y)]; }

    Rgb get(int x, int y) const {
        const float* p = pixel(x, y);
        return {p[0], p[1], p[2]};
    }

    void set(int x, int y, const Rgb& c) {
        float* p = pixel(x, y);
        p[0] = static_cast<float>(c.x);
        p[1] = static_cast<float>(c.y);
        p[2] = static_cast<float>(c.z);
    }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    bool same_size(const ImageRGB& o) const { return width_ == o.width_ && height_ == o.height_; }

    friend bool operator==(const ImageRGB&, const ImageRGB&) = default;

private:
    std::size_t index(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    }

    int width_{0};
    int height_{0};
    std::vector<float> data_;
};

}  // namespace sspg
