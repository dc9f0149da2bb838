// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Screen-space buffers shared by the path-tracing and training passes:
// the G-buffer, the VPL buffer (Pi) and the guiding buffer (Gamma).

#pragma once

#include <cstdint>
#include <vector>

#include "sspg/errors.hpp"
#include "sspg/math.hpp"
#include "sspg/mixture.hpp"
#include "sspg/scene.hpp"

namespace sspg {

struct GBufferPixel {
    bool valid{false};
    Vec3 pos;
    Vec3 normal;
    /// Unit direction from the surface toward the camera.
    Vec3 wo;
    /// View-axis distance from the camera.
    double depth{0.0};
    int material_id{-1};
    double roughness{1.0};
    /// Radiance emitted toward the camera (directly visible emitters).
    Rgb emission;
    /// Offset in pixels from this pixel to its position in the previous frame.
    double motion_u{0.0};
    double motion_v{0.0};
    /// False when the surface point was not on screen in the previous frame.
    bool has_history{false};
};

template <class T>
class PixelGrid {
public:
    PixelGrid() = default;
    PixelGrid(int width, int height, const T& fill = T{})
        : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {
        if (width < 1 || height < 1) throw DimensionError("buffer dimensions must be at least 1x1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return pixels_.size(); }

    T& at(int x, int y) { return pixels_[index(x, y)]; }
    const T& at(int x, int y) const { return pixels_[index(x, y)]; }
    T& operator[](std::size_t i) { return pixels_[i]; }
    const T& operator[](std::size_t i) const { return pixels_[i]; }

    std::vector<T>& pixels() { return pixels_; }
    const std::vector<T>& pixels() const { return pixels_; }

    template <class U>
    bool same_size(const PixelGrid<U>& o) const {
        return width_ == o.width() && height_ == o.height();
    }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_{0};
    int height_{0};
    std::vector<T> pixels_;
};

struct GBuffer : PixelGrid<GBufferPixel> {
    using PixelGrid::PixelGrid;
    Camera camera;
    int frame_index{0};
    Rgb background;
};

struct Vpl {
    bool valid{false};
    /// First-bounce hit point.
    Vec3 y;
    /// Radiance estimate arriving at the receiver from y.
    Rgb radiance;
    Strategy strategy{Strategy::Brdf};
};

using VplBuffer = PixelGrid<Vpl>;

/// Per-pixel guiding statistics. `generation` counts training passes.
struct GuidingBuffer : PixelGrid<GuidingStats> {
    GuidingBuffer() = default;
    GuidingBuffer(int width, int height) : PixelGrid(width, height, init_stats()) {}
    std::uint64_t generation{0};

    friend bool operator==(const GuidingBuffer& a, const GuidingBuffer& b) {
        return a.width() == b.width() && a.height() == b.height() && a.pixels() == b.pixels();
    }
};

}  // namespace sspg
