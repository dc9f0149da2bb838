// Copyright 2026 sspg contributors
// SPDX-License-Identifier: Apache-2.0

// Area-preserving square <-> hemisphere mapping (concentric square-to-disk
// followed by the Lambert equal-area lift) and tangent frames.

#pragma once

#include <cmath>
#include <stdexcept>

#include "sspg/math.hpp"

namespace sspg {

/// Point of the unit square [0,1]^2.
struct SquarePoint {
    double u{0.5};
    double v{0.5};

    friend constexpr bool operator==(const SquarePoint&, const SquarePoint&) = default;
};

/// Unit direction expressed in a local tangent frame (z along the normal).
using UnitDir = Vec3;

/// Orthonormal right-handed frame {t, b, n}.
struct TangentFrame {
    Vec3 t;
    Vec3 b;
    Vec3 n;

    Vec3 to_local(const Vec3& w) const { return {dot(w, t), dot(w, b), dot(w, n)}; }
    Vec3 to_world(const Vec3& l) const { return t * l.x + b * l.y + n * l.z; }
};

namespace detail {

struct DiskPoint {
    double x;
    double y;
};

inline DiskPoint concentric_square_to_disk(const SquarePoint& p) {
    const double a = 2.0 * p.u - 1.0;
    const double b = 2.0 * p.v - 1.0;
    if (a == 0.0 && b == 0.0) return {0.0, 0.0};
    double r, phi;
    if (a * a > b * b) {
        r = a;
        phi = (kPi / 4.0) * (b / a);
    } else {
        r = b;
        phi = kPi / 2.0 - (kPi / 4.0) * (a / b);
    }
    return {r * std::cos(phi), r * std::sin(phi)};
}

inline SquarePoint concentric_disk_to_square(const DiskPoint& d) {
    const double r = std::sqrt(d.x * d.x + d.y * d.y);
    if (r == 0.0) return {0.5, 0.5};
    double phi = std::atan2(d.y, d.x);
    if (phi < -kPi / 4.0) phi += kTwoPi;
    double a, b;
    if (phi < kPi / 4.0) {
        a = r;
        b = phi * a / (kPi / 4.0);
    } else if (phi < 3.0 * kPi / 4.0) {
        b = r;
        a = -(phi - kPi / 2.0) * b / (kPi / 4.0);
    } else if (phi < 5.0 * kPi / 4.0) {
        a = -r;
        b = (phi - kPi) * a / (kPi / 4.0);
    } else {
        b = -r;
        a = -(phi - 3.0 * kPi / 2.0) * b / (kPi / 4.0);
    }
    return {clamp01(0.5 * (a + 1.0)), clamp01(0.5 * (b + 1.0))};
}

}  // namespace detail

/// Maps the unit square onto the upper unit hemisphere with constant
/// Jacobian: a region of area a maps to solid angle 2*pi*a.
inline UnitDir square_to_hemisphere(const SquarePoint& p) {
    const auto d = detail::concentric_square_to_disk(p);
    const double r2 = std::min(1.0, d.x * d.x + d.y * d.y);
    const double s = std::sqrt(2.0 - r2);
    return {d.x * s, d.y * s, 1.0 - r2};
}

/// Inverse of square_to_hemisphere. Throws std::domain_error below the horizon.
inline SquarePoint hemisphere_to_square(const UnitDir& d) {
    if (!(d.z >= 0.0)) throw std::domain_error("hemisphere_to_square: direction below hemisphere");
    const double s = 1.0 / std::sqrt(1.0 + std::min(1.0, d.z));
    return detail::concentric_disk_to_square({d.x * s, d.y * s});
}

/// Converts a density over the unit square into a density per steradian.
constexpr double square_density_to_solid_angle(double pdf_square) { return pdf_square / kTwoPi; }

/// Branchless orthonormal basis (revised Frisvad construction). The same
/// normal always yields the same frame.
inline TangentFrame build_tangent_frame(const Vec3& n) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double b = n.x * n.y * a;
    const Vec3 t{1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x};
    const Vec3 bt{b, sign + n.y * n.y * a, -n.y};
    return {t, bt, n};
}

}  // namespace sspg
