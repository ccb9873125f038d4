// SPDX-License-Identifier: Apache-2.0
//
// dmimo-mpc — multipath classification and virtual-scatterer tracking for
// distributed massive MIMO channels
// Copyright (C) 2025-2026 the dmimo-mpc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <limits>

#include "dmimo/errors.hpp"

namespace dmimo
{

// Speed of light in vacuum [m/s]. All delay-to-distance conversions in the
// library use this single constant.
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kPi = 3.14159265358979323846;

// ------------------------------------------------------------------------
// Vec3 — right-handed Cartesian frame, z up, units of meters.
// ------------------------------------------------------------------------
struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm_sq() const { return x * x + y * y + z * z; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

    Vec3 normalized() const
    {
        const double n = norm();
        if (n <= 0.0 || !std::isfinite(n))
            throw NumericError("cannot normalize zero or non-finite vector");
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3 &v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3 &v, double s) { return s * v; }
inline Vec3 operator/(const Vec3 &v, double s) { return {v.x / s, v.y / s, v.z / s}; }
inline Vec3 &operator+=(Vec3 &a, const Vec3 &b) { a = a + b; return a; }
inline Vec3 &operator-=(Vec3 &a, const Vec3 &b) { a = a - b; return a; }
inline bool operator==(const Vec3 &a, const Vec3 &b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

// ------------------------------------------------------------------------
// AoA — arrival direction as (azimuth, zenith). The zenith angle is measured
// from the +z axis so that cos(zenith) is the z direction cosine. Azimuth is
// counted from +x toward +y, canonical range (-pi, pi]; at the poles
// (zenith 0 or pi) azimuth is canonicalized to 0.
// ------------------------------------------------------------------------
struct AoA
{
    double azimuth_rad = 0.0;
    double zenith_rad = 0.0;
};

inline bool aoa_valid(const AoA &a)
{
    return std::isfinite(a.azimuth_rad) && std::isfinite(a.zenith_rad) &&
           a.azimuth_rad > -kPi - 1e-12 && a.azimuth_rad <= kPi + 1e-12 &&
           a.zenith_rad >= -1e-12 && a.zenith_rad <= kPi + 1e-12;
}

// Unit direction cosines of the arrival ray leaving the panel.
inline Vec3 direction_vector(const AoA &aoa)
{
    const double sz = std::sin(aoa.zenith_rad);
    return {std::cos(aoa.azimuth_rad) * sz, std::sin(aoa.azimuth_rad) * sz, std::cos(aoa.zenith_rad)};
}

// Inverse of direction_vector for an arbitrary (non-zero) direction.
AoA aoa_from_direction(const Vec3 &dir);

// AoA of the ray from -> to. Throws InvalidArgument on coincident points.
AoA aoa_from_points(const Vec3 &from, const Vec3 &to);

// ------------------------------------------------------------------------
// Plane — n . p = offset with unit normal n.
// ------------------------------------------------------------------------
struct Plane
{
    Vec3 normal{0, 0, 1};
    double offset = 0.0;

    double signed_distance(const Vec3 &p) const { return dot(normal, p) - offset; }
};

// Reflection of a point across a plane (involution).
Vec3 mirror_image(const Vec3 &point, const Plane &plane);

// ------------------------------------------------------------------------
// Mat3 — small dense 3x3 matrix (row major), used for track covariances.
// ------------------------------------------------------------------------
struct Mat3
{
    double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};

    static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
    static Mat3 scaled(double s) { return {{s, 0, 0, 0, s, 0, 0, 0, s}}; }

    double &operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    double trace() const { return m[0] + m[4] + m[8]; }
    double det() const;
    Mat3 transposed() const;
    Mat3 symmetrized() const;

    // Inverse via the adjugate; throws NumericError when near singular.
    Mat3 inverse() const;

    bool is_symmetric(double tol) const;

    // Cholesky-based PSD test with a small diagonal jitter proportional to
    // the matrix scale; accepts boundary (singular PSD) matrices.
    bool is_psd(double tol = 1e-9) const;

    bool finite() const;
};

Mat3 operator+(const Mat3 &a, const Mat3 &b);
Mat3 operator-(const Mat3 &a, const Mat3 &b);
Mat3 operator*(const Mat3 &a, const Mat3 &b);
Mat3 operator*(double s, const Mat3 &a);
Vec3 operator*(const Mat3 &a, const Vec3 &v);

} // namespace dmimo
