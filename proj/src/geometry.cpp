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

#include "dmimo/geometry.hpp"

#include <algorithm>

namespace dmimo
{

namespace
{
// Below this sine-of-zenith the azimuth is numerically meaningless.
constexpr double kPoleEps = 1e-12;
} // namespace

AoA aoa_from_direction(const Vec3 &dir)
{
    const double n = dir.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw InvalidArgument("direction vector must be finite and non-zero");

    const double cz = std::clamp(dir.z / n, -1.0, 1.0);
    AoA aoa;
    aoa.zenith_rad = std::acos(cz);

    const double rho = std::hypot(dir.x, dir.y);
    if (rho <= kPoleEps * n)
        aoa.azimuth_rad = 0.0; // pole: azimuth undefined, canonicalized
    else
    {
        aoa.azimuth_rad = std::atan2(dir.y, dir.x);
        if (aoa.azimuth_rad <= -kPi)
            aoa.azimuth_rad = kPi;
    }
    return aoa;
}

AoA aoa_from_points(const Vec3 &from, const Vec3 &to)
{
    const Vec3 d = to - from;
    if (d.norm() <= 0.0)
        throw InvalidArgument("aoa_from_points: coincident points");
    return aoa_from_direction(d);
}

Vec3 mirror_image(const Vec3 &point, const Plane &plane)
{
    const double n = plane.normal.norm();
    if (!(n > 1e-12) || !std::isfinite(n))
        throw InvalidArgument("mirror_image: degenerate plane normal");
    const Vec3 unit = plane.normal / n;
    const double dist = dot(unit, point) - plane.offset / n;
    return point - 2.0 * dist * unit;
}

double Mat3::det() const
{
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 Mat3::transposed() const
{
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
}

Mat3 Mat3::symmetrized() const
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return r;
}

Mat3 Mat3::inverse() const
{
    const double d = det();
    const double scale = std::max({std::abs(m[0]), std::abs(m[4]), std::abs(m[8])});
    if (!std::isfinite(d) || scale == 0.0 || std::abs(d) < 1e-30 * scale * scale * scale)
        throw NumericError("Mat3::inverse: matrix is singular");

    Mat3 r;
    r.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
    r.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
    r.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
    r.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
    r.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
    r.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
    r.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
    r.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
    r.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
    return r;
}

bool Mat3::is_symmetric(double tol) const
{
    const double scale = std::max(1.0, std::abs(trace()) / 3.0);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * scale)
                return false;
    return true;
}

bool Mat3::is_psd(double tol) const
{
    if (!finite() || !is_symmetric(1e-6))
        return false;
    const double scale = std::max(1.0, std::abs(trace()) / 3.0);
    Mat3 a = symmetrized();
    for (int i = 0; i < 3; ++i)
        a(i, i) += tol * scale;

    // In-place Cholesky; fails on a negative pivot.
    double l[9] = {0};
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j <= i; ++j)
        {
            double s = a(i, j);
            for (int k = 0; k < j; ++k)
                s -= l[3 * i + k] * l[3 * j + k];
            if (i == j)
            {
                if (s <= 0.0)
                    return false;
                l[3 * i + j] = std::sqrt(s);
            }
            else
                l[3 * i + j] = s / l[3 * j + j];
        }
    }
    return true;
}

bool Mat3::finite() const
{
    for (double v : m)
        if (!std::isfinite(v))
            return false;
    return true;
}

Mat3 operator+(const Mat3 &a, const Mat3 &b)
{
    Mat3 r;
    for (int i = 0; i < 9; ++i)
        r.m[i] = a.m[i] + b.m[i];
    return r;
}

Mat3 operator-(const Mat3 &a, const Mat3 &b)
{
    Mat3 r;
    for (int i = 0; i < 9; ++i)
        r.m[i] = a.m[i] - b.m[i];
    return r;
}

Mat3 operator*(const Mat3 &a, const Mat3 &b)
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
        {
            double s = 0;
            for (int k = 0; k < 3; ++k)
                s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

Mat3 operator*(double s, const Mat3 &a)
{
    Mat3 r;
    for (int i = 0; i < 9; ++i)
        r.m[i] = s * a.m[i];
    return r;
}

Vec3 operator*(const Mat3 &a, const Vec3 &v)
{
    return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
            a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
            a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
}

} // namespace dmimo
