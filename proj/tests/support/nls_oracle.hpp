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
#include <optional>

#include "dmimo/geometry.hpp"

namespace test_support
{

// Iterative oracle for the single-bounce scatterer: minimizes
//   || s - panel - (L - |s - ue|) e ||^2
// over s in R^3 by Gauss-Newton on the vector residual. Independent of the
// closed-form route used by the library.
inline std::optional<dmimo::Vec3> nls_single_bounce(const dmimo::Vec3 &panel,
                                                    const dmimo::Vec3 &ue, const dmimo::Vec3 &e,
                                                    double path_length)
{
    using dmimo::Vec3;
    using dmimo::Mat3;

    // Start mid-ray, nudged off-axis so the initial point is generic.
    Vec3 s = panel + 0.5 * path_length * e;
    const Vec3 nudge = std::abs(e.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    s += 0.05 * path_length * nudge;

    for (int iter = 0; iter < 200; ++iter)
    {
        const Vec3 su = s - ue;
        const double dist = su.norm();
        if (dist < 1e-12)
            return std::nullopt;
        const Vec3 n = su / dist;
        const Vec3 r = s - panel - (path_length - dist) * e;

        if (r.norm() < 1e-12)
            return s;

        // J = I + e n^T
        Mat3 jac = Mat3::identity();
        const double ev[3] = {e.x, e.y, e.z};
        const double nv[3] = {n.x, n.y, n.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                jac(i, j) += ev[i] * nv[j];

        Vec3 step;
        try
        {
            step = jac.inverse() * r;
        }
        catch (const dmimo::NumericError &)
        {
            return std::nullopt;
        }
        s -= step;
        if (step.norm() < 1e-14 * std::max(1.0, path_length))
        {
            const Vec3 su2 = s - ue;
            const Vec3 r2 = s - panel - (path_length - su2.norm()) * e;
            return r2.norm() < 1e-9 ? std::optional<Vec3>(s) : std::nullopt;
        }
    }
    return std::nullopt;
}

} // namespace test_support
