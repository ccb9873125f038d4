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

#include <random>

#include "dmimo/geometry.hpp"

namespace test_support
{

// Test-side generators, independent of the library RngStream.
struct Rand
{
    std::mt19937_64 eng;

    explicit Rand(std::uint64_t seed) : eng(seed) {}

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    }

    double normal(double mean = 0.0, double sigma = 1.0)
    {
        const double u1 = 1.0 - uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(2.0 * dmimo::kPi * u2);
    }

    dmimo::Vec3 vec3(double lo, double hi)
    {
        return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
    }

    dmimo::Vec3 unit()
    {
        while (true)
        {
            const dmimo::Vec3 v = vec3(-1.0, 1.0);
            const double n = v.norm();
            if (n > 1e-3 && n <= 1.0)
                return v / n;
        }
    }
};

} // namespace test_support
