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
#include <cstdint>
#include <random>

namespace dmimo
{

// Deterministic random stream. Draws avoid std:: distributions on purpose:
// their output is implementation-defined, and identical seeds must produce
// bit-identical scenarios on every platform.
class RngStream
{
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    // Independent per-task substream, e.g. derived(seed, snapshot, panel).
    static RngStream derived(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t salt = 0)
    {
        std::uint64_t s = mix(seed ^ mix(a + 0x9e3779b97f4a7c15ull) ^
                              mix(b + 0x7f4a7c159e3779b9ull) ^ mix(salt + 0xa5a5a5a55a5a5a5aull));
        return RngStream(s);
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; two uniforms consumed per draw, no state carried over.
    double normal(double mean = 0.0, double sigma = 1.0)
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    int uniform_int(int lo, int hi) // inclusive bounds
    {
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    static std::uint64_t mix(std::uint64_t x) // splitmix64 finalizer
    {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
};

} // namespace dmimo
