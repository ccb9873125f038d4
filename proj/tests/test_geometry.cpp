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

#include <doctest.h>

#include "dmimo/geometry.hpp"
#include "support/test_rng.hpp"

using namespace dmimo;

TEST_CASE("direction_vector: axis-aligned angles")
{
    const Vec3 px = direction_vector({0.0, kPi / 2});
    CHECK(px.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(px.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(px.z) < 1e-15);

    const Vec3 py = direction_vector({kPi / 2, kPi / 2});
    CHECK(std::abs(py.x) < 1e-15);
    CHECK(py.y == doctest::Approx(1.0).epsilon(1e-15));

    const Vec3 pz = direction_vector({0.3, 0.0}); // zenith 0 points straight up
    CHECK(pz.z == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("direction_vector: unit norm and zenith recovery")
{
    const AoA aoa{0.3, 1.1};
    const Vec3 e = direction_vector(aoa);
    CHECK(std::abs(e.norm() - 1.0) < 1e-12);
    CHECK(std::acos(e.z) == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("aoa_from_points: axis cases and pole canonicalization")
{
    const AoA a = aoa_from_points({0, 0, 0}, {5, 0, 0});
    CHECK(a.azimuth_rad == doctest::Approx(0.0));
    CHECK(a.zenith_rad == doctest::Approx(kPi / 2));

    const AoA up = aoa_from_points({0, 0, 0}, {0, 0, 2});
    CHECK(up.zenith_rad == doctest::Approx(0.0));
    CHECK(up.azimuth_rad == 0.0); // azimuth canonicalized at the pole

    CHECK_THROWS_AS(aoa_from_points({1, 1, 1}, {1, 1, 1}), InvalidArgument);
}

TEST_CASE("aoa/direction round trip away from poles")
{
    test_support::Rand rng(42);
    for (int i = 0; i < 1000; ++i)
    {
        const Vec3 from = rng.vec3(-10, 10);
        Vec3 to = rng.vec3(-10, 10);
        if (distance(from, to) < 1e-6)
            to.x += 1.0;
        const AoA aoa = aoa_from_points(from, to);
        if (aoa.zenith_rad < 1e-6 || aoa.zenith_rad > kPi - 1e-6)
            continue;
        const Vec3 dir = direction_vector(aoa);
        const AoA back = aoa_from_direction(dir);
        CHECK(std::abs(back.azimuth_rad - aoa.azimuth_rad) < 1e-9);
        CHECK(std::abs(back.zenith_rad - aoa.zenith_rad) < 1e-9);
        // direction parallel to (to - from), same orientation
        const Vec3 d = (to - from).normalized();
        CHECK(cross(dir, d).norm() < 1e-9);
        CHECK(dot(dir, d) > 0.0);
    }
}

TEST_CASE("mirror_image: basic reflections and involution")
{
    const Plane wall{{1, 0, 0}, 5.0}; // x = 5
    const Vec3 m = mirror_image({2, 1, 1}, wall);
    CHECK(m.x == doctest::Approx(8.0));
    CHECK(m.y == doctest::Approx(1.0));
    CHECK(m.z == doctest::Approx(1.0));

    const Vec3 fixed = mirror_image({5, -3, 2}, wall); // point on the plane
    CHECK(distance(fixed, {5, -3, 2}) < 1e-12);

    test_support::Rand rng(7);
    for (int i = 0; i < 1000; ++i)
    {
        const Vec3 p = rng.vec3(-20, 20);
        const Plane plane{rng.unit(), rng.uniform(-5, 5)};
        const Vec3 twice = mirror_image(mirror_image(p, plane), plane);
        CHECK(distance(twice, p) < 1e-12);
    }

    CHECK_THROWS_AS(mirror_image({0, 0, 0}, Plane{{0, 0, 0}, 1.0}), InvalidArgument);
}

TEST_CASE("Mat3: inverse, PSD check, arithmetic")
{
    test_support::Rand rng(11);
    for (int i = 0; i < 200; ++i)
    {
        Mat3 a;
        for (int k = 0; k < 9; ++k)
            a.m[k] = rng.uniform(-2, 2);
        const Mat3 spd = (a * a.transposed() + Mat3::scaled(0.5)).symmetrized();
        CHECK(spd.is_psd());

        const Mat3 prod = spd * spd.inverse();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(prod(r, c) - (r == c ? 1.0 : 0.0)) < 1e-9);
    }

    Mat3 negative = Mat3::scaled(1.0);
    negative(2, 2) = -0.1;
    CHECK_FALSE(negative.is_psd());

    CHECK_THROWS_AS(Mat3{}.inverse(), NumericError);
}
