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

#include <algorithm>
#include <set>

#include <doctest.h>

#include "dmimo/io.hpp"
#include "dmimo/synthesizer.hpp"
#include "dmimo/vs_tracker.hpp"
#include "support/test_rng.hpp"

using namespace dmimo;

namespace
{

// Mutual-minimum pairing straight from its definition, for cross-checking.
std::vector<std::pair<std::size_t, std::size_t>> brute_mutual_min(
    const std::vector<Vec3> &tracks, const std::vector<Vec3> &meas, double gate)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < tracks.size(); ++i)
        for (std::size_t j = 0; j < meas.size(); ++j)
        {
            const double dij = distance(tracks[i], meas[j]);
            if (dij > gate)
                continue;
            bool mutual = true;
            for (std::size_t jj = 0; jj < meas.size() && mutual; ++jj)
                if (jj != j && distance(tracks[i], meas[jj]) < dij)
                    mutual = false;
            for (std::size_t ii = 0; ii < tracks.size() && mutual; ++ii)
                if (ii != i && distance(tracks[ii], meas[j]) < dij)
                    mutual = false;
            if (mutual)
                pairs.emplace_back(i, j);
        }
    return pairs;
}

VsMeasurement meas_at(const Vec3 &p, int panel, int path = 1)
{
    VsMeasurement m;
    m.position = p;
    m.source = {panel, 1, path};
    return m;
}

TrackState fresh_track(const Vec3 &p, double m0)
{
    TrackState t;
    t.position = p;
    t.covariance = Mat3::scaled(m0);
    return t;
}

} // namespace

TEST_CASE("compute_vs: full-delay extension of the arrival ray")
{
    PanelGeometry panel;
    panel.panel_id = 1;
    panel.position = {0, 0, 0};

    MpcRecord mpc;
    mpc.key = {1, 1, 1};
    mpc.aoa = {0.0, kPi / 2};
    mpc.delay_s = 1.0e-8;
    CHECK(distance(compute_vs(mpc, panel).position, {2.99792458, 0, 0}) < 1e-9);

    mpc.aoa = {0.0, 0.0}; // straight up
    const Vec3 vs = compute_vs(mpc, panel).position;
    CHECK(vs.x == doctest::Approx(0.0));
    CHECK(vs.z == doctest::Approx(2.99792458));
}

TEST_CASE("kf_predict: covariance inflation only")
{
    TrackerConfig cfg;
    cfg.process_noise_m2 = 0.0025;

    TrackState t = fresh_track({1, 2, 3}, 1.0);
    const TrackState p = kf_predict(t, cfg);
    CHECK(p.position == t.position);
    for (int i = 0; i < 3; ++i)
        CHECK(p.covariance(i, i) == doctest::Approx(1.0025));
    CHECK(p.covariance.trace() > t.covariance.trace());

    cfg.process_noise_m2 = 0.0;
    const TrackState q = kf_predict(t, cfg);
    for (int i = 0; i < 9; ++i)
        CHECK(q.covariance.m[i] == t.covariance.m[i]);
}

TEST_CASE("kf_update: algebraic identities")
{
    TrackerConfig cfg;

    SUBCASE("matched covariances give the midpoint")
    {
        cfg.measurement_noise_m2 = 0.09;
        TrackState t = fresh_track({0, 0, 0}, 0.09); // M_pred == R
        const TrackState u = kf_update(t, {1, 0, 2}, cfg);
        CHECK(distance(u.position, {0.5, 0, 1}) < 1e-12);
        for (int i = 0; i < 3; ++i)
            CHECK(u.covariance(i, i) == doctest::Approx(0.045));
    }

    SUBCASE("vanishing measurement noise trusts the measurement")
    {
        cfg.measurement_noise_m2 = 1e-12;
        TrackState t = fresh_track({5, 5, 5}, 0.09);
        const TrackState u = kf_update(t, {1, 2, 3}, cfg);
        CHECK(distance(u.position, {1, 2, 3}) < 1e-6);
    }

    SUBCASE("trace contraction on random PSD inputs")
    {
        test_support::Rand rng(31);
        cfg.measurement_noise_m2 = 0.09;
        for (int i = 0; i < 1000; ++i)
        {
            Mat3 a;
            for (int k = 0; k < 9; ++k)
                a.m[k] = rng.uniform(-1, 1);
            TrackState t = fresh_track(rng.vec3(-5, 5), 1.0);
            t.covariance = (a * a.transposed()).symmetrized();
            const TrackState u = kf_update(t, rng.vec3(-5, 5), cfg);
            CHECK(u.covariance.trace() <= t.covariance.trace() + 1e-12);
            CHECK(u.covariance.is_psd());
        }
    }

    SUBCASE("non-PSD covariance is rejected")
    {
        TrackState t = fresh_track({0, 0, 0}, 1.0);
        t.covariance(0, 0) = -1.0;
        CHECK_THROWS_AS(kf_update(t, {0, 0, 0}, cfg), NumericError);
    }

    SUBCASE("Q=0 repeated updates equal recursive averaging")
    {
        test_support::Rand rng(17);
        cfg.process_noise_m2 = 0.0;
        cfg.measurement_noise_m2 = 0.09;
        cfg.initial_covariance_m2 = 0.09; // M0 = R

        const Vec3 s0 = rng.vec3(-2, 2);
        TrackState t = fresh_track(s0, cfg.initial_covariance_m2);

        Vec3 running_sum = s0;
        for (int n = 1; n <= 25; ++n)
        {
            const Vec3 z = rng.vec3(-2, 2);
            t = kf_update(kf_predict(t, cfg), z, cfg);
            running_sum += z;
            const Vec3 mean = running_sum / static_cast<double>(n + 1);
            CHECK(distance(t.position, mean) < 1e-9);
        }
    }
}

TEST_CASE("associate: basic pairing and mutuality")
{
    const Association a =
        associate({{0, 0, 0}, {10, 0, 0}}, {{0.1, 0, 0}, {9.8, 0, 0}}, 1.0);
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(a.pairs[1] == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(a.unmatched_tracks.empty());
    CHECK(a.unmatched_measurements.empty());

    // One track, two nearby measurements: only the nearest is mutual.
    const Association b = associate({{0, 0, 0}}, {{0.2, 0, 0}, {0.3, 0, 0}}, 1.0);
    REQUIRE(b.pairs.size() == 1);
    CHECK(b.pairs[0].second == 0);
    REQUIRE(b.unmatched_measurements.size() == 1);
    CHECK(b.unmatched_measurements[0] == 1);

    // Gate blocks everything.
    const Association c = associate({{0, 0, 0}}, {{5, 0, 0}}, 1.0);
    CHECK(c.pairs.empty());
    CHECK(c.unmatched_tracks.size() == 1);
    CHECK(c.unmatched_measurements.size() == 1);

    // Empty sides.
    CHECK(associate({}, {{1, 1, 1}}, 1.0).unmatched_measurements.size() == 1);
    CHECK(associate({{1, 1, 1}}, {}, 1.0).unmatched_tracks.size() == 1);
}

TEST_CASE("associate: equals the exhaustive definition on random instances")
{
    test_support::Rand rng(404);
    for (int trial = 0; trial < 10000; ++trial)
    {
        const int nt = static_cast<int>(rng.uniform(0, 8.999));
        const int nm = static_cast<int>(rng.uniform(0, 8.999));
        std::vector<Vec3> tracks, meas;
        for (int i = 0; i < nt; ++i)
            tracks.push_back(rng.vec3(0, 4));
        for (int j = 0; j < nm; ++j)
            meas.push_back(rng.vec3(0, 4));
        const double gate = rng.uniform(0.2, 5.0);

        auto got = associate(tracks, meas, gate).pairs;
        auto want = brute_mutual_min(tracks, meas, gate);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("associate: symmetric in the two point sets")
{
    test_support::Rand rng(8);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<Vec3> a, b;
        for (int i = 0; i < 5; ++i)
            a.push_back(rng.vec3(0, 3));
        for (int j = 0; j < 6; ++j)
            b.push_back(rng.vec3(0, 3));

        auto ab = associate(a, b, 1.0).pairs;
        auto ba = associate(b, a, 1.0).pairs;
        for (auto &[x, y] : ba)
            std::swap(x, y);
        std::sort(ab.begin(), ab.end());
        std::sort(ba.begin(), ba.end());
        CHECK(ab == ba);
    }
}

TEST_CASE("track_snapshot: coincident VSs form one confirmed track")
{
    TrackerConfig cfg;
    const Vec3 vs{3.0, -6.0, 1.0};

    std::map<int, std::vector<VsMeasurement>> by_panel;
    for (int k = 1; k <= 8; ++k)
        by_panel[k] = {meas_at(vs, k)};

    const SnapshotTracks out = track_snapshot(by_panel, 1, cfg);
    REQUIRE(out.tracks.size() == 1);
    const TrackState &t = out.tracks[0];
    CHECK(track_confirmed(t, cfg));
    CHECK(t.panels_visited.size() == 8);
    CHECK(distance(t.position, vs) < 1e-9);
    CHECK(t.covariance.trace() < Mat3::scaled(cfg.initial_covariance_m2).trace());
    for (const auto &[key, mech] : out.mechanism)
        CHECK(mech == Mechanism::reflected);
}

TEST_CASE("track_snapshot: scattered VSs never confirm")
{
    TrackerConfig cfg;
    cfg.gate_m = 0.2; // tight gate: expected chance 3-chains well under 1%
    test_support::Rand rng(555);

    std::map<int, std::vector<VsMeasurement>> by_panel;
    for (int k = 1; k <= 8; ++k)
        for (int c = 0; c < 6; ++c)
            by_panel[k].push_back(
                meas_at({rng.uniform(0, 10), rng.uniform(0, 8), rng.uniform(0, 3)}, k, c + 1));

    const SnapshotTracks out = track_snapshot(by_panel, 1, cfg);
    for (const TrackState &t : out.tracks)
        CHECK_FALSE(track_confirmed(t, cfg));
}

TEST_CASE("track_snapshot: partial visibility and the confirmation rule")
{
    TrackerConfig cfg;
    cfg.confirm_min_panels = 3;
    const Vec3 vs{-2.0, 4.0, 2.0};

    std::map<int, std::vector<VsMeasurement>> by_panel;
    for (int k = 1; k <= 8; ++k)
        by_panel[k] = {};
    for (int k = 3; k <= 5; ++k)
        by_panel[k] = {meas_at(vs, k)};

    const SnapshotTracks out = track_snapshot(by_panel, 1, cfg);
    REQUIRE(out.tracks.size() == 1);
    CHECK(out.tracks[0].panels_visited == std::vector<int>{3, 4, 5});
    CHECK(track_confirmed(out.tracks[0], cfg));

    cfg.confirm_min_panels = 4;
    CHECK_FALSE(track_confirmed(out.tracks[0], cfg));
}

TEST_CASE("track_snapshot: permuting measurements within panels changes nothing")
{
    TrackerConfig cfg;
    test_support::Rand rng(99);

    std::map<int, std::vector<VsMeasurement>> by_panel, shuffled;
    const Vec3 a{2, 2, 1}, b{7, 5, 2};
    for (int k = 1; k <= 6; ++k)
    {
        std::vector<VsMeasurement> v = {meas_at(a, k, 1), meas_at(b, k, 2),
                                        meas_at(rng.vec3(0, 9), k, 3)};
        by_panel[k] = v;
        std::reverse(v.begin(), v.end());
        shuffled[k] = v;
    }

    const SnapshotTracks first = track_snapshot(by_panel, 1, cfg);
    const SnapshotTracks second = track_snapshot(shuffled, 1, cfg);

    auto confirmed_positions = [&](const SnapshotTracks &s) {
        std::vector<Vec3> out;
        for (const TrackState &t : s.tracks)
            if (track_confirmed(t, cfg))
                out.push_back(t.position);
        std::sort(out.begin(), out.end(),
                  [](const Vec3 &x, const Vec3 &y) { return x.x < y.x; });
        return out;
    };
    const auto p1 = confirmed_positions(first);
    const auto p2 = confirmed_positions(second);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK(distance(p1[i], p2[i]) < 1e-9);
}

TEST_CASE("vs_to_aoa_per_panel: spherical wavefront across a panel row")
{
    const std::vector<PanelGeometry> panels = panel_row(8, 0.6, {5.0, 0.5, 1.5});
    TrackState t;
    t.position = {5.0, 4.5, 1.5}; // broadside, 4 m from the row

    const auto aoas = vs_to_aoa_per_panel(t, panels);
    REQUIRE(aoas.size() == 8);
    double lo = 1e9, hi = -1e9, prev = -1e9;
    for (const auto &[panel_id, aoa] : aoas)
    {
        CHECK(aoa.azimuth_rad > prev); // strictly monotone along the row
        prev = aoa.azimuth_rad;
        lo = std::min(lo, aoa.azimuth_rad);
        hi = std::max(hi, aoa.azimuth_rad);
    }
    const double aperture = 4.2, dist = 4.0;
    const double bound = 2.0 * std::atan(aperture / (2.0 * dist));
    CHECK(std::abs((hi - lo) - bound) < 0.1 * bound);
}

TEST_CASE("tracker reproduces the mirror image on synthetic wall reflections")
{
    Scenario sc = default_scenario();
    sc.noise = {};
    const GeometryConfig geo{sc.panels, sc.route};
    const Vec3 ue = geo.snapshot(25).position;

    // Feed only the west-wall first-order reflections of snapshot 25.
    std::map<int, std::vector<VsMeasurement>> by_panel;
    for (const PanelGeometry &panel : sc.panels)
        for (const GroundTruthMpc &t : generate_paths(sc, 25, panel.panel_id))
            if (t.bounce_order == 1 && t.surface_chain == std::vector<std::string>{"wall-west"})
                by_panel[panel.panel_id].push_back(compute_vs(t.record, panel));
    REQUIRE(by_panel.size() == 8);

    TrackerConfig cfg;
    const SnapshotTracks out = track_snapshot(by_panel, 25, cfg);
    REQUIRE(out.tracks.size() == 1);
    CHECK(track_confirmed(out.tracks[0], cfg));

    const Vec3 image = mirror_image(ue, Plane{{1, 0, 0}, 0.0});
    CHECK(distance(out.tracks[0].position, image) < 1e-6);

    // Noiseless estimated AoAs equal the generated ones.
    for (const PanelGeometry &panel : sc.panels)
        for (const GroundTruthMpc &t : generate_paths(sc, 25, panel.panel_id))
            if (t.bounce_order == 1 && t.surface_chain == std::vector<std::string>{"wall-west"})
            {
                const AoA est = aoa_from_points(panel.position, out.tracks[0].position);
                CHECK(std::abs(est.azimuth_rad - t.record.aoa.azimuth_rad) < 1e-6);
                CHECK(std::abs(est.zenith_rad - t.record.aoa.zenith_rad) < 1e-6);
            }
}

TEST_CASE("assign_vs_ids: identity persists across snapshots")
{
    TrackerConfig cfg;
    const Vec3 stable{4, -3, 1};

    std::vector<SnapshotTracks> snaps;
    for (int sid = 1; sid <= 3; ++sid)
    {
        std::map<int, std::vector<VsMeasurement>> by_panel;
        for (int k = 1; k <= 5; ++k)
        {
            VsMeasurement m = meas_at(stable + Vec3{0.01 * sid, 0, 0}, k);
            m.source.snapshot_id = sid;
            by_panel[k] = {m};
        }
        snaps.push_back(track_snapshot(by_panel, sid, cfg));
    }
    assign_vs_ids(snaps, cfg);

    std::set<int> ids;
    for (const SnapshotTracks &s : snaps)
    {
        REQUIRE(s.tracks.size() == 1);
        ids.insert(s.tracks[0].vs_id);
    }
    CHECK(ids.size() == 1); // same physical VS, same id everywhere
    CHECK(*ids.begin() == 0);
}
