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
//
// Acceptance suite. Each test case covers one release criterion and prints
// one `[ACCEPT] Cn PASS|FAIL` line with the measured numbers, independent of
// the assertion outcome, so a red run still documents what was achieved.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <json.hpp>

#include "dmimo/pipeline.hpp"
#include "dmimo/io.hpp"
#include "dmimo/synthesizer.hpp"
#include "support/acceptance_common.hpp"
#include "support/nls_oracle.hpp"
#include "support/test_rng.hpp"

using namespace dmimo;
using Clock = std::chrono::steady_clock;

namespace
{

// Floor for the noisy order-1 classification accuracy (criterion 3). The
// 100-seed Monte-Carlo study in tests/data/mc_order1_accuracy.txt (regenerate
// with the mc_oracle tool) observed a 0.952 mean / 0.952 median plateau; the
// bound is pinned two percentage points below that plateau.
constexpr double kOrder1AccuracyFloor = 0.932;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool pass, const std::string &detail)
{
    std::printf("[ACCEPT] C%-2d %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char *format, ...)
{
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// The 2 cm reference cloud is expensive; share it across criteria.
const SpatialIndex &reference_index()
{
    static const PointCloud cloud =
        export_cloud(acceptance::reference_scenario(true), 0.02);
    static const SpatialIndex index(cloud, 0.10);
    return index;
}

} // namespace

TEST_CASE("C1: closed-form single-bounce solver matches the NLS oracle")
{
    test_support::Rand rng(20240801);
    const auto start = Clock::now();

    int n_done = 0, n_agree = 0;
    double worst = 0.0;
    while (n_done < 1000)
    {
        const Vec3 panel_pos = rng.vec3(-5, 5);
        const Vec3 ue = rng.vec3(-5, 5);
        const Vec3 e = rng.unit();
        const double d1 = rng.uniform(0.5, 12.0);
        const double length = d1 + distance(panel_pos + d1 * e, ue);
        if (length < distance(panel_pos, ue) + 1e-3)
            continue;
        ++n_done;

        PanelGeometry panel;
        panel.panel_id = 1;
        panel.position = panel_pos;
        MpcRecord mpc;
        mpc.key = {1, 1, n_done};
        mpc.aoa = aoa_from_direction(e);
        mpc.delay_s = length / kSpeedOfLight;

        const SingleBounceSolution closed = solve_single_bounce(mpc, panel, ue);
        const auto oracle = test_support::nls_single_bounce(panel_pos, ue, e, length);
        if (closed.feasible && oracle)
        {
            const double err = distance(closed.scatterer, *oracle);
            worst = std::max(worst, err);
            if (err <= 1e-6)
                ++n_agree;
        }
    }
    const double elapsed = seconds_since(start);

    const bool pass = n_agree == 1000 && elapsed < 1.0;
    report(1, pass,
           fmt("%d/1000 within 1e-6 m (worst %.3g m), %.3f s", n_agree, worst, elapsed));
    CHECK(n_agree == 1000);
    CHECK(elapsed < 1.0);
}

TEST_CASE("C2: noiseless classification of the reference scenario")
{
    const Scenario sc = acceptance::reference_scenario(true);
    const GeometryConfig geo{sc.panels, sc.route};
    const ClassifierConfig cfg; // threshold 1.5 m

    const auto start = Clock::now(); // includes cloud sampling and indexing
    const SpatialIndex &index = reference_index();
    long n1 = 0, n1_ok = 0, n2 = 0, n2_ok = 0;
    struct Offender
    {
        double mismatch;
        MpcKey key;
        std::string chain;
    };
    std::vector<Offender> sub_threshold;

    for (const PanelGeometry &panel : sc.panels)
        for (const UeState &ue : sc.route)
            for (const GroundTruthMpc &t :
                 generate_paths(sc, ue.snapshot_id, panel.panel_id))
            {
                if (t.mechanism != PathMechanism::reflection)
                    continue;
                const BounceDecision d = classify(t.record, panel, ue.position, index, cfg);
                if (t.bounce_order == 1)
                {
                    ++n1;
                    if (d.label == BounceLabel::single)
                        ++n1_ok;
                }
                else
                {
                    ++n2;
                    if (d.label == BounceLabel::multi)
                        ++n2_ok;
                    else if (d.mismatch_m)
                        sub_threshold.push_back(
                            {*d.mismatch_m, t.record.key,
                             t.surface_chain[0] + "+" + t.surface_chain[1]});
                }
            }
    const double elapsed = seconds_since(start);

    const bool pass = n1_ok == n1 && n2_ok == n2 && elapsed < 60.0;
    std::string detail = fmt("order-1 %ld/%ld single (%.2f%%), order-2 %ld/%ld multi "
                             "(%.2f%%), %.1f s",
                             n1_ok, n1, 100.0 * n1_ok / n1, n2_ok, n2, 100.0 * n2_ok / n2,
                             elapsed);
    if (!sub_threshold.empty())
    {
        std::sort(sub_threshold.begin(), sub_threshold.end(),
                  [](const Offender &a, const Offender &b) { return a.mismatch < b.mismatch; });
        detail += fmt("; %zu order-2 paths fall below the 1.5 m gate, smallest mismatch "
                      "%.3f m (%s, panel %d, snapshot %d)",
                      sub_threshold.size(), sub_threshold.front().mismatch,
                      sub_threshold.front().chain.c_str(), sub_threshold.front().key.panel_id,
                      sub_threshold.front().key.snapshot_id);
    }
    report(2, pass, detail);
    CHECK(n1_ok == n1);
    CHECK(n2_ok == n2);
    CHECK(elapsed < 60.0);
}

TEST_CASE("C3: noisy order-1 accuracy over 100 seeds")
{
    const auto accuracies = acceptance::noisy_order1_study(100, 1000);
    std::vector<double> sorted = accuracies;
    std::sort(sorted.begin(), sorted.end());
    const double mean =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    const double median = 0.5 * (sorted[49] + sorted[50]);

    const bool pass = mean >= kOrder1AccuracyFloor;
    report(3, pass,
           fmt("mean %.4f, median %.4f, min %.4f over 100 seeds (floor %.3f = study plateau "
               "- 2pp; original 0.90 target %s)",
               mean, median, sorted.front(), kOrder1AccuracyFloor,
               mean >= 0.90 ? "met" : "missed"));
    CHECK(mean >= kOrder1AccuracyFloor);
}

TEST_CASE("C4: VS tracking recovers the mirror image and contracts the error")
{
    // Noiseless: west-wall reflection of one snapshot seen by all 8 panels.
    Scenario sc = acceptance::reference_scenario(true);
    sc.route = {{1, {5.0, 5.0, 1.0}, 0.0}};
    const GeometryConfig geo{sc.panels, sc.route};
    const Vec3 image = mirror_image(sc.route[0].position, Plane{{1, 0, 0}, 0.0});

    TrackerConfig cfg;
    std::map<int, std::vector<VsMeasurement>> by_panel;
    for (const PanelGeometry &panel : sc.panels)
        for (const GroundTruthMpc &t : generate_paths(sc, 1, panel.panel_id))
            if (t.surface_chain == std::vector<std::string>{"wall-west"})
                by_panel[panel.panel_id].push_back(compute_vs(t.record, panel));

    const SnapshotTracks out = track_snapshot(by_panel, 1, cfg);
    int n_confirmed = 0;
    double final_err = 1e9;
    for (const TrackState &t : out.tracks)
        if (track_confirmed(t, cfg))
        {
            ++n_confirmed;
            final_err = distance(t.position, image);
        }
    const bool noiseless_ok = n_confirmed == 1 && final_err <= 1e-6;

    // Noisy: (30 cm)^2 isotropic VS noise, 100 seeds; the filtered estimate
    // must beat the per-panel measurement RMS in the median.
    int n_better = 0;
    std::vector<double> ratios;
    for (int seed = 0; seed < 100; ++seed)
    {
        test_support::Rand rng(7000 + seed);
        std::map<int, std::vector<VsMeasurement>> noisy;
        double sq_sum = 0.0;
        for (int k = 1; k <= 8; ++k)
        {
            VsMeasurement m;
            m.position = image + Vec3{rng.normal(0, 0.3), rng.normal(0, 0.3), rng.normal(0, 0.3)};
            m.source = {k, 1, 1};
            sq_sum += (m.position - image).norm_sq();
            noisy[k] = {m};
        }
        const double meas_rms = std::sqrt(sq_sum / 8.0);
        const SnapshotTracks tracked = track_snapshot(noisy, 1, cfg);
        // A measurement landing outside the gate may split the track; the
        // dominant track carries the estimate in that case.
        REQUIRE(!tracked.tracks.empty());
        const TrackState *best = &tracked.tracks[0];
        for (const TrackState &t : tracked.tracks)
            if (t.panels_visited.size() > best->panels_visited.size())
                best = &t;
        const double err = distance(best->position, image);
        ratios.push_back(err / meas_rms);
        if (err <= meas_rms)
            ++n_better;
    }
    std::sort(ratios.begin(), ratios.end());
    const double median_ratio = 0.5 * (ratios[49] + ratios[50]);
    const bool noisy_ok = median_ratio <= 1.0;

    const bool pass = noiseless_ok && noisy_ok;
    report(4, pass,
           fmt("noiseless: %d confirmed track(s), final error %.2g m; noisy: median "
               "error/RMS %.3f, better in %d/100 seeds",
               n_confirmed, final_err, median_ratio, n_better));
    CHECK(noiseless_ok);
    CHECK(noisy_ok);
}

TEST_CASE("C5: mutual-minimum association equals the exhaustive oracle")
{
    test_support::Rand rng(31337);
    long n_match = 0;
    const int n_instances = 10000;
    for (int trial = 0; trial < n_instances; ++trial)
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

        // Oracle: the definition, evaluated literally.
        std::vector<std::pair<std::size_t, std::size_t>> want;
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
                    want.emplace_back(i, j);
            }
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        if (got == want)
            ++n_match;
    }
    const bool pass = n_match == n_instances;
    report(5, pass, fmt("%ld/%d instances identical to the oracle pairing", n_match, n_instances));
    CHECK(n_match == n_instances);
}

TEST_CASE("C6: Kalman update identities")
{
    TrackerConfig cfg;
    cfg.measurement_noise_m2 = 0.09;

    // Equal covariances: gain one half, state at the midpoint.
    TrackState t;
    t.position = {0, 0, 0};
    t.covariance = Mat3::scaled(cfg.measurement_noise_m2);
    const TrackState mid = kf_update(t, {2, 4, -6}, cfg);
    const bool gain_ok = distance(mid.position, {1, 2, -3}) < 1e-12 &&
                         std::abs(mid.covariance(0, 0) - 0.045) < 1e-12;

    // Trace contraction on 1000 random PSD covariances.
    test_support::Rand rng(606);
    int n_contract = 0;
    for (int i = 0; i < 1000; ++i)
    {
        Mat3 a;
        for (int k = 0; k < 9; ++k)
            a.m[k] = rng.uniform(-1, 1);
        TrackState s;
        s.position = rng.vec3(-5, 5);
        s.covariance = (a * a.transposed()).symmetrized();
        const TrackState u = kf_update(s, rng.vec3(-5, 5), cfg);
        if (u.covariance.trace() <= s.covariance.trace() + 1e-12)
            ++n_contract;
    }

    // Q = 0 repeated updates equal the running mean to 1e-9.
    cfg.process_noise_m2 = 0.0;
    cfg.initial_covariance_m2 = cfg.measurement_noise_m2;
    TrackState avg;
    avg.position = {1, -1, 2};
    avg.covariance = Mat3::scaled(cfg.initial_covariance_m2);
    Vec3 sum = avg.position;
    double worst_avg = 0;
    for (int n = 1; n <= 50; ++n)
    {
        const Vec3 z = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        avg = kf_update(kf_predict(avg, cfg), z, cfg);
        sum += z;
        worst_avg = std::max(worst_avg, distance(avg.position, sum / (n + 1.0)));
    }

    const bool pass = gain_ok && n_contract == 1000 && worst_avg < 1e-9;
    report(6, pass,
           fmt("half-gain identity %s; contraction %d/1000; averaging deviation %.2g m",
               gain_ok ? "ok" : "violated", n_contract, worst_avg));
    CHECK(gain_ok);
    CHECK(n_contract == 1000);
    CHECK(worst_avg < 1e-9);
}

TEST_CASE("C7: spherical wavefront across the panel row")
{
    // VS 4 m broadside of the 8-panel, 4.2 m row.
    const std::vector<PanelGeometry> panels = panel_row(8, 0.6, {5.0, 0.5, 1.5});
    const Vec3 vs{5.0, 4.5, 1.5};

    TrackerConfig cfg;
    std::map<int, std::vector<VsMeasurement>> by_panel;
    for (const PanelGeometry &p : panels)
        by_panel[p.panel_id] = {{vs, {p.panel_id, 1, 1}}};
    const SnapshotTracks out = track_snapshot(by_panel, 1, cfg);
    REQUIRE(out.tracks.size() == 1);

    const auto aoas = vs_to_aoa_per_panel(out.tracks[0], panels);
    bool monotone = true;
    double lo = 1e9, hi = -1e9, prev = -1e9;
    for (const auto &[panel_id, aoa] : aoas)
    {
        if (aoa.azimuth_rad <= prev)
            monotone = false;
        prev = aoa.azimuth_rad;
        lo = std::min(lo, aoa.azimuth_rad);
        hi = std::max(hi, aoa.azimuth_rad);
    }
    const double spread = hi - lo;
    const double bound = 2.0 * std::atan(4.2 / (2.0 * 4.0));
    const double rel = std::abs(spread - bound) / bound;

    const bool pass = monotone && rel <= 0.10;
    report(7, pass,
           fmt("spread %.4f rad vs bound %.4f rad (rel dev %.2f%%), azimuths %s",
               spread, bound, 100 * rel, monotone ? "strictly monotone" : "NOT monotone"));
    CHECK(monotone);
    CHECK(rel <= 0.10);
}

TEST_CASE("C8: exponential fitting: exactness, noise, preference")
{
    // Exact recovery.
    std::vector<std::pair<double, double>> exact;
    for (int i = 0; i < 20; ++i)
    {
        const double d = 2.0 + 10.0 * i / 19.0;
        exact.emplace_back(d, 0.45 * std::exp(-0.11 * d));
    }
    const FitResult f = fit_exponential(exact);
    const bool exact_ok = std::abs(f.a - 0.45) / 0.45 < 1e-6 &&
                          std::abs(f.b + 0.11) / 0.11 < 1e-6 &&
                          std::abs(f.r_squared - 1.0) < 1e-9;

    // Noisy recovery, 5% median over 100 seeds; preference count.
    int n_prefer_exp = 0;
    std::vector<double> worst_rel;
    for (int seed = 0; seed < 100; ++seed)
    {
        test_support::Rand rng(42000 + seed);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 50; ++i)
        {
            const double d = 2.0 + 10.0 * i / 49.0;
            pts.emplace_back(d, 0.45 * std::exp(-0.11 * d) + rng.normal(0, 0.02));
        }
        const ModelComparison cmp = compare_models(pts);
        worst_rel.push_back(std::max(std::abs(cmp.exponential.a - 0.45) / 0.45,
                                     std::abs(cmp.exponential.b + 0.11) / 0.11));
        if (cmp.preferred == FitModel::exponential)
            ++n_prefer_exp;
    }
    std::sort(worst_rel.begin(), worst_rel.end());
    const double median_rel = 0.5 * (worst_rel[49] + worst_rel[50]);

    const bool pass = exact_ok && median_rel < 0.05 && n_prefer_exp >= 95;
    report(8, pass,
           fmt("exact (a,b,R2)=(%.6f, %.6f, %.9f); noisy median rel err %.3f%%; "
               "exponential preferred %d/100",
               f.a, f.b, f.r_squared, 100 * median_rel, n_prefer_exp));
    CHECK(exact_ok);
    CHECK(median_rel < 0.05);
    CHECK(n_prefer_exp >= 95);
}

TEST_CASE("C9: end-to-end determinism and runtime")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "dmimo_accept_e2e";
    fs::remove_all(dir);

    const auto start = Clock::now();

    const Scenario sc = acceptance::reference_scenario(false); // default noise
    synthesize_to_directory(sc, (dir / "synth").string());

    const PointCloud cloud = load_ply((dir / "synth" / "cloud.ply").string());
    const GeometryConfig geo = load_geometry((dir / "synth" / "geometry.json").string());
    const auto records = ingest_mpc_csv((dir / "synth" / "mpcs.csv").string());
    validate_dataset(geo, records);

    RunConfig cfg;
    cfg.seed = sc.seed;
    const Report r1 = run_pipeline(&cloud, geo, records, cfg, stage_all);
    write_report(r1, (dir / "out").string(), out_everything);
    const double elapsed = seconds_since(start);

    const Report r2 = run_pipeline(&cloud, geo, records, cfg, stage_all);
    nlohmann::json j1 = nlohmann::json::parse(report_to_json(r1));
    nlohmann::json j2 = nlohmann::json::parse(report_to_json(r2));
    j1["metadata"].erase("generated_at_utc");
    j2["metadata"].erase("generated_at_utc");
    const bool identical = j1 == j2;

    // Regenerating the scenario must be bit-identical as well.
    synthesize_to_directory(sc, (dir / "synth2").string());
    std::ifstream a(dir / "synth" / "mpcs.csv", std::ios::binary);
    std::ifstream b(dir / "synth2" / "mpcs.csv", std::ios::binary);
    const std::string ca((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string cb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    const bool synth_identical = !ca.empty() && ca == cb;

    const bool pass = identical && synth_identical && elapsed < 300.0;
    report(9, pass,
           fmt("report determinism %s, scenario regeneration %s, pipeline %.1f s "
               "(%zu MPCs, %zu cloud points)",
               identical ? "exact" : "BROKEN", synth_identical ? "bit-identical" : "BROKEN",
               elapsed, records.size(), cloud.size()));
    CHECK(identical);
    CHECK(synth_identical);
    CHECK(elapsed < 300.0);
    fs::remove_all(dir);
}

TEST_CASE("C10: birth and death across the panel row")
{
    // Wall segment placed so its specular point is valid exactly for panels
    // 1-4 of the reference row.
    Scenario sc = acceptance::reference_scenario(true);
    sc.patches.push_back({"segment", 0, 0.0, 2.4, 3.2, 0.5, 2.5, Region::wall_west});
    sc.route = {{1, {5.0, 6.0, 1.0}, 0.0}};

    TrackerConfig cfg; // confirm_min_panels = 3 <= 4
    std::map<int, std::vector<VsMeasurement>> by_panel;
    std::set<int> visible;
    for (const PanelGeometry &panel : sc.panels)
        for (const GroundTruthMpc &t : generate_paths(sc, 1, panel.panel_id))
            if (t.surface_chain == std::vector<std::string>{"segment"})
            {
                visible.insert(panel.panel_id);
                by_panel[panel.panel_id].push_back(compute_vs(t.record, panel));
            }

    const SnapshotTracks out = track_snapshot(by_panel, 1, cfg);
    std::vector<int> lifetime_set;
    int n_confirmed = 0;
    for (const TrackState &t : out.tracks)
        if (track_confirmed(t, cfg))
        {
            ++n_confirmed;
            lifetime_set = t.panels_visited;
        }

    const bool visibility_ok = visible == std::set<int>{1, 2, 3, 4};
    const bool track_ok = n_confirmed == 1 && lifetime_set == std::vector<int>{1, 2, 3, 4};
    const bool pass = visibility_ok && track_ok;

    std::string panels_str;
    for (int p : lifetime_set)
        panels_str += (panels_str.empty() ? "" : ",") + std::to_string(p);
    report(10, pass,
           fmt("segment visible at %zu panels, confirmed tracks %d, lifetime set {%s}",
               visible.size(), n_confirmed, panels_str.c_str()));
    CHECK(visibility_ok);
    CHECK(track_ok);
}
