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

#include "dmimo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace dmimo
{

using nlohmann::json;

namespace
{

// Chunked parallel loop; worker exceptions are rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn &&fn)
{
    if (n == 0)
        return;
    unsigned hw = threads != 0 ? threads : std::thread::hardware_concurrency();
    hw = std::max(1u, std::min<unsigned>(hw, static_cast<unsigned>(n)));
    if (hw == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        try
        {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        }
        catch (...)
        {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error)
                error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(hw);
    for (unsigned t = 0; t < hw; ++t)
        pool.emplace_back(worker);
    for (std::thread &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t fnv1a(const std::string &text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void require_known_keys(const json &j, std::initializer_list<const char *> known,
                        const std::string &where)
{
    for (const auto &item : j.items())
    {
        bool ok = false;
        for (const char *k : known)
            if (item.key() == k)
            {
                ok = true;
                break;
            }
        if (!ok)
            throw InvalidArgument("unknown config key '" + where + item.key() + "'");
    }
}

} // namespace

RunConfig run_config_from_json(const std::string &json_text)
{
    RunConfig cfg;
    if (json_text.empty())
        return cfg;

    json j;
    try
    {
        j = json::parse(json_text);
    }
    catch (const json::exception &e)
    {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.is_null())
        return cfg;
    if (!j.is_object())
        throw InvalidArgument("config must be a JSON object");

    try
    {
        require_known_keys(j, {"classifier", "tracker", "fit", "voxel_size_m", "wall_margin_m",
                               "eps_delay_s", "seed", "threads"},
                           "");
        if (j.contains("classifier"))
        {
            const json &c = j["classifier"];
            require_known_keys(c, {"threshold_m", "march_step_m", "capture_radius_m",
                                   "min_support", "infeasible_policy", "exclude_los",
                                   "los_delay_tol_s", "los_angle_tol_deg"},
                               "classifier.");
            cfg.classifier.threshold_m = c.value("threshold_m", cfg.classifier.threshold_m);
            cfg.classifier.march.step_m = c.value("march_step_m", cfg.classifier.march.step_m);
            cfg.classifier.march.capture_radius_m =
                c.value("capture_radius_m", cfg.classifier.march.capture_radius_m);
            cfg.classifier.march.min_support =
                c.value("min_support", cfg.classifier.march.min_support);
            if (c.contains("infeasible_policy"))
            {
                const std::string p = c["infeasible_policy"].get<std::string>();
                if (p == "multi")
                    cfg.classifier.infeasible_policy = ClassifierConfig::InfeasiblePolicy::multi;
                else if (p == "indeterminate")
                    cfg.classifier.infeasible_policy =
                        ClassifierConfig::InfeasiblePolicy::indeterminate;
                else
                    throw InvalidArgument("infeasible_policy must be 'multi' or 'indeterminate'");
            }
            cfg.classifier.exclude_los = c.value("exclude_los", cfg.classifier.exclude_los);
            cfg.classifier.los_delay_tol_s =
                c.value("los_delay_tol_s", cfg.classifier.los_delay_tol_s);
            if (c.contains("los_angle_tol_deg"))
                cfg.classifier.los_angle_tol_rad =
                    c["los_angle_tol_deg"].get<double>() * kPi / 180.0;
        }
        if (j.contains("tracker"))
        {
            const json &t = j["tracker"];
            require_known_keys(t, {"process_noise_m2", "measurement_noise_m2",
                                   "initial_covariance_m2", "gate_m", "confirm_min_panels"},
                               "tracker.");
            cfg.tracker.process_noise_m2 =
                t.value("process_noise_m2", cfg.tracker.process_noise_m2);
            cfg.tracker.measurement_noise_m2 =
                t.value("measurement_noise_m2", cfg.tracker.measurement_noise_m2);
            cfg.tracker.initial_covariance_m2 =
                t.value("initial_covariance_m2", cfg.tracker.initial_covariance_m2);
            cfg.tracker.gate_m = t.value("gate_m", cfg.tracker.gate_m);
            cfg.tracker.confirm_min_panels =
                t.value("confirm_min_panels", cfg.tracker.confirm_min_panels);
        }
        if (j.contains("fit"))
        {
            require_known_keys(j["fit"], {"horizontal_distance"}, "fit.");
            cfg.fit.horizontal_distance =
                j["fit"].value("horizontal_distance", cfg.fit.horizontal_distance);
        }
        cfg.voxel_size_m = j.value("voxel_size_m", cfg.voxel_size_m);
        cfg.wall_margin_m = j.value("wall_margin_m", cfg.wall_margin_m);
        cfg.eps_delay_s = j.value("eps_delay_s", cfg.eps_delay_s);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.threads = j.value("threads", cfg.threads);
    }
    catch (const json::exception &e)
    {
        throw InvalidArgument(std::string("config schema: ") + e.what());
    }

    if (cfg.classifier.threshold_m <= 0)
        throw InvalidArgument("classifier.threshold_m must be positive");
    if (cfg.classifier.march.step_m <= 0 || cfg.classifier.march.capture_radius_m <= 0 ||
        cfg.classifier.march.min_support < 1)
        throw InvalidArgument("classifier march parameters must be positive");
    if (cfg.tracker.process_noise_m2 < 0 || cfg.tracker.measurement_noise_m2 <= 0 ||
        cfg.tracker.initial_covariance_m2 <= 0 || cfg.tracker.gate_m <= 0 ||
        cfg.tracker.confirm_min_panels < 2)
        throw InvalidArgument("tracker configuration out of range");
    if (cfg.voxel_size_m <= 0 || cfg.wall_margin_m <= 0 || cfg.eps_delay_s < 0)
        throw InvalidArgument("voxel_size_m / wall_margin_m / eps_delay_s out of range");
    return cfg;
}

std::string run_config_to_json(const RunConfig &cfg)
{
    json j;
    j["classifier"] = {
        {"threshold_m", cfg.classifier.threshold_m},
        {"march_step_m", cfg.classifier.march.step_m},
        {"capture_radius_m", cfg.classifier.march.capture_radius_m},
        {"min_support", cfg.classifier.march.min_support},
        {"infeasible_policy",
         cfg.classifier.infeasible_policy == ClassifierConfig::InfeasiblePolicy::multi
             ? "multi"
             : "indeterminate"},
        {"exclude_los", cfg.classifier.exclude_los},
        {"los_delay_tol_s", cfg.classifier.los_delay_tol_s},
        {"los_angle_tol_deg", cfg.classifier.los_angle_tol_rad * 180.0 / kPi},
    };
    j["tracker"] = {
        {"process_noise_m2", cfg.tracker.process_noise_m2},
        {"measurement_noise_m2", cfg.tracker.measurement_noise_m2},
        {"initial_covariance_m2", cfg.tracker.initial_covariance_m2},
        {"gate_m", cfg.tracker.gate_m},
        {"confirm_min_panels", cfg.tracker.confirm_min_panels},
    };
    j["fit"] = {{"horizontal_distance", cfg.fit.horizontal_distance}};
    j["voxel_size_m"] = cfg.voxel_size_m;
    j["wall_margin_m"] = cfg.wall_margin_m;
    j["eps_delay_s"] = cfg.eps_delay_s;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    return j.dump();
}

std::string config_hash(const RunConfig &cfg)
{
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(run_config_to_json(cfg))));
    return buf;
}

Report run_pipeline(const PointCloud *cloud, const GeometryConfig &geometry,
                    const std::vector<MpcRecord> &records, const RunConfig &cfg, unsigned stages)
{
    if ((stages & stage_all) == 0)
        throw InvalidArgument("run_pipeline: no stages requested");
    if (stages & stage_stats)
        stages |= stage_classify | stage_track; // statistics consume both
    if (geometry.panels.empty() || geometry.route.empty())
        throw InvalidArgument("run_pipeline: geometry must define panels and route");

    validate_dataset(geometry, records, cfg.eps_delay_s);

    Report report;
    report.stages = stages;
    report.geometry = geometry;
    report.config_json = run_config_to_json(cfg);
    report.config_digest = config_hash(cfg);
    report.seed = cfg.seed;
    report.timestamp_utc = utc_timestamp();
    for (const MpcRecord &r : records)
    {
        if (report.measured_aoa.count(r.key))
            throw InvalidArgument("duplicate MPC key (panel " + std::to_string(r.key.panel_id) +
                                  ", snapshot " + std::to_string(r.key.snapshot_id) + ", path " +
                                  std::to_string(r.key.path_id) + ")");
        report.measured_aoa[r.key] = r.aoa;
    }

    // Group records per (panel, snapshot) link, keys ascending.
    std::map<std::pair<int, int>, std::vector<MpcRecord>> links;
    for (const MpcRecord &r : records)
        links[{r.key.panel_id, r.key.snapshot_id}].push_back(r);

    // ---- classification ---------------------------------------------------
    std::vector<LinkClassification> classifications;
    if (stages & stage_classify)
    {
        if (cloud == nullptr)
            throw InvalidArgument("run_pipeline: classification requires a point cloud");

        PointCloud labeled;
        const PointCloud *effective = cloud;
        if (!cloud->has_labels())
        {
            labeled = label_regions_by_bbox(*cloud, cfg.wall_margin_m);
            effective = &labeled;
        }
        const SpatialIndex index(*effective, cfg.voxel_size_m);

        std::vector<const std::pair<const std::pair<int, int>, std::vector<MpcRecord>> *> items;
        items.reserve(links.size());
        for (const auto &kv : links)
            items.push_back(&kv);

        classifications.resize(items.size());
        parallel_for(items.size(), cfg.threads, [&](std::size_t i) {
            const auto &[link_key, mpcs] = *items[i];
            const PanelGeometry &panel = geometry.panel(link_key.first);
            const UeState &ue = geometry.snapshot(link_key.second);
            classifications[i] = classify_link(mpcs, panel, ue.position, index, cfg.classifier);
        });

        for (const LinkClassification &link : classifications)
        {
            StatPoint point;
            point.panel_id = link.panel_id;
            point.snapshot_id = link.snapshot_id;
            const Vec3 p = geometry.panel(link.panel_id).position;
            const Vec3 u = geometry.snapshot(link.snapshot_id).position;
            point.distance_m = cfg.fit.horizontal_distance
                                   ? std::hypot(p.x - u.x, p.y - u.y)
                                   : distance(p, u);
            point.eta_sb = link.eta_sb;
            point.counts = link.counts;
            report.stat_points.push_back(point);

            for (const BounceDecision &d : link.decisions)
            {
                DecisionRow row;
                row.decision = d;
                report.decisions.push_back(std::move(row));
            }
        }
    }
    else
    {
        for (const auto &[link_key, mpcs] : links)
            for (const MpcRecord &r : mpcs)
            {
                DecisionRow row;
                row.decision.key = r.key;
                report.decisions.push_back(std::move(row));
            }
    }
    std::sort(report.decisions.begin(), report.decisions.end(),
              [](const DecisionRow &a, const DecisionRow &b) {
                  return a.decision.key < b.decision.key;
              });
    {
        std::map<MpcKey, const MpcRecord *> record_of;
        for (const MpcRecord &r : records)
            record_of[r.key] = &r;
        for (DecisionRow &row : report.decisions)
        {
            const MpcRecord &r = *record_of.at(row.decision.key);
            row.measured_vs = compute_vs(r, geometry.panel(r.key.panel_id)).position;
        }
    }

    // ---- tracking -----------------------------------------------------------
    if (stages & stage_track)
    {
        std::map<int, std::map<int, std::vector<VsMeasurement>>> by_snapshot;
        std::map<int, std::vector<MpcKey>> los_keys;
        for (const auto &[link_key, mpcs] : links)
        {
            const PanelGeometry &panel = geometry.panel(link_key.first);
            const UeState &ue = geometry.snapshot(link_key.second);
            for (const MpcRecord &r : mpcs)
            {
                if (cfg.classifier.exclude_los &&
                    is_line_of_sight(r, panel, ue.position, cfg.classifier))
                {
                    los_keys[link_key.second].push_back(r.key);
                    continue;
                }
                by_snapshot[link_key.second][link_key.first].push_back(compute_vs(r, panel));
            }
        }

        std::vector<int> snapshot_ids;
        for (const UeState &u : geometry.route)
            if (by_snapshot.count(u.snapshot_id) || los_keys.count(u.snapshot_id))
                snapshot_ids.push_back(u.snapshot_id);

        report.snapshots.resize(snapshot_ids.size());
        parallel_for(snapshot_ids.size(), cfg.threads, [&](std::size_t i) {
            const int sid = snapshot_ids[i];
            static const std::map<int, std::vector<VsMeasurement>> empty;
            const auto it = by_snapshot.find(sid);
            report.snapshots[i] = track_snapshot(it != by_snapshot.end() ? it->second : empty,
                                                 sid, cfg.tracker);
        });
        for (SnapshotTracks &snap : report.snapshots)
        {
            const auto it = los_keys.find(snap.snapshot_id);
            if (it != los_keys.end())
                for (const MpcKey &key : it->second)
                    snap.mechanism[key] = Mechanism::los;
        }
        assign_vs_ids(report.snapshots, cfg.tracker);
        report.lifetimes = lifetime_stats(report.snapshots, cfg.tracker);

        // Merge mechanisms and confirmed-track membership into the decisions.
        std::map<MpcKey, Mechanism> mech;
        std::map<MpcKey, std::pair<int, int>> membership;
        for (const SnapshotTracks &snap : report.snapshots)
        {
            for (const auto &[key, m] : snap.mechanism)
                mech[key] = m;
            for (const TrackState &t : snap.tracks)
                if (track_confirmed(t, cfg.tracker))
                    for (const MpcKey &key : t.members)
                        membership[key] = {t.track_id, t.vs_id};
        }
        for (DecisionRow &row : report.decisions)
        {
            const auto mit = mech.find(row.decision.key);
            if (mit != mech.end())
                row.mechanism = mit->second;
            const auto tit = membership.find(row.decision.key);
            if (tit != membership.end())
            {
                row.track_id = tit->second.first;
                row.vs_id = tit->second.second;
            }
        }
    }

    // ---- statistics ---------------------------------------------------------
    if (stages & stage_stats)
    {
        for (const PanelGeometry &panel : geometry.panels)
        {
            PanelFits pf;
            pf.panel_id = panel.panel_id;
            std::vector<std::pair<double, double>> points;
            for (const StatPoint &sp : report.stat_points)
                if (sp.panel_id == panel.panel_id && sp.eta_sb)
                    points.emplace_back(sp.distance_m, *sp.eta_sb);
            try
            {
                pf.fits = compare_models(points);
                pf.ok = true;
            }
            catch (const Error &e)
            {
                pf.error = e.what();
            }
            report.fits.push_back(std::move(pf));
        }

        report.surfaces = surface_distribution(report.snapshots, classifications,
                                               geometry.route, cfg.tracker);
    }

    return report;
}

} // namespace dmimo
