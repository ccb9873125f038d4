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
// Report serialization. report.json carries everything; the per-figure CSVs
// hold exactly the axes of the corresponding plots:
//   fig4_eta_vs_dc.csv     panel_id,d_c_m,eta_sb
//   fig6_aoa_compare.csv   snapshot_id,track_id,vs_id,panel_id,
//                          measured_az_rad,estimated_az_rad
//   fig7_surface_dist.csv  snapshot_id,moved_distance_m,frac_<region>...
//   tab1_fits.csv          panel_id,model,a,b,r_squared,n_points,preferred

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dmimo/pipeline.hpp"

namespace dmimo
{

using nlohmann::json;

namespace
{

json vec3_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

std::ofstream open_out(const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw IoError("failed while writing '" + path.string() + "'");
}

const char *model_name(FitModel m) { return m == FitModel::linear ? "linear" : "exponential"; }

json fit_json(const FitResult &f)
{
    return {{"model", model_name(f.model)},
            {"a", f.a},
            {"b", f.b},
            {"r_squared", f.r_squared},
            {"n_points", f.n_points}};
}

} // namespace

std::string report_to_json(const Report &report)
{
    json j;
    j["schema_version"] = 1;
    j["metadata"] = {{"config", json::parse(report.config_json)},
                     {"config_hash", report.config_digest},
                     {"seed", report.seed},
                     {"generated_at_utc", report.timestamp_utc},
                     {"stages",
                      {{"classify", (report.stages & stage_classify) != 0},
                       {"track", (report.stages & stage_track) != 0},
                       {"stats", (report.stages & stage_stats) != 0}}}};

    j["decisions"] = json::array();
    for (const DecisionRow &row : report.decisions)
    {
        const BounceDecision &d = row.decision;
        json e = {{"panel_id", d.key.panel_id},
                  {"snapshot_id", d.key.snapshot_id},
                  {"path_id", d.key.path_id},
                  {"measured_vs", vec3_json(row.measured_vs)}};
        if (report.stages & stage_classify)
        {
            e["bounce"] = bounce_label_name(d.label);
            if (d.mismatch_m)
                e["mismatch_m"] = *d.mismatch_m;
            if (d.single_bounce)
                e["single_bounce_estimate"] = vec3_json(*d.single_bounce);
            if (d.last_hop)
            {
                e["last_hop"] = {{"point", vec3_json(d.last_hop->point)},
                                 {"distance_m", d.last_hop->distance_m},
                                 {"support", d.last_hop->support_count},
                                 {"region", region_name(d.last_hop->region)}};
            }
            if (d.infeasible_reason != InfeasibleReason::none)
                e["infeasible_reason"] = infeasible_reason_name(d.infeasible_reason);
        }
        if (report.stages & stage_track)
        {
            e["mechanism"] = mechanism_name(row.mechanism);
            if (row.track_id >= 0)
            {
                e["track_id"] = row.track_id;
                e["vs_id"] = row.vs_id;
            }
        }
        j["decisions"].push_back(std::move(e));
    }

    if (report.stages & stage_classify)
    {
        j["links"] = json::array();
        for (const StatPoint &p : report.stat_points)
        {
            json e = {{"panel_id", p.panel_id},
                      {"snapshot_id", p.snapshot_id},
                      {"d_c_m", p.distance_m},
                      {"counts",
                       {{"single", p.counts.single},
                        {"multi", p.counts.multi},
                        {"indeterminate", p.counts.indeterminate},
                        {"los", p.counts.los}}}};
            if (p.eta_sb)
                e["eta_sb"] = *p.eta_sb;
            j["links"].push_back(std::move(e));
        }
    }

    if (report.stages & stage_track)
    {
        j["tracks"] = json::array();
        for (const SnapshotTracks &snap : report.snapshots)
            for (const TrackState &t : snap.tracks)
            {
                json e = {{"snapshot_id", snap.snapshot_id},
                          {"track_id", t.track_id},
                          {"vs_id", t.vs_id},
                          {"position", vec3_json(t.position)},
                          {"covariance_trace_m2", t.covariance.trace()},
                          {"panels_visited", t.panels_visited},
                          {"lifetime", t.panels_visited.size()}};
                j["tracks"].push_back(std::move(e));
            }

        j["lifetimes"] = {{"histogram", json::object()},
                          {"births_at_panel", json::object()},
                          {"deaths_at_panel", json::object()}};
        for (const auto &[k, v] : report.lifetimes.lifetime_histogram)
            j["lifetimes"]["histogram"][std::to_string(k)] = v;
        for (const auto &[k, v] : report.lifetimes.births_at_panel)
            j["lifetimes"]["births_at_panel"][std::to_string(k)] = v;
        for (const auto &[k, v] : report.lifetimes.deaths_at_panel)
            j["lifetimes"]["deaths_at_panel"][std::to_string(k)] = v;
    }

    if (report.stages & stage_stats)
    {
        j["fits"] = json::array();
        for (const PanelFits &pf : report.fits)
        {
            json e = {{"panel_id", pf.panel_id}, {"ok", pf.ok}};
            if (pf.ok)
            {
                e["linear"] = fit_json(pf.fits.linear);
                e["exponential"] = fit_json(pf.fits.exponential);
                e["preferred"] = model_name(pf.fits.preferred);
            }
            else
                e["error"] = pf.error;
            j["fits"].push_back(std::move(e));
        }

        j["surface_distribution"] = json::array();
        for (const SurfaceDistribution &s : report.surfaces)
        {
            json e = {{"snapshot_id", s.snapshot_id},
                      {"moved_distance_m", s.moved_distance_m},
                      {"total_reflected", s.total_reflected}};
            json fr = json::object();
            for (const auto &[region, f] : s.fractions)
                fr[region_name(region)] = f;
            e["fractions"] = std::move(fr);
            j["surface_distribution"].push_back(std::move(e));
        }
    }

    return j.dump(2);
}

void write_report(const Report &report, const std::string &out_dir, unsigned outputs)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
    const fs::path dir(out_dir);

    char buf[64];
    auto num = [&buf](double v) -> const char * {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    };

    if (outputs & out_report_json)
    {
        auto out = open_out(dir / "report.json");
        out << report_to_json(report) << "\n";
        finish(out, dir / "report.json");
    }

    if ((outputs & out_fig4) && (report.stages & stage_classify))
    {
        auto out = open_out(dir / "fig4_eta_vs_dc.csv");
        out << "panel_id,d_c_m,eta_sb\n";
        for (const StatPoint &p : report.stat_points)
            if (p.eta_sb)
            {
                out << p.panel_id << ',' << num(p.distance_m);
                out << ',' << num(*p.eta_sb) << '\n';
            }
        finish(out, dir / "fig4_eta_vs_dc.csv");
    }

    if ((outputs & out_fig6) && (report.stages & stage_track))
    {
        auto out = open_out(dir / "fig6_aoa_compare.csv");
        out << "snapshot_id,track_id,vs_id,panel_id,measured_az_rad,estimated_az_rad\n";
        const TrackerConfig tracker = run_config_from_json(report.config_json).tracker;
        for (const SnapshotTracks &snap : report.snapshots)
            for (const TrackState &t : snap.tracks)
            {
                if (!track_confirmed(t, tracker))
                    continue;
                for (const MpcKey &key : t.members)
                {
                    const auto mit = report.measured_aoa.find(key);
                    if (mit == report.measured_aoa.end())
                        continue;
                    const PanelGeometry &panel = report.geometry.panel(key.panel_id);
                    const AoA est = aoa_from_points(panel.position, t.position);
                    out << snap.snapshot_id << ',' << t.track_id << ',' << t.vs_id << ','
                        << key.panel_id << ',' << num(mit->second.azimuth_rad);
                    out << ',' << num(est.azimuth_rad) << '\n';
                }
            }
        finish(out, dir / "fig6_aoa_compare.csv");
    }

    if ((outputs & out_fig7) && (report.stages & stage_stats))
    {
        auto out = open_out(dir / "fig7_surface_dist.csv");
        out << "snapshot_id,moved_distance_m";
        for (int r = 0; r <= 7; ++r)
        {
            std::string name = region_name(static_cast<Region>(r));
            for (char &c : name)
                if (c == '-')
                    c = '_';
            out << ",frac_" << name;
        }
        out << "\n";
        for (const SurfaceDistribution &s : report.surfaces)
        {
            if (s.total_reflected == 0)
                continue; // flagged in report.json; no row without data
            out << s.snapshot_id << ',' << num(s.moved_distance_m);
            for (int r = 0; r <= 7; ++r)
            {
                const auto it = s.fractions.find(static_cast<Region>(r));
                out << ',' << num(it != s.fractions.end() ? it->second : 0.0);
            }
            out << '\n';
        }
        finish(out, dir / "fig7_surface_dist.csv");
    }

    if ((outputs & out_tab1) && (report.stages & stage_stats))
    {
        auto out = open_out(dir / "tab1_fits.csv");
        out << "panel_id,model,a,b,r_squared,n_points,preferred\n";
        for (const PanelFits &pf : report.fits)
        {
            if (!pf.ok)
                continue;
            for (const FitResult *f : {&pf.fits.linear, &pf.fits.exponential})
            {
                out << pf.panel_id << ',' << model_name(f->model) << ',' << num(f->a);
                out << ',' << num(f->b);
                out << ',' << num(f->r_squared);
                out << ',' << f->n_points << ','
                    << (pf.fits.preferred == f->model ? 1 : 0) << '\n';
            }
        }
        finish(out, dir / "tab1_fits.csv");
    }

    if ((outputs & out_decisions) && (report.stages & stage_classify))
    {
        auto out = open_out(dir / "decisions.csv");
        out << "panel_id,snapshot_id,path_id,label,mismatch_m,vs_x,vs_y,vs_z,"
               "s_hat_x,s_hat_y,s_hat_z,"
               "s_lh_x,s_lh_y,s_lh_z,lh_region,lh_distance_m,lh_support,infeasible_reason,"
               "mechanism,track_id,vs_id\n";
        for (const DecisionRow &row : report.decisions)
        {
            const BounceDecision &d = row.decision;
            out << d.key.panel_id << ',' << d.key.snapshot_id << ',' << d.key.path_id << ','
                << bounce_label_name(d.label) << ',';
            if (d.mismatch_m)
                out << num(*d.mismatch_m);
            out << ',' << num(row.measured_vs.x);
            out << ',' << num(row.measured_vs.y);
            out << ',' << num(row.measured_vs.z);
            for (int i = 0; i < 3; ++i)
            {
                out << ',';
                if (d.single_bounce)
                    out << num(i == 0 ? d.single_bounce->x
                                      : i == 1 ? d.single_bounce->y : d.single_bounce->z);
            }
            for (int i = 0; i < 3; ++i)
            {
                out << ',';
                if (d.last_hop)
                    out << num(i == 0 ? d.last_hop->point.x
                                      : i == 1 ? d.last_hop->point.y : d.last_hop->point.z);
            }
            out << ',' << (d.last_hop ? region_name(d.last_hop->region) : "") << ',';
            if (d.last_hop)
                out << num(d.last_hop->distance_m);
            out << ',';
            if (d.last_hop)
                out << d.last_hop->support_count;
            out << ',' << infeasible_reason_name(d.infeasible_reason) << ','
                << ((report.stages & stage_track) ? mechanism_name(row.mechanism) : "") << ','
                << row.track_id << ',' << row.vs_id << '\n';
        }
        finish(out, dir / "decisions.csv");
    }

    if ((outputs & out_tracks) && (report.stages & stage_track))
    {
        auto out = open_out(dir / "tracks.csv");
        out << "snapshot_id,track_id,vs_id,confirmed,s_x,s_y,s_z,cov_trace_m2,lifetime,"
               "panels_visited\n";
        const TrackerConfig tracker = run_config_from_json(report.config_json).tracker;
        for (const SnapshotTracks &snap : report.snapshots)
            for (const TrackState &t : snap.tracks)
            {
                out << snap.snapshot_id << ',' << t.track_id << ',' << t.vs_id << ','
                    << (track_confirmed(t, tracker) ? 1 : 0) << ',' << num(t.position.x);
                out << ',' << num(t.position.y);
                out << ',' << num(t.position.z);
                out << ',' << num(t.covariance.trace());
                out << ',' << t.panels_visited.size() << ',';
                for (std::size_t i = 0; i < t.panels_visited.size(); ++i)
                    out << (i ? ";" : "") << t.panels_visited[i];
                out << '\n';
            }
        finish(out, dir / "tracks.csv");
    }

    if ((outputs & out_lifetimes) && (report.stages & stage_track))
    {
        auto out = open_out(dir / "lifetimes.csv");
        out << "snapshot_id,track_id,vs_id,lifetime,panels_visited\n";
        for (const LifetimeRecord &rec : report.lifetimes.records)
        {
            out << rec.snapshot_id << ',' << rec.track_id << ',' << rec.vs_id << ','
                << rec.lifetime << ',';
            for (std::size_t i = 0; i < rec.panels_visited.size(); ++i)
                out << (i ? ";" : "") << rec.panels_visited[i];
            out << '\n';
        }
        finish(out, dir / "lifetimes.csv");
    }
}

} // namespace dmimo
