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

#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "dmimo/io.hpp"

namespace dmimo
{

using nlohmann::json;

namespace
{

Vec3 vec3_from_json(const json &j, const std::string &what)
{
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw InvalidArgument(what + " must be an array of 3 numbers");
    Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!v.finite())
        throw InvalidArgument(what + " must be finite");
    return v;
}

json vec3_to_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

} // namespace

const PanelGeometry &GeometryConfig::panel(int panel_id) const
{
    for (const PanelGeometry &p : panels)
        if (p.panel_id == panel_id)
            return p;
    throw InvalidArgument("unknown panel_id " + std::to_string(panel_id));
}

const UeState &GeometryConfig::snapshot(int snapshot_id) const
{
    for (const UeState &u : route)
        if (u.snapshot_id == snapshot_id)
            return u;
    throw InvalidArgument("unknown snapshot_id " + std::to_string(snapshot_id));
}

GeometryConfig load_geometry(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open geometry file '" + path + "'");

    json j;
    try
    {
        in >> j;
    }
    catch (const json::exception &e)
    {
        throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
    }

    GeometryConfig geo;
    try
    {
        if (!j.contains("panels") || !j["panels"].is_array() || j["panels"].empty())
            throw InvalidArgument("geometry requires a non-empty 'panels' array");
        if (!j.contains("route") || !j["route"].is_array() || j["route"].empty())
            throw InvalidArgument("geometry requires a non-empty 'route' array");

        std::set<int> panel_ids;
        for (const json &p : j["panels"])
        {
            PanelGeometry panel;
            panel.panel_id = p.at("id").get<int>();
            panel.position = vec3_from_json(p.at("position"), "panel position");
            if (p.contains("boresight"))
                panel.boresight = vec3_from_json(p["boresight"], "panel boresight");
            if (!panel_ids.insert(panel.panel_id).second)
                throw InvalidArgument("duplicate panel id " + std::to_string(panel.panel_id));
            geo.panels.push_back(panel);
        }

        double prev_moved = -1.0;
        int prev_snapshot = std::numeric_limits<int>::min();
        for (const json &u : j["route"])
        {
            UeState ue;
            ue.snapshot_id = u.at("snapshot_id").get<int>();
            ue.position = vec3_from_json(u.at("position"), "UE position");
            ue.moved_distance_m = u.value("moved_distance_m", 0.0);
            if (ue.snapshot_id <= prev_snapshot)
                throw InvalidArgument("route snapshot_ids must be strictly increasing");
            if (ue.moved_distance_m < prev_moved)
                throw InvalidArgument("moved_distance_m must be non-decreasing");
            prev_snapshot = ue.snapshot_id;
            prev_moved = ue.moved_distance_m;
            geo.route.push_back(ue);
        }
    }
    catch (const json::exception &e)
    {
        throw ParseError(path, 0, std::string("geometry schema: ") + e.what());
    }
    return geo;
}

void save_geometry(const GeometryConfig &geometry, const std::string &path)
{
    json j;
    j["schema_version"] = 1;
    j["panels"] = json::array();
    for (const PanelGeometry &p : geometry.panels)
        j["panels"].push_back({{"id", p.panel_id},
                               {"position", vec3_to_json(p.position)},
                               {"boresight", vec3_to_json(p.boresight)}});
    j["route"] = json::array();
    for (const UeState &u : geometry.route)
        j["route"].push_back({{"snapshot_id", u.snapshot_id},
                              {"position", vec3_to_json(u.position)},
                              {"moved_distance_m", u.moved_distance_m}});

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("failed while writing '" + path + "'");
}

void validate_dataset(const GeometryConfig &geometry, const std::vector<MpcRecord> &records,
                      double eps_delay_s)
{
    if (records.empty())
        throw InvalidArgument("no records");

    for (const MpcRecord &r : records)
    {
        const auto where = [&] {
            return r.source_row > 0 ? " (row " + std::to_string(r.source_row) + ")" : "";
        };
        const PanelGeometry *panel = nullptr;
        const UeState *ue = nullptr;
        try
        {
            panel = &geometry.panel(r.key.panel_id);
            ue = &geometry.snapshot(r.key.snapshot_id);
        }
        catch (const InvalidArgument &e)
        {
            throw InvalidArgument(std::string(e.what()) + where());
        }
        const double los = distance(panel->position, ue->position);
        if (path_length_m(r) < los - eps_delay_s * kSpeedOfLight)
            throw InvalidArgument(
                "path length " + std::to_string(path_length_m(r)) + " m undershoots the " +
                std::to_string(los) + " m line-of-sight distance of link panel " +
                std::to_string(r.key.panel_id) + " / snapshot " +
                std::to_string(r.key.snapshot_id) + where());
    }
}

} // namespace dmimo
