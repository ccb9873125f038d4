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

#include "dmimo/synthesizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dmimo/io.hpp"
#include "dmimo/rng.hpp"

namespace dmimo
{

using nlohmann::json;

namespace
{

constexpr double kGeomEps = 1e-9;

// Substream salts so path noise, clutter placement and clutter jitter never
// share draws.
constexpr std::uint64_t kSaltPathNoise = 0x70617468;
constexpr std::uint64_t kSaltClutterPos = 0x636c7573;
constexpr std::uint64_t kSaltClutterJit = 0x636c756a;

double component(const Vec3 &v, int axis)
{
    return axis == 0 ? v.x : axis == 1 ? v.y : v.z;
}

void uv_of(const Vec3 &p, int axis, double &u, double &v)
{
    switch (axis)
    {
    case 0: u = p.y; v = p.z; break;
    case 1: u = p.x; v = p.z; break;
    default: u = p.x; v = p.y; break;
    }
}

Vec3 from_uv(int axis, double offset, double u, double v)
{
    switch (axis)
    {
    case 0: return {offset, u, v};
    case 1: return {u, offset, v};
    default: return {u, v, offset};
    }
}

// Mirror across an axis-aligned plane without trig.
Vec3 mirror_axis(const Vec3 &p, int axis, double offset)
{
    Vec3 out = p;
    switch (axis)
    {
    case 0: out.x = 2.0 * offset - p.x; break;
    case 1: out.y = 2.0 * offset - p.y; break;
    default: out.z = 2.0 * offset - p.z; break;
    }
    return out;
}

bool segment_hits_box(const Vec3 &a, const Vec3 &b, const BoxObstacle &box)
{
    // Slab test on the parametrized segment a + t (b - a), t in [0, 1].
    double t0 = 0.0, t1 = 1.0;
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};
    const double pa[3] = {a.x, a.y, a.z};
    const double pb[3] = {b.x, b.y, b.z};
    for (int k = 0; k < 3; ++k)
    {
        const double d = pb[k] - pa[k];
        if (std::abs(d) < kGeomEps)
        {
            if (pa[k] < lo[k] || pa[k] > hi[k])
                return false;
            continue;
        }
        double ta = (lo[k] - pa[k]) / d;
        double tb = (hi[k] - pa[k]) / d;
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1)
            return false;
    }
    return t1 - t0 > kGeomEps; // grazing contact does not count
}

bool path_occluded(const std::vector<Vec3> &polyline, const Scenario &scenario)
{
    if (!scenario.occlusion_check || scenario.boxes.empty())
        return false;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
        for (const BoxObstacle &box : scenario.boxes)
            if (segment_hits_box(polyline[i], polyline[i + 1], box))
                return true;
    return false;
}

void apply_noise(MpcRecord &rec, double los_m, const NoiseParams &noise, RngStream &rng)
{
    const double d_az = rng.normal(0.0, noise.sigma_angle_rad);
    const double d_zen = rng.normal(0.0, noise.sigma_angle_rad);
    const double d_delay = rng.normal(0.0, noise.sigma_delay_s);

    double az = rec.aoa.azimuth_rad + d_az;
    while (az > kPi)
        az -= 2.0 * kPi;
    while (az <= -kPi)
        az += 2.0 * kPi;
    rec.aoa.azimuth_rad = az;
    rec.aoa.zenith_rad = std::clamp(rec.aoa.zenith_rad + d_zen, 0.0, kPi);

    // Keep the record ingestible: a path may not undershoot the LOS length.
    const double floor_s = std::max(1e-12, los_m / kSpeedOfLight - 0.9e-9);
    rec.delay_s = std::max(rec.delay_s + d_delay, floor_s);
}

} // namespace

Plane ReflectorSurface::plane() const
{
    Vec3 n{0, 0, 0};
    (axis == 0 ? n.x : axis == 1 ? n.y : n.z) = 1.0;
    return Plane{n, offset};
}

bool ReflectorSurface::contains(const Vec3 &p, double tol) const
{
    if (std::abs(component(p, axis) - offset) > tol)
        return false;
    double u = 0, v = 0;
    uv_of(p, axis, u, v);
    return u >= u_min - tol && u <= u_max + tol && v >= v_min - tol && v <= v_max + tol;
}

std::vector<PanelGeometry> panel_row(int count, double spacing_m, const Vec3 &center)
{
    if (count < 1 || spacing_m <= 0)
        throw InvalidArgument("panel_row: count and spacing must be positive");
    std::vector<PanelGeometry> panels;
    panels.reserve(static_cast<std::size_t>(count));
    const double x0 = center.x - 0.5 * spacing_m * (count - 1);
    for (int k = 0; k < count; ++k)
    {
        PanelGeometry p;
        p.panel_id = k + 1;
        p.position = {x0 + spacing_m * k, center.y, center.z};
        p.boresight = {0, 1, 0};
        panels.push_back(p);
    }
    return panels;
}

std::vector<UeState> route_from_waypoints(const std::vector<Vec3> &waypoints, int count)
{
    if (waypoints.size() < 2 || count < 1)
        throw InvalidArgument("route_from_waypoints: need >=2 waypoints and >=1 snapshot");

    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < waypoints.size(); ++i)
    {
        const double seg = distance(waypoints[i - 1], waypoints[i]);
        if (seg <= kGeomEps)
            throw InvalidArgument("route_from_waypoints: zero-length segment");
        cum.push_back(cum.back() + seg);
    }
    const double total = cum.back();

    std::vector<UeState> route;
    route.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
    {
        const double s = count == 1 ? 0.0 : total * i / (count - 1);
        std::size_t seg = 1;
        while (seg + 1 < cum.size() && cum[seg] < s)
            ++seg;
        const double t = (s - cum[seg - 1]) / (cum[seg] - cum[seg - 1]);
        UeState ue;
        ue.snapshot_id = i + 1;
        ue.position = waypoints[seg - 1] + t * (waypoints[seg] - waypoints[seg - 1]);
        ue.moved_distance_m = s;
        route.push_back(ue);
    }
    return route;
}

Scenario default_scenario()
{
    Scenario s;
    s.room_size = {10.0, 8.0, 3.0};
    s.panels = panel_row(8, 0.6, {5.0, 0.5, 1.5});
    s.route = route_from_waypoints({{8.8, 7.0, 1.0}, {1.2, 7.0, 1.0}, {1.2, 2.6, 1.0}}, 50);
    s.max_reflection_order = 2;
    s.cloud_pitch_m = 0.02;
    // Estimation-error scale of a 400 MHz sounder chain.
    s.noise.sigma_angle_rad = kPi / 180.0;
    s.noise.sigma_delay_s = 1e-9;
    s.seed = 1;
    return s;
}

std::vector<ReflectorSurface> room_surfaces(const Scenario &sc)
{
    const double lx = sc.room_size.x, ly = sc.room_size.y, lz = sc.room_size.z;
    if (!(lx > 0 && ly > 0 && lz > 0))
        throw InvalidArgument("room dimensions must be positive");
    return {
        {"floor",      2, 0.0, 0.0, lx, 0.0, ly, Region::floor},
        {"ceiling",    2, lz,  0.0, lx, 0.0, ly, Region::ceiling},
        {"wall-west",  0, 0.0, 0.0, ly, 0.0, lz, Region::wall_west},
        {"wall-east",  0, lx,  0.0, ly, 0.0, lz, Region::wall_east},
        {"wall-south", 1, 0.0, 0.0, lx, 0.0, lz, Region::wall_south},
        {"wall-north", 1, ly,  0.0, lx, 0.0, lz, Region::wall_north},
    };
}

namespace
{

struct PathCandidate
{
    bool valid = false;
    double length = 0.0;
    Vec3 direction; // from the panel
    Vec3 image;
    std::vector<Vec3> specular_points; // UE side first
};

PathCandidate first_order_path(const Vec3 &panel, const Vec3 &ue, const ReflectorSurface &s)
{
    PathCandidate c;
    const Vec3 image = mirror_axis(ue, s.axis, s.offset);
    const double len = distance(panel, image);
    if (len <= kGeomEps)
        return c;
    const Vec3 e = (image - panel) / len;

    const double ea = component(e, s.axis);
    if (std::abs(ea) < kGeomEps)
        return c; // ray parallel to the plane
    const double t = (s.offset - component(panel, s.axis)) / ea;
    if (t <= kGeomEps || t >= len - kGeomEps)
        return c;
    const Vec3 q = panel + t * e;
    if (!s.contains(q))
        return c;

    c.valid = true;
    c.length = len;
    c.direction = e;
    c.image = image;
    c.specular_points = {q};
    return c;
}

PathCandidate second_order_path(const Vec3 &panel, const Vec3 &ue, const ReflectorSurface &first,
                                const ReflectorSurface &last)
{
    PathCandidate c;
    const Vec3 image1 = mirror_axis(ue, first.axis, first.offset);
    const Vec3 image2 = mirror_axis(image1, last.axis, last.offset);
    const double len = distance(panel, image2);
    if (len <= kGeomEps)
        return c;
    const Vec3 e = (image2 - panel) / len;

    // Last-hop specular point: panel-side crossing with the last plane.
    const double ea = component(e, last.axis);
    if (std::abs(ea) < kGeomEps)
        return c;
    const double t_last = (last.offset - component(panel, last.axis)) / ea;
    if (t_last <= kGeomEps || t_last >= len - kGeomEps)
        return c;
    const Vec3 q_last = panel + t_last * e;
    if (!last.contains(q_last))
        return c;

    // First-hop specular point: crossing of q_last -> image1 with the first
    // plane, interior to the segment.
    const Vec3 d2 = image1 - q_last;
    const double denom = component(d2, first.axis);
    if (std::abs(denom) < kGeomEps)
        return c;
    const double tau = (first.offset - component(q_last, first.axis)) / denom;
    if (tau <= kGeomEps || tau >= 1.0 - kGeomEps)
        return c;
    const Vec3 q_first = q_last + tau * d2;
    if (!first.contains(q_first))
        return c;

    if (distance(ue, q_first) <= kGeomEps || distance(q_first, q_last) <= kGeomEps)
        return c;

    c.valid = true;
    c.length = len;
    c.direction = e;
    c.image = image2;
    c.specular_points = {q_first, q_last};
    return c;
}

} // namespace

std::vector<GroundTruthMpc> generate_paths(const Scenario &scenario, int snapshot_id,
                                           int panel_id)
{
    if (scenario.max_reflection_order < 0 || scenario.max_reflection_order > 2)
        throw InvalidArgument("max_reflection_order must be 0, 1 or 2");

    const GeometryConfig geo{scenario.panels, scenario.route};
    const Vec3 panel = geo.panel(panel_id).position;
    const Vec3 ue = geo.snapshot(snapshot_id).position;
    const double los = distance(panel, ue);

    std::vector<ReflectorSurface> surfaces = room_surfaces(scenario);
    surfaces.insert(surfaces.end(), scenario.patches.begin(), scenario.patches.end());

    RngStream rng = RngStream::derived(scenario.seed, static_cast<std::uint64_t>(snapshot_id),
                                       static_cast<std::uint64_t>(panel_id), kSaltPathNoise);

    std::vector<GroundTruthMpc> out;
    int next_path_id = 1;

    auto emit = [&](const PathCandidate &c, int order, PathMechanism mech,
                    std::vector<std::string> chain) {
        GroundTruthMpc gt;
        gt.record.key = {panel_id, snapshot_id, next_path_id++};
        gt.record.aoa = aoa_from_direction(c.direction);
        gt.record.delay_s = c.length / kSpeedOfLight;
        gt.bounce_order = order;
        gt.mechanism = mech;
        gt.surface_chain = std::move(chain);
        gt.true_vs = c.image;
        gt.specular_points = c.specular_points;
        apply_noise(gt.record, los, scenario.noise, rng);
        out.push_back(std::move(gt));
    };

    // LOS
    {
        PathCandidate c;
        c.length = los;
        c.direction = (ue - panel) / los;
        c.image = ue;
        if (!path_occluded({panel, ue}, scenario))
            emit(c, 0, PathMechanism::los, {});
        else
            rng.normal(), rng.normal(), rng.normal(); // keep the stream aligned
    }

    if (scenario.max_reflection_order >= 1)
        for (const ReflectorSurface &s : surfaces)
        {
            const PathCandidate c = first_order_path(panel, ue, s);
            if (!c.valid)
                continue;
            if (path_occluded({panel, c.specular_points[0], ue}, scenario))
                continue;
            emit(c, 1, PathMechanism::reflection, {s.name});
        }

    if (scenario.max_reflection_order >= 2)
        for (const ReflectorSurface &first : surfaces)
            for (const ReflectorSurface &last : surfaces)
            {
                if (&first == &last)
                    continue;
                const PathCandidate c = second_order_path(panel, ue, first, last);
                if (!c.valid)
                    continue;
                if (path_occluded({panel, c.specular_points[1], c.specular_points[0], ue},
                                  scenario))
                    continue;
                emit(c, 2, PathMechanism::reflection, {first.name, last.name});
            }

    return out;
}

std::vector<GroundTruthMpc> add_scatter_clutter(std::vector<GroundTruthMpc> paths,
                                                const Scenario &scenario, int snapshot_id,
                                                int panel_id)
{
    if (scenario.clutter.per_snapshot <= 0)
        return paths;

    const GeometryConfig geo{scenario.panels, scenario.route};
    const Vec3 panel = geo.panel(panel_id).position;
    const Vec3 ue = geo.snapshot(snapshot_id).position;
    const double los = distance(panel, ue);

    // Nominal scatterers are a per-snapshot property shared by all panels.
    RngStream pos_rng = RngStream::derived(scenario.seed, static_cast<std::uint64_t>(snapshot_id),
                                           0, kSaltClutterPos);
    std::vector<Vec3> nominal;
    nominal.reserve(static_cast<std::size_t>(scenario.clutter.per_snapshot));
    const double margin = 0.3;
    for (int i = 0; i < scenario.clutter.per_snapshot; ++i)
        nominal.push_back({pos_rng.uniform(margin, scenario.room_size.x - margin),
                           pos_rng.uniform(margin, scenario.room_size.y - margin),
                           pos_rng.uniform(margin, scenario.room_size.z - margin)});

    RngStream jit_rng = RngStream::derived(scenario.seed, static_cast<std::uint64_t>(snapshot_id),
                                           static_cast<std::uint64_t>(panel_id), kSaltClutterJit);

    int next_path_id = paths.empty() ? 1 : paths.back().record.key.path_id + 1;
    for (const Vec3 &s : nominal)
    {
        const double true_len = distance(panel, s) + distance(s, ue);
        AoA aoa = aoa_from_points(panel, s);

        double az = aoa.azimuth_rad + jit_rng.normal(0.0, scenario.clutter.angle_jitter_rad);
        while (az > kPi)
            az -= 2.0 * kPi;
        while (az <= -kPi)
            az += 2.0 * kPi;
        aoa.azimuth_rad = az;
        aoa.zenith_rad = std::clamp(
            aoa.zenith_rad + jit_rng.normal(0.0, scenario.clutter.angle_jitter_rad), 0.0, kPi);

        const double floor_s = std::max(1e-12, los / kSpeedOfLight - 0.9e-9);
        const double delay = std::max(
            true_len / kSpeedOfLight + jit_rng.normal(0.0, scenario.clutter.delay_jitter_s),
            floor_s);

        GroundTruthMpc gt;
        gt.record.key = {panel_id, snapshot_id, next_path_id++};
        gt.record.aoa = aoa;
        gt.record.delay_s = delay;
        gt.bounce_order = 1;
        gt.mechanism = PathMechanism::scattering;
        gt.surface_chain = {"clutter"};
        gt.true_vs = panel + delay * kSpeedOfLight * direction_vector(aoa);
        gt.specular_points = {s};
        paths.push_back(std::move(gt));
    }
    return paths;
}

std::vector<GroundTruthMpc> generate_all(const Scenario &scenario)
{
    std::vector<GroundTruthMpc> all;
    for (const PanelGeometry &panel : scenario.panels)
        for (const UeState &ue : scenario.route)
        {
            auto link = add_scatter_clutter(
                generate_paths(scenario, ue.snapshot_id, panel.panel_id), scenario,
                ue.snapshot_id, panel.panel_id);
            all.insert(all.end(), std::make_move_iterator(link.begin()),
                       std::make_move_iterator(link.end()));
        }
    return all;
}

PointCloud export_cloud(const Scenario &scenario, double pitch_m)
{
    if (!(pitch_m > 0.0))
        throw InvalidArgument("export_cloud: pitch must be positive");

    PointCloud cloud;
    auto sample_surface = [&](const ReflectorSurface &s) {
        const long nu = static_cast<long>(std::floor((s.u_max - s.u_min) / pitch_m + 1e-9)) + 1;
        const long nv = static_cast<long>(std::floor((s.v_max - s.v_min) / pitch_m + 1e-9)) + 1;
        for (long i = 0; i < nu; ++i)
            for (long j = 0; j < nv; ++j)
            {
                cloud.points.push_back(
                    from_uv(s.axis, s.offset, s.u_min + pitch_m * i, s.v_min + pitch_m * j));
                cloud.labels.push_back(s.region);
            }
    };

    for (const ReflectorSurface &s : room_surfaces(scenario))
        sample_surface(s);
    for (const ReflectorSurface &s : scenario.patches)
        sample_surface(s);
    for (const BoxObstacle &box : scenario.boxes)
    {
        const ReflectorSurface faces[6] = {
            {"box", 0, box.min.x, box.min.y, box.max.y, box.min.z, box.max.z, Region::object},
            {"box", 0, box.max.x, box.min.y, box.max.y, box.min.z, box.max.z, Region::object},
            {"box", 1, box.min.y, box.min.x, box.max.x, box.min.z, box.max.z, Region::object},
            {"box", 1, box.max.y, box.min.x, box.max.x, box.min.z, box.max.z, Region::object},
            {"box", 2, box.min.z, box.min.x, box.max.x, box.min.y, box.max.y, Region::object},
            {"box", 2, box.max.z, box.min.x, box.max.x, box.min.y, box.max.y, Region::object},
        };
        for (const ReflectorSurface &f : faces)
            sample_surface(f);
    }
    return cloud;
}

// ------------------------------------------------------------------------
// Scenario JSON
// ------------------------------------------------------------------------

namespace
{

int axis_from_json(const json &j)
{
    if (j.is_number_integer())
    {
        const int a = j.get<int>();
        if (a >= 0 && a <= 2)
            return a;
    }
    if (j.is_string())
    {
        const std::string s = j.get<std::string>();
        if (s == "x") return 0;
        if (s == "y") return 1;
        if (s == "z") return 2;
    }
    throw InvalidArgument("surface axis must be \"x\", \"y\" or \"z\"");
}

ReflectorSurface surface_from_json(const json &j)
{
    ReflectorSurface s;
    s.name = j.at("name").get<std::string>();
    s.axis = axis_from_json(j.at("axis"));
    s.offset = j.at("offset").get<double>();
    s.u_min = j.at("u_min").get<double>();
    s.u_max = j.at("u_max").get<double>();
    s.v_min = j.at("v_min").get<double>();
    s.v_max = j.at("v_max").get<double>();
    s.region = Region::object;
    if (j.contains("region"))
    {
        const auto r = region_from_name(j["region"].get<std::string>());
        if (!r)
            throw InvalidArgument("unknown region name '" + j["region"].get<std::string>() + "'");
        s.region = *r;
    }
    if (s.u_max <= s.u_min || s.v_max <= s.v_min)
        throw InvalidArgument("surface extents must be non-empty");
    return s;
}

} // namespace

Scenario load_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open scenario file '" + path + "'");
    json j;
    try
    {
        in >> j;
    }
    catch (const json::exception &e)
    {
        throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
    }

    Scenario sc = default_scenario();
    try
    {
        if (j.contains("room"))
        {
            const json &r = j["room"].contains("size_m") ? j["room"]["size_m"] : j["room"];
            sc.room_size = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
        }
        if (j.contains("panels"))
        {
            const json &p = j["panels"];
            if (p.is_array())
            {
                sc.panels.clear();
                for (const json &e : p)
                {
                    PanelGeometry panel;
                    panel.panel_id = e.at("id").get<int>();
                    panel.position = {e.at("position").at(0).get<double>(),
                                      e.at("position").at(1).get<double>(),
                                      e.at("position").at(2).get<double>()};
                    sc.panels.push_back(panel);
                }
            }
            else
            {
                const Vec3 center{p.value("center_x", 5.0), p.value("wall_offset_m", 0.5),
                                  p.value("height_m", 1.5)};
                sc.panels = panel_row(p.value("count", 8), p.value("spacing_m", 0.6), center);
            }
        }
        if (j.contains("route"))
        {
            const json &r = j["route"];
            if (r.contains("waypoints"))
            {
                std::vector<Vec3> wp;
                for (const json &w : r["waypoints"])
                    wp.push_back({w.at(0).get<double>(), w.at(1).get<double>(),
                                  w.at(2).get<double>()});
                sc.route = route_from_waypoints(wp, r.value("snapshots", 50));
            }
            else if (r.contains("snapshots") && r["snapshots"].is_array())
            {
                // Fully explicit form; moved distances preserved verbatim.
                sc.route.clear();
                for (const json &u : r["snapshots"])
                    sc.route.push_back({u.at("snapshot_id").get<int>(),
                                        {u.at("position").at(0).get<double>(),
                                         u.at("position").at(1).get<double>(),
                                         u.at("position").at(2).get<double>()},
                                        u.at("moved_distance_m").get<double>()});
            }
            else if (r.contains("positions"))
            {
                // Bare positions; moved distance accumulates along the chords.
                sc.route.clear();
                double moved = 0.0;
                Vec3 prev;
                int id = 1;
                for (const json &w : r["positions"])
                {
                    const Vec3 p{w.at(0).get<double>(), w.at(1).get<double>(),
                                 w.at(2).get<double>()};
                    if (id > 1)
                        moved += distance(prev, p);
                    sc.route.push_back({id++, p, moved});
                    prev = p;
                }
            }
        }
        sc.max_reflection_order = j.value("max_reflection_order", sc.max_reflection_order);
        sc.cloud_pitch_m = j.value("cloud_pitch_m", sc.cloud_pitch_m);
        if (j.contains("noise"))
        {
            sc.noise.sigma_angle_rad = j["noise"].value("sigma_angle_rad", 0.0);
            sc.noise.sigma_delay_s = j["noise"].value("sigma_delay_s", 0.0);
        }
        if (j.contains("clutter"))
        {
            sc.clutter.per_snapshot = j["clutter"].value("per_snapshot", 0);
            sc.clutter.angle_jitter_rad =
                j["clutter"].value("angle_jitter_rad", sc.clutter.angle_jitter_rad);
            sc.clutter.delay_jitter_s =
                j["clutter"].value("delay_jitter_s", sc.clutter.delay_jitter_s);
        }
        if (j.contains("patches"))
            for (const json &p : j["patches"])
                sc.patches.push_back(surface_from_json(p));
        if (j.contains("boxes"))
            for (const json &b : j["boxes"])
                sc.boxes.push_back({{b.at("min").at(0).get<double>(),
                                     b.at("min").at(1).get<double>(),
                                     b.at("min").at(2).get<double>()},
                                    {b.at("max").at(0).get<double>(),
                                     b.at("max").at(1).get<double>(),
                                     b.at("max").at(2).get<double>()}});
        sc.occlusion_check = j.value("occlusion_check", false);
        sc.seed = j.value("seed", sc.seed);
    }
    catch (const json::exception &e)
    {
        throw ParseError(path, 0, std::string("scenario schema: ") + e.what());
    }

    // Panels and UE must sit strictly inside the room.
    auto inside = [&](const Vec3 &p) {
        return p.x > 0 && p.x < sc.room_size.x && p.y > 0 && p.y < sc.room_size.y && p.z > 0 &&
               p.z < sc.room_size.z;
    };
    for (const PanelGeometry &p : sc.panels)
        if (!inside(p.position))
            throw InvalidArgument("panel " + std::to_string(p.panel_id) + " lies outside the room");
    for (const UeState &u : sc.route)
        if (!inside(u.position))
            throw InvalidArgument("route snapshot " + std::to_string(u.snapshot_id) +
                                  " lies outside the room");
    return sc;
}

void save_scenario(const Scenario &sc, const std::string &path)
{
    json j;
    j["schema_version"] = 1;
    j["room"] = {{"size_m", {sc.room_size.x, sc.room_size.y, sc.room_size.z}}};
    j["panels"] = json::array();
    for (const PanelGeometry &p : sc.panels)
        j["panels"].push_back(
            {{"id", p.panel_id}, {"position", {p.position.x, p.position.y, p.position.z}}});
    j["route"] = json::object();
    j["route"]["snapshots"] = json::array();
    for (const UeState &u : sc.route)
        j["route"]["snapshots"].push_back(
            {{"snapshot_id", u.snapshot_id},
             {"position", {u.position.x, u.position.y, u.position.z}},
             {"moved_distance_m", u.moved_distance_m}});
    j["max_reflection_order"] = sc.max_reflection_order;
    j["cloud_pitch_m"] = sc.cloud_pitch_m;
    j["noise"] = {{"sigma_angle_rad", sc.noise.sigma_angle_rad},
                  {"sigma_delay_s", sc.noise.sigma_delay_s}};
    j["clutter"] = {{"per_snapshot", sc.clutter.per_snapshot},
                    {"angle_jitter_rad", sc.clutter.angle_jitter_rad},
                    {"delay_jitter_s", sc.clutter.delay_jitter_s}};
    j["patches"] = json::array();
    for (const ReflectorSurface &s : sc.patches)
        j["patches"].push_back({{"name", s.name},
                                {"axis", s.axis == 0 ? "x" : s.axis == 1 ? "y" : "z"},
                                {"offset", s.offset},
                                {"u_min", s.u_min},
                                {"u_max", s.u_max},
                                {"v_min", s.v_min},
                                {"v_max", s.v_max},
                                {"region", region_name(s.region)}});
    j["boxes"] = json::array();
    for (const BoxObstacle &b : sc.boxes)
        j["boxes"].push_back({{"min", {b.min.x, b.min.y, b.min.z}},
                              {"max", {b.max.x, b.max.y, b.max.z}}});
    j["occlusion_check"] = sc.occlusion_check;
    j["seed"] = sc.seed;

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("failed while writing '" + path + "'");
}

void synthesize_to_directory(const Scenario &scenario, const std::string &out_dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

    const auto truths = generate_all(scenario);
    const PointCloud cloud = export_cloud(scenario, scenario.cloud_pitch_m);

    save_ply(cloud, (fs::path(out_dir) / "cloud.ply").string());
    save_geometry(GeometryConfig{scenario.panels, scenario.route},
                  (fs::path(out_dir) / "geometry.json").string());
    save_scenario(scenario, (fs::path(out_dir) / "scenario.json").string());

    std::vector<MpcRecord> records;
    records.reserve(truths.size());
    for (const GroundTruthMpc &t : truths)
        records.push_back(t.record);
    write_mpc_csv(records, (fs::path(out_dir) / "mpcs.csv").string());

    // Ground-truth sidecar: one row per MPC, surfaces ';'-separated.
    std::ofstream out(fs::path(out_dir) / "truth.csv", std::ios::binary);
    if (!out)
        throw IoError("cannot open truth.csv for writing");
    out << "panel_id,snapshot_id,path_id,bounce_order,mechanism,surfaces,"
           "vs_x,vs_y,vs_z,sp1_x,sp1_y,sp1_z,sp2_x,sp2_y,sp2_z\n";
    char buf[64];
    auto put_num = [&](double v) {
        const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
        out.write(buf, n);
    };
    for (const GroundTruthMpc &t : truths)
    {
        out << t.record.key.panel_id << ',' << t.record.key.snapshot_id << ','
            << t.record.key.path_id << ',' << t.bounce_order << ',';
        out << (t.mechanism == PathMechanism::los          ? "los"
                : t.mechanism == PathMechanism::reflection ? "reflection"
                                                           : "scattering");
        out << ',';
        for (std::size_t i = 0; i < t.surface_chain.size(); ++i)
            out << (i ? ";" : "") << t.surface_chain[i];
        out << ',';
        put_num(t.true_vs.x); out.put(','); put_num(t.true_vs.y); out.put(','); put_num(t.true_vs.z);
        for (int i = 0; i < 2; ++i)
        {
            if (i < static_cast<int>(t.specular_points.size()))
            {
                const Vec3 &p = t.specular_points[static_cast<std::size_t>(i)];
                out.put(','); put_num(p.x); out.put(','); put_num(p.y); out.put(','); put_num(p.z);
            }
            else
                out << ",,,";
        }
        out.put('\n');
    }
    if (!out)
        throw IoError("failed while writing truth.csv");
}

} // namespace dmimo
