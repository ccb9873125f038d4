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
// Image-source scenario generator. Builds parametric shoe-box rooms,
// enumerates exact specular paths up to second order, exports sampled point
// clouds, and emits per-path ground truth (bounce order, surface chain, VS
// position, specular points). Everything is deterministic in the seed.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmimo/point_cloud.hpp"
#include "dmimo/types.hpp"

namespace dmimo
{

// Axis-aligned rectangular reflector. `axis` is the plane normal axis
// (0=x, 1=y, 2=z); (u, v) span the remaining axes in ascending order
// (x: u=y,v=z; y: u=x,v=z; z: u=x,v=y).
struct ReflectorSurface
{
    std::string name;
    int axis = 0;
    double offset = 0.0;
    double u_min = 0.0, u_max = 0.0;
    double v_min = 0.0, v_max = 0.0;
    Region region = Region::unknown;

    Plane plane() const;
    bool contains(const Vec3 &p, double tol = 1e-9) const;
};

struct BoxObstacle
{
    Vec3 min;
    Vec3 max;
};

struct NoiseParams
{
    double sigma_angle_rad = 0.0;
    double sigma_delay_s = 0.0;
};

// Non-specular population: per snapshot, `per_snapshot` nominal scatterers
// are drawn inside the room; each panel observes them with jittered angle
// and delay so the resulting VSs do not coincide across panels.
struct ClutterParams
{
    int per_snapshot = 0;
    double angle_jitter_rad = 0.12;
    double delay_jitter_s = 2e-9;
};

struct Scenario
{
    Vec3 room_size{10.0, 8.0, 3.0};
    std::vector<PanelGeometry> panels;
    std::vector<UeState> route;
    int max_reflection_order = 2; // 0, 1 or 2
    double cloud_pitch_m = 0.02;
    NoiseParams noise;
    ClutterParams clutter;
    std::vector<ReflectorSurface> patches; // extra reflectors (e.g. wall segments)
    std::vector<BoxObstacle> boxes;        // sampled into the cloud; never reflect
    bool occlusion_check = false;          // drop paths whose legs cross a box
    std::uint64_t seed = 1;
};

// Default scenario: 10 x 8 x 3 m room, 8 panels 60 cm apart along the south
// wall at 1.5 m height, 50 snapshots along a 12 m L-shaped route at 1 m
// height, with 1 degree / 1 ns parameter noise. Zero the noise for
// ground-truth work.
Scenario default_scenario();

// Panels evenly spaced along x, centered on `center`, boresight +y.
std::vector<PanelGeometry> panel_row(int count, double spacing_m, const Vec3 &center);

// `count` snapshots at equal arc-length steps along a polyline.
std::vector<UeState> route_from_waypoints(const std::vector<Vec3> &waypoints, int count);

enum class PathMechanism
{
    los,
    reflection,
    scattering
};

struct GroundTruthMpc
{
    MpcRecord record;                     // what a sounder would report (noise applied)
    int bounce_order = 0;                 // 0 = LOS; clutter carries 1
    PathMechanism mechanism = PathMechanism::los;
    std::vector<std::string> surface_chain; // propagation order, UE side first
    Vec3 true_vs;                         // exact VS (iterated mirror image; UE for LOS)
    std::vector<Vec3> specular_points;    // exact interaction points, UE side first
};

// The 6 room walls as reflectors.
std::vector<ReflectorSurface> room_surfaces(const Scenario &scenario);

// Exact specular paths (LOS + orders 1..max) for one link, with noise from
// the per-(snapshot, panel) substream of the scenario seed. Path ids are
// assigned in enumeration order starting at 1.
std::vector<GroundTruthMpc> generate_paths(const Scenario &scenario, int snapshot_id,
                                           int panel_id);

// Appends the non-specular clutter population for the same link, continuing
// the path-id sequence.
std::vector<GroundTruthMpc> add_scatter_clutter(std::vector<GroundTruthMpc> paths,
                                                const Scenario &scenario, int snapshot_id,
                                                int panel_id);

// All links of the scenario (paths + clutter), ordered by (panel, snapshot).
std::vector<GroundTruthMpc> generate_all(const Scenario &scenario);

// Regular grid sampling of every surface (room, patches, box faces) with
// true region labels.
PointCloud export_cloud(const Scenario &scenario, double pitch_m);

// Scenario config (JSON) on disk.
Scenario load_scenario(const std::string &path);
void save_scenario(const Scenario &scenario, const std::string &path);

// Writes cloud.ply, geometry.json, mpcs.csv, truth.csv and scenario.json
// into `out_dir` (created if missing).
void synthesize_to_directory(const Scenario &scenario, const std::string &out_dir);

} // namespace dmimo
