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
// End-to-end orchestration: classification, tracking and statistics over a
// labeled point cloud plus an MPC table, producing a JSON report and
// plot-ready CSVs. Deterministic for fixed inputs, config and seed.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmimo/io.hpp"
#include "dmimo/stats.hpp"

namespace dmimo
{

struct FitOptions
{
    bool horizontal_distance = false; // project the UE-panel distance to the xy plane
};

struct RunConfig
{
    ClassifierConfig classifier;
    TrackerConfig tracker;
    FitOptions fit;
    double voxel_size_m = 0.10;  // spatial index cell size
    double wall_margin_m = 0.15; // bbox labeling fallback for unlabeled clouds
    double eps_delay_s = 1e-9;   // ingest LOS-bound tolerance
    std::uint64_t seed = 1;
    unsigned threads = 0;        // 0 = all hardware threads
};

// JSON round-trip of the configuration. Unknown keys are rejected so typos
// fail loudly. Empty or null input yields the defaults.
RunConfig run_config_from_json(const std::string &json_text);
std::string run_config_to_json(const RunConfig &cfg); // canonical (sorted keys)
std::string config_hash(const RunConfig &cfg);        // FNV-1a over the canonical form

enum StageMask : unsigned
{
    stage_classify = 1,
    stage_track = 2,
    stage_stats = 4,
    stage_all = 7
};

struct DecisionRow
{
    BounceDecision decision;
    Vec3 measured_vs;                       // full-delay VS of the arrival ray
    Mechanism mechanism = Mechanism::other; // meaningful when tracking ran
    int track_id = -1;                      // confirmed-track membership, else -1
    int vs_id = -1;
};

struct PanelFits
{
    int panel_id = 0;
    bool ok = false;
    ModelComparison fits; // valid when ok
    std::string error;    // set when not ok
};

struct Report
{
    unsigned stages = 0;
    std::vector<DecisionRow> decisions;        // one per input MPC, key-ordered
    std::vector<StatPoint> stat_points;        // per link
    std::vector<SnapshotTracks> snapshots;     // tracker output
    LifetimeSummary lifetimes;
    std::vector<PanelFits> fits;
    std::vector<SurfaceDistribution> surfaces;

    GeometryConfig geometry;
    std::map<MpcKey, AoA> measured_aoa;        // for the AoA comparison export

    std::string config_json;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string timestamp_utc; // excluded from determinism guarantees
};

// Runs the requested stages. `cloud` may be null when classification (and
// hence statistics) is not requested. Unlabeled clouds are labeled by
// bounding-box proximity first.
Report run_pipeline(const PointCloud *cloud, const GeometryConfig &geometry,
                    const std::vector<MpcRecord> &records, const RunConfig &cfg,
                    unsigned stages = stage_all);

std::string report_to_json(const Report &report);

enum OutputMask : unsigned
{
    out_report_json = 1,
    out_fig4 = 2,        // fig4_eta_vs_dc.csv
    out_fig6 = 4,        // fig6_aoa_compare.csv
    out_fig7 = 8,        // fig7_surface_dist.csv
    out_tab1 = 16,       // tab1_fits.csv
    out_decisions = 32,  // decisions.csv
    out_tracks = 64,     // tracks.csv
    out_lifetimes = 128, // lifetimes.csv
    out_everything = 0xff
};

// Writes the selected artifacts into `out_dir` (created if missing).
void write_report(const Report &report, const std::string &out_dir, unsigned outputs);

} // namespace dmimo
