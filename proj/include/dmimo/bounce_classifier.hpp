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
// Interaction-order classification. For each MPC the arrival ray is cast
// from the panel into the environment cloud to locate the last-hop
// scatterer. Independently, the scatterer position a single-bounce path
// would require is solved in closed form on the same ray. The two agree
// (within a threshold) exactly when one interaction explains the path.

#pragma once

#include <optional>
#include <vector>

#include "dmimo/point_cloud.hpp"
#include "dmimo/types.hpp"

namespace dmimo
{

enum class BounceLabel
{
    single,        // one interaction explains angle and delay
    multi,         // hypothesis position contradicts the observed scatterer
    indeterminate, // arrival ray never intersects the mapped environment
    los            // line-of-sight path, excluded from the bounce taxonomy
};

const char *bounce_label_name(BounceLabel label);

enum class InfeasibleReason
{
    none,
    short_path,    // path length below the line-of-sight distance
    los_degenerate,// UE sits on the arrival ray at full path length
    behind_panel,  // root lies at non-positive ray distance
    beyond_range   // root lies past the full path length
};

const char *infeasible_reason_name(InfeasibleReason r);

// Closed-form single-bounce hypothesis. The scatterer must lie on the
// arrival ray at distance d1 with d1 + |s - ue| equal to the path length;
// that has the unique root
//     d1 = (L^2 - |v|^2) / (2 (L + v.e)),   v = panel - ue,  L = tau*c.
struct SingleBounceSolution
{
    bool feasible = false;
    Vec3 scatterer;             // valid when feasible
    double ray_distance_m = 0;  // d1
    InfeasibleReason reason = InfeasibleReason::none;
};

struct ClassifierConfig
{
    double threshold_m = 1.5;     // mismatch bound separating single from multi
    MarchParams march;
    enum class InfeasiblePolicy
    {
        multi,
        indeterminate
    } infeasible_policy = InfeasiblePolicy::multi;

    // LOS exclusion: path length within c*los_delay_tol of the direct
    // distance and arrival direction within los_angle_tol of the UE bearing.
    bool exclude_los = true;
    double los_delay_tol_s = 1e-9;
    double los_angle_tol_rad = 2.0 * kPi / 180.0;
};

struct BounceDecision
{
    MpcKey key;
    BounceLabel label = BounceLabel::indeterminate;
    std::optional<Hit> last_hop;          // observed scatterer (ray cast)
    std::optional<Vec3> single_bounce;    // hypothesis position, when feasible
    std::optional<double> mismatch_m;     // |hypothesis - observed|
    InfeasibleReason infeasible_reason = InfeasibleReason::none;
};

// Observed last-hop scatterer: arrival ray from the panel, capped at the
// full path length, first intersection with the cloud.
std::optional<Hit> last_hop_scatterer(const MpcRecord &mpc, const PanelGeometry &panel,
                                      const SpatialIndex &index, const MarchParams &params = {});

SingleBounceSolution solve_single_bounce(const MpcRecord &mpc, const PanelGeometry &panel,
                                         const Vec3 &ue_position);

// True when path length and arrival direction both match the direct link
// within the configured tolerances.
bool is_line_of_sight(const MpcRecord &mpc, const PanelGeometry &panel, const Vec3 &ue_position,
                      const ClassifierConfig &cfg);

BounceDecision classify(const MpcRecord &mpc, const PanelGeometry &panel, const Vec3 &ue_position,
                        const SpatialIndex &index, const ClassifierConfig &cfg);

struct LinkCounts
{
    int single = 0;
    int multi = 0;
    int indeterminate = 0;
    int los = 0;
};

struct LinkClassification
{
    int panel_id = 0;
    int snapshot_id = 0;
    std::vector<BounceDecision> decisions; // ordered by path_id
    LinkCounts counts;
    std::optional<double> eta_sb; // single / (single + multi); nullopt if both zero
};

// Classifies one (panel, snapshot) link. Indeterminate and LOS paths are
// excluded from the single-bounce ratio and reported via counts.
LinkClassification classify_link(const std::vector<MpcRecord> &mpcs, const PanelGeometry &panel,
                                 const Vec3 &ue_position, const SpatialIndex &index,
                                 const ClassifierConfig &cfg);

} // namespace dmimo
