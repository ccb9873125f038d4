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

#include "dmimo/bounce_classifier.hpp"

#include <algorithm>
#include <cmath>

namespace dmimo
{

const char *bounce_label_name(BounceLabel label)
{
    switch (label)
    {
    case BounceLabel::single:        return "single";
    case BounceLabel::multi:         return "multi";
    case BounceLabel::indeterminate: return "indeterminate";
    case BounceLabel::los:           return "los";
    }
    return "indeterminate";
}

const char *infeasible_reason_name(InfeasibleReason r)
{
    switch (r)
    {
    case InfeasibleReason::none:           return "none";
    case InfeasibleReason::short_path:     return "short-path";
    case InfeasibleReason::los_degenerate: return "los-degenerate";
    case InfeasibleReason::behind_panel:   return "behind-panel";
    case InfeasibleReason::beyond_range:   return "beyond-range";
    }
    return "none";
}

std::optional<Hit> last_hop_scatterer(const MpcRecord &mpc, const PanelGeometry &panel,
                                      const SpatialIndex &index, const MarchParams &params)
{
    Ray ray;
    ray.origin = panel.position;
    ray.direction = direction_vector(mpc.aoa);
    ray.max_range_m = path_length_m(mpc);
    return first_intersection(index, ray, params);
}

SingleBounceSolution solve_single_bounce(const MpcRecord &mpc, const PanelGeometry &panel,
                                         const Vec3 &ue_position)
{
    SingleBounceSolution sol;
    const double length = path_length_m(mpc);
    const Vec3 v = panel.position - ue_position;
    const double v_norm = v.norm();

    if (length < v_norm)
    {
        sol.reason = InfeasibleReason::short_path;
        return sol;
    }

    const Vec3 e = direction_vector(mpc.aoa);
    const double denom = 2.0 * (length + dot(v, e));
    if (denom <= 1e-9)
    {
        // v.e >= -|v| >= -length, so denom >= 0; it vanishes only when the
        // UE lies on the ray at exactly full path length.
        sol.reason = InfeasibleReason::los_degenerate;
        return sol;
    }

    const double d1 = (length * length - v.norm_sq()) / denom;
    if (d1 <= 0.0)
    {
        sol.reason = InfeasibleReason::behind_panel;
        return sol;
    }
    if (d1 > length)
    {
        sol.reason = InfeasibleReason::beyond_range;
        return sol;
    }

    sol.feasible = true;
    sol.ray_distance_m = d1;
    sol.scatterer = panel.position + d1 * e;
    return sol;
}

bool is_line_of_sight(const MpcRecord &mpc, const PanelGeometry &panel, const Vec3 &ue_position,
                      const ClassifierConfig &cfg)
{
    const double direct = distance(panel.position, ue_position);
    if (std::abs(path_length_m(mpc) - direct) > cfg.los_delay_tol_s * kSpeedOfLight)
        return false;
    if (direct <= 0.0)
        return false;
    const Vec3 e = direction_vector(mpc.aoa);
    const Vec3 bearing = (ue_position - panel.position) / direct;
    const double cosang = std::clamp(dot(e, bearing), -1.0, 1.0);
    return std::acos(cosang) <= cfg.los_angle_tol_rad;
}

BounceDecision classify(const MpcRecord &mpc, const PanelGeometry &panel, const Vec3 &ue_position,
                        const SpatialIndex &index, const ClassifierConfig &cfg)
{
    BounceDecision decision;
    decision.key = mpc.key;

    if (cfg.exclude_los && is_line_of_sight(mpc, panel, ue_position, cfg))
    {
        decision.label = BounceLabel::los;
        return decision;
    }

    decision.last_hop = last_hop_scatterer(mpc, panel, index, cfg.march);

    const SingleBounceSolution sol = solve_single_bounce(mpc, panel, ue_position);
    if (sol.feasible)
        decision.single_bounce = sol.scatterer;
    decision.infeasible_reason = sol.reason;

    if (!decision.last_hop)
    {
        // Ray leaves the mapped environment: nothing to compare against.
        decision.label = BounceLabel::indeterminate;
        return decision;
    }

    if (!sol.feasible)
    {
        decision.label = cfg.infeasible_policy == ClassifierConfig::InfeasiblePolicy::multi
                             ? BounceLabel::multi
                             : BounceLabel::indeterminate;
        return decision;
    }

    const double mismatch = distance(sol.scatterer, decision.last_hop->point);
    decision.mismatch_m = mismatch;
    decision.label = mismatch <= cfg.threshold_m ? BounceLabel::single : BounceLabel::multi;
    return decision;
}

LinkClassification classify_link(const std::vector<MpcRecord> &mpcs, const PanelGeometry &panel,
                                 const Vec3 &ue_position, const SpatialIndex &index,
                                 const ClassifierConfig &cfg)
{
    if (mpcs.empty())
        throw InvalidArgument("classify_link: empty MPC list");

    LinkClassification link;
    link.panel_id = panel.panel_id;
    link.snapshot_id = mpcs.front().key.snapshot_id;

    link.decisions.reserve(mpcs.size());
    for (const MpcRecord &mpc : mpcs)
    {
        if (mpc.key.panel_id != panel.panel_id || mpc.key.snapshot_id != link.snapshot_id)
            throw InvalidArgument("classify_link: MPC does not belong to this link");
        link.decisions.push_back(classify(mpc, panel, ue_position, index, cfg));
    }
    std::sort(link.decisions.begin(), link.decisions.end(),
              [](const BounceDecision &a, const BounceDecision &b) { return a.key < b.key; });

    for (const BounceDecision &d : link.decisions)
        switch (d.label)
        {
        case BounceLabel::single:        ++link.counts.single; break;
        case BounceLabel::multi:         ++link.counts.multi; break;
        case BounceLabel::indeterminate: ++link.counts.indeterminate; break;
        case BounceLabel::los:           ++link.counts.los; break;
        }

    const int denom = link.counts.single + link.counts.multi;
    if (denom > 0)
        link.eta_sb = static_cast<double>(link.counts.single) / static_cast<double>(denom);
    return link;
}

} // namespace dmimo
