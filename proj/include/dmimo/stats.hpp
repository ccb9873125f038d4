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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmimo/bounce_classifier.hpp"
#include "dmimo/vs_tracker.hpp"

namespace dmimo
{

// Single-bounce ratio of one link, against its communication distance.
struct StatPoint
{
    int panel_id = 0;
    int snapshot_id = 0;
    double distance_m = 0.0; // UE-panel separation
    std::optional<double> eta_sb;
    LinkCounts counts;
};

enum class FitModel
{
    linear,     // eta = a * d + b
    exponential // eta = a * exp(b * d)
};

struct FitResult
{
    FitModel model = FitModel::linear;
    double a = 0.0;
    double b = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

struct ModelComparison
{
    FitResult linear;
    FitResult exponential;
    FitModel preferred = FitModel::linear; // larger R^2 wins
};

// Ordinary least squares. Requires >= 3 points with non-degenerate distance
// spread; throws NumericError otherwise. R^2 is defined as 0 when the
// response is constant.
FitResult fit_linear(const std::vector<std::pair<double, double>> &points);

// Nonlinear least squares on untransformed residuals, seeded by a log-domain
// line fit over the positive responses. Throws FitDivergence (carrying the
// best iterate) when the damped Gauss-Newton loop fails to reach a gradient
// norm of 1e-10.
FitResult fit_exponential(const std::vector<std::pair<double, double>> &points);

class FitDivergence : public NumericError
{
  public:
    FitDivergence(const std::string &msg, FitResult best)
        : NumericError(msg), best_iterate(best) {}
    FitResult best_iterate;
};

ModelComparison compare_models(const std::vector<std::pair<double, double>> &points);

// Share of confirmed reflected MPCs per last-hop region, one row per
// snapshot. Fractions sum to 1 when any reflected MPC exists.
struct SurfaceDistribution
{
    int snapshot_id = 0;
    double moved_distance_m = 0.0;
    int total_reflected = 0;
    std::map<Region, double> fractions; // empty when total_reflected == 0
};

std::vector<SurfaceDistribution> surface_distribution(
    const std::vector<SnapshotTracks> &snapshots,
    const std::vector<LinkClassification> &classifications,
    const std::vector<UeState> &route, const TrackerConfig &tracker_cfg);

// Panel-visibility bookkeeping of confirmed tracks.
struct LifetimeRecord
{
    int snapshot_id = 0;
    int track_id = 0;
    int vs_id = -1;
    std::vector<int> panels_visited;
    int lifetime = 0; // |panels_visited|
};

struct LifetimeSummary
{
    std::vector<LifetimeRecord> records;
    std::map<int, int> lifetime_histogram;        // lifetime -> track count
    std::map<int, int> births_at_panel;           // first panel -> count
    std::map<int, int> deaths_at_panel;           // last panel -> count
};

LifetimeSummary lifetime_stats(const std::vector<SnapshotTracks> &snapshots,
                               const TrackerConfig &tracker_cfg);

} // namespace dmimo
