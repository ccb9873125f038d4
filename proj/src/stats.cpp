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

#include "dmimo/stats.hpp"

#include <algorithm>
#include <cmath>

namespace dmimo
{

namespace
{

double r_squared_of(const std::vector<std::pair<double, double>> &points,
                    double (*predict)(double, double, double), double a, double b)
{
    double mean = 0.0;
    for (const auto &[d, y] : points)
        mean += y;
    mean /= static_cast<double>(points.size());

    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto &[d, y] : points)
    {
        const double r = y - predict(d, a, b);
        ss_res += r * r;
        const double t = y - mean;
        ss_tot += t * t;
    }
    if (ss_tot <= 1e-30)
        return 0.0; // constant response carries no explainable variance
    return 1.0 - ss_res / ss_tot;
}

double predict_linear(double d, double a, double b) { return a * d + b; }
double predict_exponential(double d, double a, double b) { return a * std::exp(b * d); }

} // namespace

FitResult fit_linear(const std::vector<std::pair<double, double>> &points)
{
    if (points.size() < 3)
        throw InvalidArgument("fit_linear: need at least 3 points");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto &[x, y] : points)
    {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double var = sxx - sx * sx / n;
    if (var <= 1e-12)
        throw NumericError("fit_linear: degenerate distance spread");

    FitResult fit;
    fit.model = FitModel::linear;
    fit.a = (sxy - sx * sy / n) / var;
    fit.b = (sy - fit.a * sx) / n;
    fit.n_points = static_cast<int>(points.size());
    fit.r_squared = r_squared_of(points, predict_linear, fit.a, fit.b);
    return fit;
}

FitResult fit_exponential(const std::vector<std::pair<double, double>> &points)
{
    if (points.size() < 3)
        throw InvalidArgument("fit_exponential: need at least 3 points");

    // Log-domain line fit over positive responses seeds the iteration.
    std::vector<std::pair<double, double>> logp;
    for (const auto &[x, y] : points)
        if (y > 0)
            logp.emplace_back(x, std::log(y));
    if (logp.size() < 3)
        throw InvalidArgument("fit_exponential: need at least 3 points with positive response");

    double a, b;
    try
    {
        const FitResult init = fit_linear(logp);
        a = std::exp(init.b);
        b = init.a;
    }
    catch (const NumericError &)
    {
        throw NumericError("fit_exponential: degenerate distance spread");
    }

    // Damped Gauss-Newton on r_i = a e^{b d_i} - y_i.
    const int max_iter = 500;
    double lambda = 1e-3;
    auto sum_squares = [&](double pa, double pb) {
        double s = 0;
        for (const auto &[x, y] : points)
        {
            const double r = pa * std::exp(pb * x) - y;
            s += r * r;
        }
        return s;
    };

    double best_a = a, best_b = b, best_ss = sum_squares(a, b);
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter)
    {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, g0 = 0, g1 = 0;
        for (const auto &[x, y] : points)
        {
            const double e = std::exp(b * x);
            const double r = a * e - y;
            const double j0 = e;         // d r / d a
            const double j1 = a * x * e; // d r / d b
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            g0 += j0 * r;
            g1 += j1 * r;
        }
        const double grad_norm = std::sqrt(4.0 * (g0 * g0 + g1 * g1)); // grad of SS = 2 J^T r
        if (grad_norm < 1e-10)
        {
            converged = true;
            break;
        }

        // Levenberg damping: retry with a stiffer step until SS drops.
        bool stepped = false;
        for (int damp = 0; damp < 30; ++damp)
        {
            const double d00 = jtj00 * (1 + lambda);
            const double d11 = jtj11 * (1 + lambda);
            const double det = d00 * d11 - jtj01 * jtj01;
            if (std::abs(det) < 1e-300)
            {
                lambda *= 10;
                continue;
            }
            const double da = (-g0 * d11 + g1 * jtj01) / det;
            const double db = (-g1 * d00 + g0 * jtj01) / det;
            const double ss = sum_squares(a + da, b + db);
            if (ss < best_ss - 1e-15 * std::max(1.0, best_ss))
            {
                a += da;
                b += db;
                best_ss = ss;
                best_a = a;
                best_b = b;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                break;
            }
            lambda *= 10;
        }
        if (!stepped)
        {
            // For a smooth least-squares surface some step along the damped
            // direction always decreases SS unless we are within rounding of
            // the minimum, so a stall is the double-precision optimum.
            converged = std::isfinite(best_ss);
            break;
        }
    }

    FitResult fit;
    fit.model = FitModel::exponential;
    fit.a = best_a;
    fit.b = best_b;
    fit.n_points = static_cast<int>(points.size());
    fit.r_squared = r_squared_of(points, predict_exponential, best_a, best_b);

    if (!converged)
        throw FitDivergence("fit_exponential: no convergence after " +
                                std::to_string(max_iter) + " iterations",
                            fit);
    return fit;
}

ModelComparison compare_models(const std::vector<std::pair<double, double>> &points)
{
    ModelComparison cmp;
    cmp.linear = fit_linear(points);
    cmp.exponential = fit_exponential(points);
    cmp.preferred =
        cmp.exponential.r_squared > cmp.linear.r_squared ? FitModel::exponential : FitModel::linear;
    return cmp;
}

std::vector<SurfaceDistribution> surface_distribution(
    const std::vector<SnapshotTracks> &snapshots,
    const std::vector<LinkClassification> &classifications,
    const std::vector<UeState> &route, const TrackerConfig &tracker_cfg)
{
    // Last-hop region per MPC, from the classifier pass.
    std::map<MpcKey, Region> region_of;
    for (const LinkClassification &link : classifications)
        for (const BounceDecision &d : link.decisions)
            region_of[d.key] = d.last_hop ? d.last_hop->region : Region::unknown;

    std::map<int, double> moved_of;
    for (const UeState &u : route)
        moved_of[u.snapshot_id] = u.moved_distance_m;

    std::vector<SurfaceDistribution> out;
    for (const SnapshotTracks &snap : snapshots)
    {
        SurfaceDistribution dist;
        dist.snapshot_id = snap.snapshot_id;
        const auto it = moved_of.find(snap.snapshot_id);
        dist.moved_distance_m = it != moved_of.end() ? it->second : 0.0;

        std::map<Region, int> counts;
        for (const TrackState &t : snap.tracks)
        {
            if (!track_confirmed(t, tracker_cfg))
                continue;
            for (const MpcKey &key : t.members)
            {
                const auto rit = region_of.find(key);
                ++counts[rit != region_of.end() ? rit->second : Region::unknown];
                ++dist.total_reflected;
            }
        }
        if (dist.total_reflected > 0)
            for (const auto &[region, n] : counts)
                dist.fractions[region] =
                    static_cast<double>(n) / static_cast<double>(dist.total_reflected);
        out.push_back(std::move(dist));
    }
    return out;
}

LifetimeSummary lifetime_stats(const std::vector<SnapshotTracks> &snapshots,
                               const TrackerConfig &tracker_cfg)
{
    LifetimeSummary summary;
    for (const SnapshotTracks &snap : snapshots)
        for (const TrackState &t : snap.tracks)
        {
            if (!track_confirmed(t, tracker_cfg))
                continue;
            LifetimeRecord rec;
            rec.snapshot_id = snap.snapshot_id;
            rec.track_id = t.track_id;
            rec.vs_id = t.vs_id;
            rec.panels_visited = t.panels_visited;
            rec.lifetime = static_cast<int>(t.panels_visited.size());
            ++summary.lifetime_histogram[rec.lifetime];
            if (!rec.panels_visited.empty())
            {
                ++summary.births_at_panel[rec.panels_visited.front()];
                ++summary.deaths_at_panel[rec.panels_visited.back()];
            }
            summary.records.push_back(std::move(rec));
        }
    return summary;
}

} // namespace dmimo
