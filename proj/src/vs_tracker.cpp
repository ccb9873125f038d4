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

#include "dmimo/vs_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmimo
{

const char *mechanism_name(Mechanism m)
{
    switch (m)
    {
    case Mechanism::reflected: return "reflected";
    case Mechanism::other:     return "other";
    case Mechanism::los:       return "los";
    }
    return "other";
}

VsMeasurement compute_vs(const MpcRecord &mpc, const PanelGeometry &panel)
{
    VsMeasurement m;
    m.position = panel.position + path_length_m(mpc) * direction_vector(mpc.aoa);
    m.source = mpc.key;
    if (!m.position.finite())
        throw NumericError("compute_vs: non-finite VS position");
    return m;
}

bool track_confirmed(const TrackState &track, const TrackerConfig &cfg)
{
    return static_cast<int>(track.panels_visited.size()) >= cfg.confirm_min_panels;
}

TrackState kf_predict(const TrackState &track, const TrackerConfig &cfg)
{
    TrackState out = track;
    out.covariance = track.covariance + Mat3::scaled(cfg.process_noise_m2);
    return out;
}

TrackState kf_update(const TrackState &predicted, const Vec3 &measurement,
                     const TrackerConfig &cfg)
{
    if (!predicted.covariance.is_psd())
        throw NumericError("kf_update: covariance is not symmetric PSD");
    if (!measurement.finite())
        throw InvalidArgument("kf_update: non-finite measurement");

    const Mat3 &m_pred = predicted.covariance;
    const Mat3 r = Mat3::scaled(cfg.measurement_noise_m2);
    const Mat3 gain = m_pred * (m_pred + r).inverse();

    TrackState out = predicted;
    out.covariance = ((Mat3::identity() - gain) * m_pred).symmetrized();
    out.position = predicted.position + gain * (measurement - predicted.position);
    return out;
}

Association associate(const std::vector<Vec3> &predicted, const std::vector<Vec3> &measured,
                      double gate_m)
{
    Association out;
    const std::size_t nt = predicted.size();
    const std::size_t nm = measured.size();

    std::vector<char> track_paired(nt, 0), meas_paired(nm, 0);

    if (nt != 0 && nm != 0)
    {
        // Nearest measurement per track and nearest track per measurement;
        // ties resolved toward the lower index so the pairing is unique.
        std::vector<std::size_t> best_for_track(nt), best_for_meas(nm);
        std::vector<double> dist_for_track(nt, std::numeric_limits<double>::infinity());
        std::vector<double> dist_for_meas(nm, std::numeric_limits<double>::infinity());

        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t j = 0; j < nm; ++j)
            {
                const double d = distance(predicted[i], measured[j]);
                if (d < dist_for_track[i])
                {
                    dist_for_track[i] = d;
                    best_for_track[i] = j;
                }
                if (d < dist_for_meas[j])
                {
                    dist_for_meas[j] = d;
                    best_for_meas[j] = i;
                }
            }

        for (std::size_t i = 0; i < nt; ++i)
        {
            const std::size_t j = best_for_track[i];
            if (best_for_meas[j] == i && dist_for_track[i] <= gate_m)
            {
                out.pairs.emplace_back(i, j);
                track_paired[i] = 1;
                meas_paired[j] = 1;
            }
        }
    }

    for (std::size_t i = 0; i < nt; ++i)
        if (!track_paired[i])
            out.unmatched_tracks.push_back(i);
    for (std::size_t j = 0; j < nm; ++j)
        if (!meas_paired[j])
            out.unmatched_measurements.push_back(j);
    return out;
}

SnapshotTracks track_snapshot(const std::map<int, std::vector<VsMeasurement>> &measurements_by_panel,
                              int snapshot_id, const TrackerConfig &cfg)
{
    if (cfg.process_noise_m2 < 0 || cfg.measurement_noise_m2 <= 0 ||
        cfg.initial_covariance_m2 <= 0 || cfg.gate_m <= 0 || cfg.confirm_min_panels < 2)
        throw InvalidArgument("track_snapshot: invalid tracker configuration");

    SnapshotTracks out;
    out.snapshot_id = snapshot_id;

    auto start_track = [&](const VsMeasurement &m) {
        TrackState t;
        t.position = m.position;
        t.covariance = Mat3::scaled(cfg.initial_covariance_m2);
        t.panels_visited.push_back(m.source.panel_id);
        t.members.push_back(m.source);
        t.track_id = static_cast<int>(out.tracks.size());
        out.tracks.push_back(std::move(t));
    };

    bool first_panel = true;
    for (const auto &[panel_id, measurements] : measurements_by_panel)
    {
        for (const VsMeasurement &m : measurements)
            if (m.source.panel_id != panel_id)
                throw InvalidArgument("track_snapshot: measurement filed under wrong panel");

        if (first_panel)
        {
            for (const VsMeasurement &m : measurements)
                start_track(m);
            first_panel = false;
            continue;
        }

        // Predict all live tracks, associate, update the matched ones.
        // Unmatched tracks coast with the inflated covariance; tracks are
        // never dropped within a snapshot.
        std::vector<Vec3> predicted(out.tracks.size());
        for (std::size_t i = 0; i < out.tracks.size(); ++i)
        {
            out.tracks[i] = kf_predict(out.tracks[i], cfg);
            predicted[i] = out.tracks[i].position;
        }

        std::vector<Vec3> measured(measurements.size());
        for (std::size_t j = 0; j < measurements.size(); ++j)
            measured[j] = measurements[j].position;

        const Association assoc = associate(predicted, measured, cfg.gate_m);
        for (const auto &[ti, mj] : assoc.pairs)
        {
            TrackState updated = kf_update(out.tracks[ti], measured[mj], cfg);
            updated.panels_visited.push_back(panel_id);
            updated.members.push_back(measurements[mj].source);
            out.tracks[ti] = std::move(updated);
        }
        for (std::size_t mj : assoc.unmatched_measurements)
            start_track(measurements[mj]);
    }

    for (const TrackState &t : out.tracks)
    {
        const Mechanism mech =
            track_confirmed(t, cfg) ? Mechanism::reflected : Mechanism::other;
        for (const MpcKey &key : t.members)
            out.mechanism[key] = mech;
    }
    return out;
}

std::vector<std::pair<int, AoA>> vs_to_aoa_per_panel(const TrackState &track,
                                                     const std::vector<PanelGeometry> &panels)
{
    std::vector<std::pair<int, AoA>> out;
    out.reserve(panels.size());
    for (const PanelGeometry &panel : panels)
        out.emplace_back(panel.panel_id, aoa_from_points(panel.position, track.position));
    return out;
}

void assign_vs_ids(std::vector<SnapshotTracks> &snapshots, const TrackerConfig &cfg)
{
    std::sort(snapshots.begin(), snapshots.end(),
              [](const SnapshotTracks &a, const SnapshotTracks &b) {
                  return a.snapshot_id < b.snapshot_id;
              });

    int next_id = 0;
    const SnapshotTracks *prev = nullptr;
    for (SnapshotTracks &snap : snapshots)
    {
        std::vector<TrackState *> current;
        for (TrackState &t : snap.tracks)
            if (track_confirmed(t, cfg))
                current.push_back(&t);

        std::vector<const TrackState *> previous;
        if (prev)
            for (const TrackState &t : prev->tracks)
                if (track_confirmed(t, cfg) && t.vs_id >= 0)
                    previous.push_back(&t);

        // Greedy by increasing pair distance, each side used at most once.
        struct Cand
        {
            double d;
            std::size_t prev_idx, cur_idx;
        };
        std::vector<Cand> cands;
        for (std::size_t i = 0; i < previous.size(); ++i)
            for (std::size_t j = 0; j < current.size(); ++j)
            {
                const double d = distance(previous[i]->position, current[j]->position);
                if (d <= cfg.gate_m)
                    cands.push_back({d, i, j});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) {
            if (a.d != b.d)
                return a.d < b.d;
            return std::tie(a.prev_idx, a.cur_idx) < std::tie(b.prev_idx, b.cur_idx);
        });

        std::vector<char> prev_used(previous.size(), 0), cur_used(current.size(), 0);
        for (const Cand &c : cands)
        {
            if (prev_used[c.prev_idx] || cur_used[c.cur_idx])
                continue;
            current[c.cur_idx]->vs_id = previous[c.prev_idx]->vs_id;
            prev_used[c.prev_idx] = 1;
            cur_used[c.cur_idx] = 1;
        }
        for (std::size_t j = 0; j < current.size(); ++j)
            if (!cur_used[j] && current[j]->vs_id < 0)
                current[j]->vs_id = next_id++;
        // keep inherited ids counted past
        for (TrackState *t : current)
            next_id = std::max(next_id, t->vs_id + 1);

        prev = &snap;
    }
}

} // namespace dmimo
