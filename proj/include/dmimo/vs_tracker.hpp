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
// Interaction-mechanism identification. Every MPC defines a virtual
// scatterer (VS) at full path length along its arrival ray. VSs of purely
// specular paths coincide at the (possibly iterated) mirror image of the UE
// and are therefore seen at the same spot by every panel, while scattered
// and diffracted paths place their VSs at panel-dependent positions. A
// random-walk Kalman filter tracks coincident VSs across the panel sequence
// of one snapshot; MPCs on confirmed tracks are labeled reflected.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dmimo/types.hpp"

namespace dmimo
{

struct VsMeasurement
{
    Vec3 position; // panel + tau*c * direction(aoa)
    MpcKey source;
};

// VS at full-delay extension of the arrival ray.
VsMeasurement compute_vs(const MpcRecord &mpc, const PanelGeometry &panel);

struct TrackerConfig
{
    double process_noise_m2 = 0.0025;     // Q = q I, default (5 cm)^2
    double measurement_noise_m2 = 0.09;   // R = r I, default (30 cm)^2
    double initial_covariance_m2 = 0.09;  // M0 = m0 I, default equal to R
    double gate_m = 1.0;                  // association gate; infinity recovers the bare rule
    int confirm_min_panels = 3;           // panels with a measurement needed to confirm
};

struct TrackState
{
    Vec3 position;                  // VS estimate
    Mat3 covariance;                // error covariance M, symmetric PSD
    std::vector<int> panels_visited; // panels that contributed a measurement, ascending
    std::vector<MpcKey> members;    // one MPC per visited panel
    int track_id = 0;               // index within its snapshot
    int vs_id = -1;                 // cross-snapshot identity, assigned separately
};

bool track_confirmed(const TrackState &track, const TrackerConfig &cfg);

// Random-walk prediction: state unchanged, covariance inflated by Q.
TrackState kf_predict(const TrackState &track, const TrackerConfig &cfg);

// Measurement update (gain, covariance, state). Throws NumericError when the
// input covariance is not symmetric PSD.
TrackState kf_update(const TrackState &predicted, const Vec3 &measurement,
                     const TrackerConfig &cfg);

struct Association
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (track idx, measurement idx)
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_measurements;
};

// Mutual-minimum-distance association: (i, j) pair up only when each is the
// other's nearest neighbor and their distance is within the gate.
Association associate(const std::vector<Vec3> &predicted, const std::vector<Vec3> &measured,
                      double gate_m);

enum class Mechanism
{
    reflected, // on a confirmed VS track
    other,     // scattering / diffraction / mixed
    los
};

const char *mechanism_name(Mechanism m);

struct SnapshotTracks
{
    int snapshot_id = 0;
    std::vector<TrackState> tracks; // confirmed and unconfirmed
    std::map<MpcKey, Mechanism> mechanism; // one entry per input measurement
};

// Tracks one snapshot. `measurements_by_panel` must be keyed by ascending
// panel id; the filter consumes panels in that spatial order. LOS paths are
// not VS measurements and must be withheld by the caller.
SnapshotTracks track_snapshot(const std::map<int, std::vector<VsMeasurement>> &measurements_by_panel,
                              int snapshot_id, const TrackerConfig &cfg);

// AoA each panel would observe toward the track's final VS estimate.
std::vector<std::pair<int, AoA>> vs_to_aoa_per_panel(const TrackState &track,
                                                     const std::vector<PanelGeometry> &panels);

// Greedy nearest-neighbor chaining of confirmed tracks between consecutive
// snapshots (same gate). Assigns stable vs_id values in place.
void assign_vs_ids(std::vector<SnapshotTracks> &snapshots, const TrackerConfig &cfg);

} // namespace dmimo
