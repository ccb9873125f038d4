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

#include <array>
#include <complex>
#include <optional>
#include <tuple>

#include "dmimo/geometry.hpp"

namespace dmimo
{

// One distributed base-station array.
struct PanelGeometry
{
    int panel_id = 0;           // unique within a scenario, 1..K
    Vec3 position;              // phase center [m]
    Vec3 boresight{0, 1, 0};    // informational only
};

// One user-equipment position along the route.
struct UeState
{
    int snapshot_id = 0;
    Vec3 position;
    double moved_distance_m = 0.0; // cumulative along the route, non-decreasing
};

// Identifies one extracted path within one panel-UE link.
struct MpcKey
{
    int panel_id = 0;
    int snapshot_id = 0;
    int path_id = 0;

    friend auto operator<=>(const MpcKey &, const MpcKey &) = default;
};

// 2x2 complex polarization matrix, row major: [VV, VH; HV, HH].
using PolMatrix = std::array<std::complex<double>, 4>;

// One extracted multipath component. Doppler, gain and polarization are
// carried through untouched; only AoA and delay enter the analyses.
struct MpcRecord
{
    MpcKey key;
    AoA aoa;
    double delay_s = 0.0;
    std::optional<double> doppler_hz;
    std::optional<double> gain_db;
    std::optional<PolMatrix> polarization;

    // 1-based CSV row for diagnostics; 0 when not file-backed. Excluded from
    // equality so round-trips compare payload only.
    long source_row = 0;

    friend bool operator==(const MpcRecord &a, const MpcRecord &b)
    {
        return a.key == b.key && a.aoa.azimuth_rad == b.aoa.azimuth_rad &&
               a.aoa.zenith_rad == b.aoa.zenith_rad && a.delay_s == b.delay_s &&
               a.doppler_hz == b.doppler_hz && a.gain_db == b.gain_db &&
               a.polarization == b.polarization;
    }
};

inline double path_length_m(const MpcRecord &mpc) { return mpc.delay_s * kSpeedOfLight; }

} // namespace dmimo
