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
// File formats:
//
//   MPC CSV (UTF-8, '.' decimal, LF): header
//     panel_id,snapshot_id,path_id,azimuth_rad,zenith_rad,delay_s
//   optionally extended, in order, by
//     doppler_hz,gain_db,pol_re11,pol_im11,pol_re12,pol_im12,
//     pol_re21,pol_im21,pol_re22,pol_im22
//   Empty cells in optional columns mean "absent".
//
//   Geometry JSON: { "schema_version": 1, "panels": [...], "route": [...] }

#pragma once

#include <string>
#include <vector>

#include "dmimo/types.hpp"

namespace dmimo
{

// Panels plus UE route; the static side of a measurement.
struct GeometryConfig
{
    std::vector<PanelGeometry> panels;
    std::vector<UeState> route;

    const PanelGeometry &panel(int panel_id) const;  // throws on unknown id
    const UeState &snapshot(int snapshot_id) const;  // throws on unknown id
};

// The library convention is a zenith angle from +z. Files recorded with an
// elevation-from-horizon convention are converted on read.
enum class AngleConvention
{
    zenith,
    elevation
};

// Parses and range-checks all rows. Errors carry the 1-based row number.
std::vector<MpcRecord> ingest_mpc_csv(const std::string &path,
                                      AngleConvention convention = AngleConvention::zenith);

void write_mpc_csv(const std::vector<MpcRecord> &records, const std::string &path);

GeometryConfig load_geometry(const std::string &path);
void save_geometry(const GeometryConfig &geometry, const std::string &path);

// Cross-field validation that needs both sides: every MPC must reference a
// known panel and snapshot, and its path length may not undershoot the
// line-of-sight distance by more than c * eps_delay.
void validate_dataset(const GeometryConfig &geometry, const std::vector<MpcRecord> &records,
                      double eps_delay_s = 1e-9);

} // namespace dmimo
