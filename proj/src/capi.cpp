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

#include "dmimo/dmimo_c.h"

#include <cstring>
#include <memory>
#include <string>

#include "dmimo/pipeline.hpp"
#include "dmimo/synthesizer.hpp"

namespace
{

thread_local std::string g_last_error;

dmimo_status set_error(const dmimo::Error &e)
{
    g_last_error = e.what();
    switch (e.code())
    {
    case dmimo::ErrorCode::numeric: return DMIMO_ERR_NUMERIC;
    case dmimo::ErrorCode::io:      return DMIMO_ERR_IO;
    case dmimo::ErrorCode::input:   break;
    }
    return DMIMO_ERR_INPUT;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
dmimo_status guarded(Fn &&fn)
{
    try
    {
        fn();
        g_last_error.clear();
        return DMIMO_OK;
    }
    catch (const dmimo::Error &e)
    {
        return set_error(e);
    }
    catch (const std::exception &e)
    {
        g_last_error = e.what();
        return DMIMO_ERR_INPUT;
    }
    catch (...)
    {
        g_last_error = "unknown error";
        return DMIMO_ERR_INPUT;
    }
}

dmimo_status require(bool cond, const char *msg)
{
    if (cond)
        return DMIMO_OK;
    g_last_error = msg;
    return DMIMO_ERR_INPUT;
}

char *dup_string(const std::string &s)
{
    char *out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

struct dmimo_cloud
{
    dmimo::PointCloud cloud;
};

struct dmimo_dataset
{
    dmimo::GeometryConfig geometry;
    std::vector<dmimo::MpcRecord> records;
};

struct dmimo_scenario
{
    dmimo::Scenario scenario;
};

struct dmimo_report
{
    dmimo::Report report;
};

extern "C" {

const char *dmimo_version(void) { return "1.0.0"; }

const char *dmimo_last_error(void) { return g_last_error.c_str(); }

void dmimo_string_free(char *str) { delete[] str; }

/* ---- point cloud ------------------------------------------------------ */

dmimo_status dmimo_cloud_load_ply(const char *path, dmimo_cloud **out_cloud)
{
    if (dmimo_status s = require(path && out_cloud, "null argument"); s != DMIMO_OK)
        return s;
    *out_cloud = nullptr;
    return guarded([&] { *out_cloud = new dmimo_cloud{dmimo::load_ply(path)}; });
}

dmimo_status dmimo_cloud_save_ply(const dmimo_cloud *cloud, const char *path)
{
    if (dmimo_status s = require(cloud && path, "null argument"); s != DMIMO_OK)
        return s;
    return guarded([&] { dmimo::save_ply(cloud->cloud, path); });
}

dmimo_status dmimo_cloud_label_regions(dmimo_cloud *cloud, double wall_margin_m)
{
    if (dmimo_status s = require(cloud != nullptr, "null cloud"); s != DMIMO_OK)
        return s;
    return guarded(
        [&] { cloud->cloud = dmimo::label_regions_by_bbox(cloud->cloud, wall_margin_m); });
}

dmimo_status dmimo_cloud_point_count(const dmimo_cloud *cloud, uint64_t *out_count)
{
    if (dmimo_status s = require(cloud && out_count, "null argument"); s != DMIMO_OK)
        return s;
    *out_count = cloud->cloud.size();
    return DMIMO_OK;
}

void dmimo_cloud_free(dmimo_cloud *cloud) { delete cloud; }

/* ---- dataset ----------------------------------------------------------- */

dmimo_status dmimo_dataset_load(const char *geometry_json_path, const char *mpc_csv_path,
                                int elevation_convention, dmimo_dataset **out_dataset)
{
    if (dmimo_status s = require(geometry_json_path && mpc_csv_path && out_dataset,
                                 "null argument");
        s != DMIMO_OK)
        return s;
    *out_dataset = nullptr;
    return guarded([&] {
        auto ds = std::make_unique<dmimo_dataset>();
        ds->geometry = dmimo::load_geometry(geometry_json_path);
        ds->records = dmimo::ingest_mpc_csv(mpc_csv_path,
                                            elevation_convention != 0
                                                ? dmimo::AngleConvention::elevation
                                                : dmimo::AngleConvention::zenith);
        dmimo::validate_dataset(ds->geometry, ds->records);
        *out_dataset = ds.release();
    });
}

dmimo_status dmimo_dataset_counts(const dmimo_dataset *dataset, uint64_t *out_mpcs,
                                  uint32_t *out_panels, uint32_t *out_snapshots)
{
    if (dmimo_status s = require(dataset != nullptr, "null dataset"); s != DMIMO_OK)
        return s;
    if (out_mpcs)
        *out_mpcs = dataset->records.size();
    if (out_panels)
        *out_panels = static_cast<uint32_t>(dataset->geometry.panels.size());
    if (out_snapshots)
        *out_snapshots = static_cast<uint32_t>(dataset->geometry.route.size());
    return DMIMO_OK;
}

void dmimo_dataset_free(dmimo_dataset *dataset) { delete dataset; }

/* ---- scenarios ----------------------------------------------------------- */

dmimo_status dmimo_scenario_default(dmimo_scenario **out_scenario)
{
    if (dmimo_status s = require(out_scenario != nullptr, "null output"); s != DMIMO_OK)
        return s;
    *out_scenario = nullptr;
    return guarded([&] { *out_scenario = new dmimo_scenario{dmimo::default_scenario()}; });
}

dmimo_status dmimo_scenario_load(const char *path, dmimo_scenario **out_scenario)
{
    if (dmimo_status s = require(path && out_scenario, "null argument"); s != DMIMO_OK)
        return s;
    *out_scenario = nullptr;
    return guarded([&] { *out_scenario = new dmimo_scenario{dmimo::load_scenario(path)}; });
}

dmimo_status dmimo_scenario_set_seed(dmimo_scenario *scenario, uint64_t seed)
{
    if (dmimo_status s = require(scenario != nullptr, "null scenario"); s != DMIMO_OK)
        return s;
    if (seed != 0)
        scenario->scenario.seed = seed;
    return DMIMO_OK;
}

dmimo_status dmimo_scenario_synthesize(const dmimo_scenario *scenario, const char *out_dir)
{
    if (dmimo_status s = require(scenario && out_dir, "null argument"); s != DMIMO_OK)
        return s;
    return guarded([&] { dmimo::synthesize_to_directory(scenario->scenario, out_dir); });
}

void dmimo_scenario_free(dmimo_scenario *scenario) { delete scenario; }

/* ---- pipeline ------------------------------------------------------------ */

dmimo_status dmimo_run(const dmimo_cloud *cloud, const dmimo_dataset *dataset,
                       const char *options_json, unsigned stages, dmimo_report **out_report)
{
    if (dmimo_status s = require(dataset && out_report, "null argument"); s != DMIMO_OK)
        return s;
    *out_report = nullptr;
    return guarded([&] {
        const dmimo::RunConfig cfg =
            dmimo::run_config_from_json(options_json ? options_json : "");
        dmimo::Report rep =
            dmimo::run_pipeline(cloud ? &cloud->cloud : nullptr, dataset->geometry,
                                dataset->records, cfg, stages);
        *out_report = new dmimo_report{std::move(rep)};
    });
}

dmimo_status dmimo_report_json(const dmimo_report *report, char **out_json)
{
    if (dmimo_status s = require(report && out_json, "null argument"); s != DMIMO_OK)
        return s;
    *out_json = nullptr;
    return guarded([&] { *out_json = dup_string(dmimo::report_to_json(report->report)); });
}

dmimo_status dmimo_report_write(const dmimo_report *report, const char *out_dir,
                                unsigned artifacts)
{
    if (dmimo_status s = require(report && out_dir, "null argument"); s != DMIMO_OK)
        return s;
    return guarded([&] { dmimo::write_report(report->report, out_dir, artifacts); });
}

void dmimo_report_free(dmimo_report *report) { delete report; }

} // extern "C"
