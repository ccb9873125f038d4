/* SPDX-License-Identifier: Apache-2.0
 *
 * dmimo-mpc — multipath classification and virtual-scatterer tracking for
 * distributed massive MIMO channels
 * Copyright (C) 2025-2026 the dmimo-mpc developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of libdmimo. All objects are opaque handles created and
 * destroyed here; every fallible call returns a dmimo_status, and the
 * message of the most recent failure on the calling thread is available
 * via dmimo_last_error(). Strings returned through char** outputs are
 * heap-allocated and must be released with dmimo_string_free().
 */

#ifndef DMIMO_C_H
#define DMIMO_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmimo_status
{
    DMIMO_OK = 0,
    DMIMO_ERR_INPUT = 2,   /* invalid argument, malformed file, schema violation */
    DMIMO_ERR_NUMERIC = 3, /* non-convergence, singular matrix, degenerate data */
    DMIMO_ERR_IO = 4       /* filesystem failure */
} dmimo_status;

typedef struct dmimo_cloud dmimo_cloud;       /* point cloud (+ labels) */
typedef struct dmimo_dataset dmimo_dataset;   /* panels + route + MPC table */
typedef struct dmimo_scenario dmimo_scenario; /* synthetic-scenario config */
typedef struct dmimo_report dmimo_report;     /* pipeline results */

/* Pipeline stages for dmimo_run(); statistics imply the other two. */
enum
{
    DMIMO_STAGE_CLASSIFY = 1,
    DMIMO_STAGE_TRACK = 2,
    DMIMO_STAGE_STATS = 4,
    DMIMO_STAGE_ALL = 7
};

/* Artifact selection for dmimo_report_write(). */
enum
{
    DMIMO_OUT_REPORT_JSON = 1,
    DMIMO_OUT_FIG4 = 2,
    DMIMO_OUT_FIG6 = 4,
    DMIMO_OUT_FIG7 = 8,
    DMIMO_OUT_TAB1 = 16,
    DMIMO_OUT_DECISIONS = 32,
    DMIMO_OUT_TRACKS = 64,
    DMIMO_OUT_LIFETIMES = 128,
    DMIMO_OUT_EVERYTHING = 0xff
};

const char *dmimo_version(void);

/* Message of the last failure on this thread; empty string if none. */
const char *dmimo_last_error(void);

void dmimo_string_free(char *str);

/* ---- point cloud ------------------------------------------------------ */
dmimo_status dmimo_cloud_load_ply(const char *path, dmimo_cloud **out_cloud);
dmimo_status dmimo_cloud_save_ply(const dmimo_cloud *cloud, const char *path);
/* Replace labels by bounding-box proximity labeling. */
dmimo_status dmimo_cloud_label_regions(dmimo_cloud *cloud, double wall_margin_m);
dmimo_status dmimo_cloud_point_count(const dmimo_cloud *cloud, uint64_t *out_count);
void dmimo_cloud_free(dmimo_cloud *cloud);

/* ---- dataset ----------------------------------------------------------- */
/* elevation_convention != 0 reads the zenith column as elevation from the
 * horizon and converts on ingest. */
dmimo_status dmimo_dataset_load(const char *geometry_json_path, const char *mpc_csv_path,
                                int elevation_convention, dmimo_dataset **out_dataset);
dmimo_status dmimo_dataset_counts(const dmimo_dataset *dataset, uint64_t *out_mpcs,
                                  uint32_t *out_panels, uint32_t *out_snapshots);
void dmimo_dataset_free(dmimo_dataset *dataset);

/* ---- synthetic scenarios ------------------------------------------------ */
dmimo_status dmimo_scenario_default(dmimo_scenario **out_scenario);
dmimo_status dmimo_scenario_load(const char *path, dmimo_scenario **out_scenario);
/* 0 keeps the seed stored in the scenario file. */
dmimo_status dmimo_scenario_set_seed(dmimo_scenario *scenario, uint64_t seed);
/* Writes cloud.ply, geometry.json, mpcs.csv, truth.csv, scenario.json. */
dmimo_status dmimo_scenario_synthesize(const dmimo_scenario *scenario, const char *out_dir);
void dmimo_scenario_free(dmimo_scenario *scenario);

/* ---- pipeline ------------------------------------------------------------ */
/* options_json: configuration object (NULL or "" for defaults); see the
 * README for the schema. `cloud` may be NULL when classification is not
 * among the requested stages. */
dmimo_status dmimo_run(const dmimo_cloud *cloud, const dmimo_dataset *dataset,
                       const char *options_json, unsigned stages, dmimo_report **out_report);

dmimo_status dmimo_report_json(const dmimo_report *report, char **out_json);
dmimo_status dmimo_report_write(const dmimo_report *report, const char *out_dir,
                                unsigned artifacts);
void dmimo_report_free(dmimo_report *report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DMIMO_C_H */
