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
// Command-line front end. Talks to libdmimo exclusively through the C API.
//
//   dmimo synth     scenario -> cloud.ply + geometry.json + mpcs.csv + truth.csv
//   dmimo classify  bounce-order labels + per-link ratios
//   dmimo track     VS tracks + mechanism labels
//   dmimo stats     model fits, surface distribution, lifetimes
//   dmimo run       full pipeline, report.json + all figure CSVs
//
// Exit codes: 0 ok, 2 input error, 3 numeric failure, 4 I/O error.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmimo/dmimo_c.h"

namespace
{

using nlohmann::json;

struct CommonOptions
{
    std::string cloud_path;
    std::string geometry_path;
    std::string mpcs_path;
    std::string config_path;
    std::string out_dir;
    bool elevation_convention = false;

    // Flag overrides; only emitted into the config when the user set them.
    CLI::Option *opt_threshold = nullptr;
    double threshold_m = 1.5;
    CLI::Option *opt_march_step = nullptr;
    double march_step_m = 0.05;
    CLI::Option *opt_capture = nullptr;
    double capture_radius_m = 0.10;
    CLI::Option *opt_min_support = nullptr;
    int min_support = 5;
    CLI::Option *opt_infeasible = nullptr;
    std::string infeasible_policy = "multi";
    CLI::Option *opt_gate = nullptr;
    double gate_m = 1.0;
    CLI::Option *opt_confirm = nullptr;
    int confirm_min_panels = 3;
    CLI::Option *opt_q = nullptr;
    double process_noise_m2 = 0.0025;
    CLI::Option *opt_r = nullptr;
    double measurement_noise_m2 = 0.09;
    CLI::Option *opt_m0 = nullptr;
    double initial_covariance_m2 = 0.09;
    CLI::Option *opt_voxel = nullptr;
    double voxel_size_m = 0.10;
    CLI::Option *opt_margin = nullptr;
    double wall_margin_m = 0.15;
    CLI::Option *opt_horizontal = nullptr;
    bool horizontal_distance = false;
    CLI::Option *opt_threads = nullptr;
    unsigned threads = 0;
    CLI::Option *opt_seed = nullptr;
    std::uint64_t seed = 1;
};

void add_input_options(CLI::App *cmd, CommonOptions &opt, bool needs_cloud)
{
    if (needs_cloud)
        cmd->add_option("--cloud", opt.cloud_path, "environment point cloud (ASCII PLY)")
            ->required();
    cmd->add_option("--geometry", opt.geometry_path, "panel/route geometry (JSON)")->required();
    cmd->add_option("--mpcs", opt.mpcs_path, "MPC table (CSV)")->required();
    cmd->add_flag("--elevation-convention", opt.elevation_convention,
                  "zenith column holds elevation from horizon; convert on read");
    cmd->add_option("--config", opt.config_path, "full run configuration (JSON file)");
}

void add_tuning_options(CLI::App *cmd, CommonOptions &opt)
{
    opt.opt_threshold =
        cmd->add_option("--threshold", opt.threshold_m, "single/multi mismatch threshold [m]");
    opt.opt_march_step = cmd->add_option("--march-step", opt.march_step_m, "ray march step [m]");
    opt.opt_capture =
        cmd->add_option("--capture-radius", opt.capture_radius_m, "march capture radius [m]");
    opt.opt_min_support =
        cmd->add_option("--min-support", opt.min_support, "min points for a valid hit");
    opt.opt_infeasible = cmd->add_option("--infeasible-policy", opt.infeasible_policy,
                                         "label for infeasible hypotheses: multi|indeterminate");
    opt.opt_gate = cmd->add_option("--gate", opt.gate_m, "association gate [m]");
    opt.opt_confirm = cmd->add_option("--confirm-min-panels", opt.confirm_min_panels,
                                      "panels needed to confirm a track");
    opt.opt_q = cmd->add_option("--process-noise", opt.process_noise_m2, "Kalman Q scale [m^2]");
    opt.opt_r =
        cmd->add_option("--measurement-noise", opt.measurement_noise_m2, "Kalman R scale [m^2]");
    opt.opt_m0 = cmd->add_option("--initial-covariance", opt.initial_covariance_m2,
                                 "new-track covariance scale [m^2]");
    opt.opt_voxel = cmd->add_option("--voxel-size", opt.voxel_size_m, "spatial index cell [m]");
    opt.opt_margin =
        cmd->add_option("--wall-margin", opt.wall_margin_m, "bbox labeling margin [m]");
    opt.opt_horizontal = cmd->add_flag("--horizontal-distance", opt.horizontal_distance,
                                       "use xy-plane UE-panel distances in fits");
    opt.opt_threads = cmd->add_option("--threads", opt.threads, "worker threads (0 = all)");
}

// Assembles the options JSON: --config file first, explicit flags override.
std::string build_config(const CommonOptions &opt)
{
    json cfg = json::object();
    if (!opt.config_path.empty())
    {
        std::FILE *f = std::fopen(opt.config_path.c_str(), "rb");
        if (!f)
        {
            std::fprintf(stderr, "error: cannot open config '%s'\n", opt.config_path.c_str());
            std::exit(4);
        }
        std::string text;
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0)
            text.append(buf, n);
        std::fclose(f);
        try
        {
            cfg = json::parse(text);
        }
        catch (const json::exception &e)
        {
            std::fprintf(stderr, "error: config '%s' is not valid JSON: %s\n",
                         opt.config_path.c_str(), e.what());
            std::exit(2);
        }
    }

    auto set = [&cfg](const char *section, const char *key, json value) {
        if (section)
            cfg[section][key] = std::move(value);
        else
            cfg[key] = std::move(value);
    };
    if (opt.opt_threshold && *opt.opt_threshold)
        set("classifier", "threshold_m", opt.threshold_m);
    if (opt.opt_march_step && *opt.opt_march_step)
        set("classifier", "march_step_m", opt.march_step_m);
    if (opt.opt_capture && *opt.opt_capture)
        set("classifier", "capture_radius_m", opt.capture_radius_m);
    if (opt.opt_min_support && *opt.opt_min_support)
        set("classifier", "min_support", opt.min_support);
    if (opt.opt_infeasible && *opt.opt_infeasible)
        set("classifier", "infeasible_policy", opt.infeasible_policy);
    if (opt.opt_gate && *opt.opt_gate)
        set("tracker", "gate_m", opt.gate_m);
    if (opt.opt_confirm && *opt.opt_confirm)
        set("tracker", "confirm_min_panels", opt.confirm_min_panels);
    if (opt.opt_q && *opt.opt_q)
        set("tracker", "process_noise_m2", opt.process_noise_m2);
    if (opt.opt_r && *opt.opt_r)
        set("tracker", "measurement_noise_m2", opt.measurement_noise_m2);
    if (opt.opt_m0 && *opt.opt_m0)
        set("tracker", "initial_covariance_m2", opt.initial_covariance_m2);
    if (opt.opt_voxel && *opt.opt_voxel)
        set(nullptr, "voxel_size_m", opt.voxel_size_m);
    if (opt.opt_margin && *opt.opt_margin)
        set(nullptr, "wall_margin_m", opt.wall_margin_m);
    if (opt.opt_horizontal && *opt.opt_horizontal)
        set("fit", "horizontal_distance", opt.horizontal_distance);
    if (opt.opt_threads && *opt.opt_threads)
        set(nullptr, "threads", opt.threads);
    if (opt.opt_seed && *opt.opt_seed)
        set(nullptr, "seed", opt.seed);
    return cfg.dump();
}

int fail(dmimo_status status, const char *stage)
{
    std::fprintf(stderr, "error (%s): %s\n", stage, dmimo_last_error());
    return static_cast<int>(status);
}

struct CloudHandle
{
    dmimo_cloud *ptr = nullptr;
    ~CloudHandle() { dmimo_cloud_free(ptr); }
};
struct DatasetHandle
{
    dmimo_dataset *ptr = nullptr;
    ~DatasetHandle() { dmimo_dataset_free(ptr); }
};
struct ReportHandle
{
    dmimo_report *ptr = nullptr;
    ~ReportHandle() { dmimo_report_free(ptr); }
};
struct ScenarioHandle
{
    dmimo_scenario *ptr = nullptr;
    ~ScenarioHandle() { dmimo_scenario_free(ptr); }
};

int run_stage(const CommonOptions &opt, unsigned stages, unsigned outputs, bool needs_cloud)
{
    CloudHandle cloud;
    if (needs_cloud)
    {
        if (dmimo_status s = dmimo_cloud_load_ply(opt.cloud_path.c_str(), &cloud.ptr);
            s != DMIMO_OK)
            return fail(s, "cloud");
        uint64_t n = 0;
        dmimo_cloud_point_count(cloud.ptr, &n);
        std::printf("loaded %llu cloud points\n", static_cast<unsigned long long>(n));
    }

    DatasetHandle dataset;
    if (dmimo_status s =
            dmimo_dataset_load(opt.geometry_path.c_str(), opt.mpcs_path.c_str(),
                               opt.elevation_convention ? 1 : 0, &dataset.ptr);
        s != DMIMO_OK)
        return fail(s, "dataset");
    uint64_t n_mpcs = 0;
    uint32_t n_panels = 0, n_snapshots = 0;
    dmimo_dataset_counts(dataset.ptr, &n_mpcs, &n_panels, &n_snapshots);
    std::printf("loaded %llu MPCs over %u panels x %u snapshots\n",
                static_cast<unsigned long long>(n_mpcs), n_panels, n_snapshots);

    const std::string config = build_config(opt);
    ReportHandle report;
    if (dmimo_status s = dmimo_run(cloud.ptr, dataset.ptr, config.c_str(), stages, &report.ptr);
        s != DMIMO_OK)
        return fail(s, "pipeline");

    if (dmimo_status s = dmimo_report_write(report.ptr, opt.out_dir.c_str(), outputs);
        s != DMIMO_OK)
        return fail(s, "write");
    std::printf("wrote results to %s\n", opt.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"multipath bounce classification and virtual-scatterer tracking"};
    app.require_subcommand(1);

    // ---- synth ----
    auto *synth = app.add_subcommand("synth", "generate a synthetic scenario dataset");
    std::string scenario_path, synth_out;
    std::uint64_t synth_seed = 0;
    synth->add_option("--scenario", scenario_path, "scenario config (JSON); omit for default");
    auto *synth_seed_opt =
        synth->add_option("--seed", synth_seed, "override the scenario seed");
    synth->add_option("--out", synth_out, "output directory")->required();

    // ---- pipeline stages ----
    CommonOptions classify_opt, track_opt, stats_opt, run_opt;

    auto *classify = app.add_subcommand("classify", "label MPCs single/multi bounce");
    add_input_options(classify, classify_opt, true);
    add_tuning_options(classify, classify_opt);
    classify->add_option("--out", classify_opt.out_dir, "output directory")->required();

    auto *track = app.add_subcommand("track", "track virtual scatterers across panels");
    add_input_options(track, track_opt, false);
    add_tuning_options(track, track_opt);
    track->add_option("--out", track_opt.out_dir, "output directory")->required();

    auto *stats = app.add_subcommand("stats", "fit models and aggregate distributions");
    add_input_options(stats, stats_opt, true);
    add_tuning_options(stats, stats_opt);
    stats->add_option("--out", stats_opt.out_dir, "output directory")->required();

    auto *run = app.add_subcommand("run", "full pipeline with all artifacts");
    add_input_options(run, run_opt, true);
    add_tuning_options(run, run_opt);
    run_opt.opt_seed = run->add_option("--seed", run_opt.seed, "run seed")->required();
    run->add_option("--out", run_opt.out_dir, "output directory")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (synth->parsed())
    {
        ScenarioHandle scenario;
        dmimo_status s = scenario_path.empty()
                             ? dmimo_scenario_default(&scenario.ptr)
                             : dmimo_scenario_load(scenario_path.c_str(), &scenario.ptr);
        if (s != DMIMO_OK)
            return fail(s, "scenario");
        if (*synth_seed_opt)
            dmimo_scenario_set_seed(scenario.ptr, synth_seed);
        if ((s = dmimo_scenario_synthesize(scenario.ptr, synth_out.c_str())) != DMIMO_OK)
            return fail(s, "synth");
        std::printf("wrote synthetic dataset to %s\n", synth_out.c_str());
        return 0;
    }
    if (classify->parsed())
        return run_stage(classify_opt, DMIMO_STAGE_CLASSIFY,
                         DMIMO_OUT_DECISIONS | DMIMO_OUT_FIG4, true);
    if (track->parsed())
        return run_stage(track_opt, DMIMO_STAGE_TRACK,
                         DMIMO_OUT_TRACKS | DMIMO_OUT_FIG6 | DMIMO_OUT_LIFETIMES, false);
    if (stats->parsed())
        return run_stage(stats_opt, DMIMO_STAGE_ALL,
                         DMIMO_OUT_FIG4 | DMIMO_OUT_FIG7 | DMIMO_OUT_TAB1 | DMIMO_OUT_LIFETIMES,
                         true);
    if (run->parsed())
        return run_stage(run_opt, DMIMO_STAGE_ALL, DMIMO_OUT_EVERYTHING, true);
    return 2;
}
