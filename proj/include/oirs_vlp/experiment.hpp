// SPDX-License-Identifier: Apache-2.0
//
// oirs-vlp: visible light positioning with steerable optical reflectors
// Copyright (C) 2026 The oirs-vlp authors
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

#include "oirs_vlp/csv.hpp"
#include "oirs_vlp/localization.hpp"
#include "oirs_vlp/scene.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace oirs
{
    // Worker count: explicit override if set (> 0), else OIRS_VLP_THREADS, else hardware threads.
    std::size_t worker_count();
    void set_worker_count(std::size_t n);

    // Runs body(i) for i in [0, n) on the worker pool. Callers write results by index, which keeps
    // every reduction independent of scheduling.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

    // Compensated NLoS SNR of element n: (R p h_n)^2 / sigma_n^2, linear.
    double nlos_snr(const Scene &scene, std::size_t n);

    Power power_for_target_snr(const Scene &scene, double target_db, const std::vector<bool> &activation);
    Power power_for_target_nlos_snr(const Scene &scene, std::size_t n, double target_db);

    enum class Layout
    {
        Single,      // one mirror at the centre of the y = 0 wall
        WallsCenter, // N = 4, one per wall
        TwoPerWall,  // N = 8
        ThreePerWall // N = 12
    };

    std::vector<OirsElement> oirs_layout(Layout layout, const Vec3 &room, const OirsElement &prototype);
    Layout layout_for_count(std::size_t n);

    enum class SweepVariable
    {
        SnrDb,
        AzimuthDeg,
        HorizontalM
    };

    const char *to_string(SweepVariable v);

    struct SweepSpec
    {
        SweepVariable variable = SweepVariable::SnrDb;
        std::vector<double> values;
        std::size_t trials = 10000;
        std::uint64_t seed = 1;
        std::size_t K = 1;    // LoS samples
        std::size_t K_n = 0;  // NLoS samples of element 0; 0 selects a LoS-only sweep
        bool steered = false; // NLoS: mirror steered at the true PD instead of its rest orientation
        double arc_radius_m = 2.5;
        GridSpec grid;
    };

    struct SweepRow
    {
        double value = 0.0;
        double rmse_ml = 0.0;
        double rmse_rml = 0.0;
        double bound = 0.0;
        std::size_t used = 0;
        std::size_t dropped = 0;
    };

    struct SweepResult
    {
        SweepVariable variable = SweepVariable::SnrDb;
        std::vector<SweepRow> rows;

        CsvTable table() const;
    };

    // The scene supplies physics, the PD position (SNR sweeps), the power (geometry sweeps) and
    // element 0 as the mirror under test.
    SweepResult run_rmse_sweep(const Scene &scene, const SweepSpec &spec);

    // PD position used by the geometry sweeps for one abscissa value.
    Vec3 sweep_position(const OirsElement &elem, SweepVariable variable, double value, double arc_radius_m);

    struct LocalizationRow
    {
        std::size_t outer_iter = 0;
        double rmse = 0.0;
        double peb = 0.0;
        std::string method;
        std::size_t used = 0;
        std::size_t dropped = 0;
    };

    // Runs the configured weighting and the unweighted variant on identical random streams.
    std::vector<LocalizationRow> run_localization_sweep(const Scene &scene, const LocalizationConfig &cfg,
                                                        std::size_t trials, std::uint64_t seed);

    CsvTable localization_table(const std::vector<LocalizationRow> &rows);

    struct CoverageCell
    {
        double x = 0.0;
        double y = 0.0;
        std::size_t visible = 0; // links visible at the rest orientation
        double peb = 0.0;
        double rmse = 0.0;       // NaN when no trials were requested or all were dropped
        std::string blank_reason;

        bool blank() const { return !blank_reason.empty(); }
    };

    struct CoverageMap
    {
        double resolution = 0.05;
        std::size_t n_oirs = 0;
        std::vector<CoverageCell> cells;

        double coverage_fraction() const;
        CsvTable table() const;
    };

    // Visibility uses the mirrors' rest orientation; the bound is taken with every visible mirror
    // steered at the cell. trials = 0 skips the Monte Carlo RMSE.
    CoverageMap run_coverage_map(const Scene &scene, double resolution_m, std::size_t trials,
                                 const LocalizationConfig &cfg, std::uint64_t seed);

    struct ExperimentOptions
    {
        Scene base;                       // physics, room, LED, PD and power from the config
        std::uint64_t seed = 1;
        std::optional<std::size_t> trials;
        bool paper_scale = false;
        LocalizationConfig loc;
        std::size_t nlos_los_samples = 50; // LoS samples preceding each NLoS batch in figs 3-5
    };

    struct NamedTable
    {
        std::string name;
        CsvTable table;
    };

    const std::vector<std::string> &preset_names();

    std::vector<NamedTable> replicate(const std::string &preset, const ExperimentOptions &opt);
}
