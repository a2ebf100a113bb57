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
// Command-line front end: bounds, localize, sweep, coverage-map, replicate.

#include "oirs_vlp/bounds.hpp"
#include "oirs_vlp/config.hpp"
#include "oirs_vlp/csv.hpp"
#include "oirs_vlp/errors.hpp"
#include "oirs_vlp/experiment.hpp"
#include "oirs_vlp/localization.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace oirs;
namespace fs = std::filesystem;

namespace
{
    enum ExitCode
    {
        Ok = 0,
        Other = 1,
        ConfigError = 2,
        NumericalFailure = 3
    };

    struct Common
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
        std::string out;
        bool paper_scale = false;
        std::string los_estimator, nlos_estimator, weight_mode;
    };

    struct NumericalError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    Config resolve(const Common &c)
    {
        Config cfg = c.config.empty() ? parse_config("", Defaults::Enabled, "<defaults>") : load_config(c.config);
        if (c.seed)
            cfg.run.seed = *c.seed;
        if (c.trials)
        {
            if (*c.trials == 0)
                fail(ErrorKind::ValidationError, "--trials must be at least 1");
            cfg.run.trials = *c.trials;
        }
        if (!c.out.empty())
            cfg.run.out_dir = c.out;
        if (!c.los_estimator.empty())
            cfg.loc.los_estimator = parse_method(c.los_estimator);
        if (!c.nlos_estimator.empty())
            cfg.loc.nlos_estimator = parse_method(c.nlos_estimator);
        if (!c.weight_mode.empty())
            cfg.loc.weight_mode = parse_weight_mode(c.weight_mode);
        return cfg;
    }

    fs::path prepare_out(const Config &cfg, const std::string &command)
    {
        const fs::path dir = cfg.run.out_dir;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            fail(ErrorKind::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
        std::ofstream meta(dir / "run.meta", std::ios::binary | std::ios::trunc);
        meta << provenance(cfg, command);
        if (!meta)
            fail(ErrorKind::IoError, "cannot write " + (dir / "run.meta").string());
        return dir;
    }

    void write(const CsvTable &t, const fs::path &dir, const std::string &name)
    {
        emit_csv(t, dir / (name + ".csv"));
        std::cout << "wrote " << (dir / (name + ".csv")).string() << '\n';
    }

    // "a:b:step" or "v1,v2,..."
    std::vector<double> parse_values(const std::string &text)
    {
        std::vector<double> out;
        auto number = [&](const std::string &tok)
        {
            std::size_t pos = 0;
            double v = 0.0;
            try
            {
                v = std::stod(tok, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != tok.size())
                fail(ErrorKind::ValidationError, "bad number '" + tok + "' in --values");
            return v;
        };
        if (text.find(':') != std::string::npos)
        {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            for (std::string p; std::getline(ss, p, ':');)
                parts.push_back(p);
            if (parts.size() != 3)
                fail(ErrorKind::ValidationError, "--values range must be from:to:step");
            const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
            if (!(step > 0.0) || b < a)
                fail(ErrorKind::ValidationError, "--values range needs step > 0 and to >= from");
            for (long i = 0; a + static_cast<double>(i) * step <= b + 1e-9 * step; ++i)
                out.push_back(a + static_cast<double>(i) * step);
            return out;
        }
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');)
            out.push_back(number(p));
        return out;
    }

    int run_bounds(const Config &cfg)
    {
        const fs::path dir = prepare_out(cfg, "bounds");
        for (const auto &[k, v] : derived_constants(cfg.scene))
            std::cout << k << " = " << v << '\n';

        // Mirrors steered at the true PD; links that stay invisible are left out of the bound.
        Scene s = steer_toward(with_activation(cfg.scene, std::nullopt), cfg.scene.pd);
        const double d = (s.led - s.pd).norm();
        CsvTable t;
        t.header = {"link", "distance_m", "deb_m"};
        t.rows.push_back({std::string("los"), d, deb(fim_los(d, cfg.loc.K, s))});

        std::vector<OirsElement> visible;
        const double mu0 = los_mean(s);
        const NoiseCoefficients nc = noise_coefficients(s);
        for (std::size_t n = 0; n < s.size(); ++n)
        {
            const std::string name = "oirs_" + std::to_string(n + 1);
            if (!link_visible(s, n))
            {
                t.rows.push_back({name, std::string(), std::string()});
                continue;
            }
            const auto &e = s.oirs[n];
            const Vec3 r = reflection_point(s.led, s.pd, e).point;
            const double dn = (r - s.pd).norm();
            t.rows.push_back({name, dn, deb(fim_nlos(dn, nlos_coefficient(s, r, e.reflectivity), cfg.loc.K_n, mu0, nc))});
            visible.push_back(e);
        }
        int code = Ok;
        if (visible.size() >= 2)
        {
            s.oirs = visible;
            try
            {
                t.rows.push_back({std::string("peb"), std::string(),
                                  peb(s, cfg.loc.K, std::vector<std::size_t>(s.size(), cfg.loc.K_n)).peb});
            }
            catch (const Error &e)
            {
                if (e.kind() != ErrorKind::SingularGeometry)
                    throw;
                std::cerr << "error: " << e.what() << '\n';
                code = NumericalFailure;
            }
        }
        else
        {
            std::cerr << "error: fewer than two visible OIRS links, no position bound\n";
            code = NumericalFailure;
        }
        write(t, dir, "bounds");
        return code;
    }

    int run_localize(const Config &cfg)
    {
        const fs::path dir = prepare_out(cfg, "localize");
        const std::size_t trials = cfg.run.trials;
        const Scene scene = with_activation(cfg.scene, std::nullopt);

        struct Outcome
        {
            bool ok = false;
            LocalizationRun run;
            std::string reason;
        };
        std::vector<Outcome> out(trials);
        parallel_for(trials, [&](std::size_t t)
        {
            try
            {
                out[t].run = run_algorithm1(scene, cfg.loc, cfg.run.seed, t);
                out[t].ok = true;
            }
            catch (const Error &e)
            {
                if (e.kind() == ErrorKind::ValidationError || e.kind() == ErrorKind::Precondition)
                    throw;
                out[t].reason = to_string(e.kind());
            }
        });

        CsvTable t;
        t.header = {"trial", "x_hat_m", "y_hat_m", "error_m", "outer_iterations", "dropped_links", "status"};
        double ss = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < trials; ++i)
        {
            const auto id = static_cast<std::int64_t>(i);
            if (!out[i].ok)
            {
                t.rows.push_back({id, std::string(), std::string(), std::string(), std::string(), std::string(),
                                  "dropped:" + out[i].reason});
                continue;
            }
            const auto &run = out[i].run;
            const double err = (run.final_position - scene.pd).norm();
            std::int64_t dropped = 0;
            for (const auto &it : run.outer_iterations)
                dropped += static_cast<std::int64_t>(it.dropped_links.size());
            t.rows.push_back({id, run.final_position.x(), run.final_position.y(), err,
                              static_cast<std::int64_t>(run.outer_iterations.size()), dropped, std::string("ok")});
            ss += err * err;
            ++used;
        }
        write(t, dir, "localize");
        if (used == 0)
        {
            std::cerr << "error: every trial was dropped\n";
            return NumericalFailure;
        }
        std::cout << "rmse_m = " << format_number(std::sqrt(ss / static_cast<double>(used))) << " over " << used
                  << " of " << trials << " trials\n";
        return Ok;
    }

    struct SweepArgs
    {
        std::string variable = "snr_db";
        std::string values;
        std::size_t k = 1;
        std::size_t kn = 0;
        bool steered = false;
    };

    int run_sweep(const Config &cfg, const SweepArgs &a)
    {
        SweepSpec spec;
        if (a.variable == "snr_db")
            spec.variable = SweepVariable::SnrDb;
        else if (a.variable == "azimuth_deg")
            spec.variable = SweepVariable::AzimuthDeg;
        else if (a.variable == "horizontal_m")
            spec.variable = SweepVariable::HorizontalM;
        else
            fail(ErrorKind::ValidationError, "--variable must be snr_db, azimuth_deg or horizontal_m");
        if (a.values.empty())
            fail(ErrorKind::ValidationError, "--values is required");
        spec.values = parse_values(a.values);
        spec.trials = cfg.run.trials;
        spec.seed = cfg.run.seed;
        spec.K = a.k;
        spec.K_n = a.kn;
        spec.steered = a.steered;
        spec.grid = cfg.loc.grid;

        const fs::path dir = prepare_out(cfg, "sweep " + a.variable);
        const SweepResult r = run_rmse_sweep(cfg.scene, spec);
        write(r.table(), dir, "sweep_" + a.variable);
        for (const auto &row : r.rows)
            if (row.used == 0)
            {
                std::cerr << "error: every trial was dropped at " << a.variable << " = " << format_number(row.value)
                          << '\n';
                return NumericalFailure;
            }
        return Ok;
    }

    int run_coverage(const Config &cfg, std::optional<double> resolution, bool paper_scale,
                     std::optional<std::size_t> trials)
    {
        const double res = resolution ? *resolution : paper_scale ? 0.001 : cfg.coverage_resolution_m;
        const fs::path dir = prepare_out(cfg, "coverage-map");
        const CoverageMap map = run_coverage_map(cfg.scene, res, trials.value_or(1000), cfg.loc, cfg.run.seed);
        write(map.table(), dir, "coverage");
        std::cout << "coverage_fraction = " << format_number(map.coverage_fraction()) << '\n';
        return Ok;
    }

    int run_replicate(const Config &cfg, const std::string &preset, bool paper_scale, std::optional<std::size_t> trials)
    {
        ExperimentOptions opt;
        opt.base = cfg.scene;
        opt.seed = cfg.run.seed;
        opt.trials = trials;
        opt.paper_scale = paper_scale;
        opt.loc = cfg.loc;
        opt.nlos_los_samples = cfg.nlos_los_samples;

        const fs::path dir = prepare_out(cfg, "replicate " + preset);
        std::vector<std::string> presets;
        if (preset == "all")
            presets = preset_names();
        else
            presets = {preset};
        for (const auto &p : presets)
            for (const auto &t : replicate(p, opt))
                write(t.table, dir, t.name);
        return Ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Visible light positioning with steerable optical reflectors"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version);

    Common common;
    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", common.config, "Config file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Master random seed");
        sub->add_option("--trials", common.trials, "Monte Carlo trials");
        sub->add_option("--out", common.out, "Output directory");
        sub->add_flag("--paper-scale", common.paper_scale, "Full paper-scale settings");
        sub->add_option("--los-estimator", common.los_estimator, "LoS estimator")->check(CLI::IsMember({"ml", "rml"}));
        sub->add_option("--nlos-estimator", common.nlos_estimator, "NLoS estimator")
            ->check(CLI::IsMember({"ml", "rml"}));
        sub->add_option("--weight-mode", common.weight_mode, "IWLS weights")
            ->check(CLI::IsMember({"inv_deb", "inv_deb_sq", "uniform"}));
    };

    auto *bounds = app.add_subcommand("bounds", "Distance and position error bounds at the configured PD");
    add_common(bounds);
    auto *localize = app.add_subcommand("localize", "Monte Carlo runs of the iterative localization loop");
    add_common(localize);

    SweepArgs sweep_args;
    auto *sweep = app.add_subcommand("sweep", "RMSE and bound against SNR, azimuth or horizontal distance");
    add_common(sweep);
    sweep->add_option("--variable", sweep_args.variable, "snr_db, azimuth_deg or horizontal_m")
        ->check(CLI::IsMember({"snr_db", "azimuth_deg", "horizontal_m"}));
    sweep->add_option("--values", sweep_args.values, "from:to:step or a comma list")->required();
    sweep->add_option("--k", sweep_args.k, "LoS samples per trial");
    sweep->add_option("--kn", sweep_args.kn, "NLoS samples per trial (0 sweeps the LoS estimators)");
    sweep->add_flag("--steered", sweep_args.steered, "Steer the mirror at the true PD");

    std::optional<double> resolution;
    auto *coverage = app.add_subcommand("coverage-map", "PEB and RMSE over the floor grid");
    add_common(coverage);
    coverage->add_option("--resolution", resolution, "Grid step in metres")->check(CLI::PositiveNumber);

    std::string preset = "all";
    auto *rep = app.add_subcommand("replicate", "Named experiment presets");
    add_common(rep);
    std::vector<std::string> choices = preset_names();
    choices.push_back("all");
    rep->add_option("--preset", preset, "fig2, fig3, fig4, fig5, fig7, fig8 or all")->check(CLI::IsMember(choices));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? Ok : ConfigError;
    }

    try
    {
        const Config cfg = resolve(common);
        if (*bounds)
            return run_bounds(cfg);
        if (*localize)
            return run_localize(cfg);
        if (*sweep)
            return run_sweep(cfg, sweep_args);
        if (*coverage)
            return run_coverage(cfg, resolution, common.paper_scale, common.trials);
        if (*rep)
            return run_replicate(cfg, preset, common.paper_scale, common.trials);
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind())
        {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError: return ConfigError;
        case ErrorKind::SingularGeometry:
        case ErrorKind::SingularNormalEquations:
        case ErrorKind::NoBracket: return NumericalFailure;
        default: return Other;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return Other;
    }
    return Ok;
}
