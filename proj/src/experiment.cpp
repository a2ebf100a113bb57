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
#include "oirs_vlp/experiment.hpp"
#include "oirs_vlp/bounds.hpp"
#include "oirs_vlp/errors.hpp"
#include "oirs_vlp/estimation.hpp"
#include "oirs_vlp/observation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace oirs
{
    namespace
    {
        std::atomic<std::size_t> worker_override{0};

        constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

        bool droppable(ErrorKind k)
        {
            return k == ErrorKind::InvalidLink || k == ErrorKind::DegenerateSample ||
                   k == ErrorKind::GridExhausted || k == ErrorKind::SingularNormalEquations ||
                   k == ErrorKind::DegenerateGeometry;
        }

        double rmse(double sum_sq, std::size_t used)
        {
            return used ? std::sqrt(sum_sq / static_cast<double>(used)) : nan_value;
        }

        Power solve_power(const Scene &scene, double target_db, const std::function<double(const Scene &)> &snr_fn)
        {
            const double eff = scene.power.efficacy_lm_per_w;
            if (std::isinf(target_db) && target_db < 0)
                return {0.0, eff};

            auto at = [&](double log_p)
            {
                Scene s = scene;
                s.power.watts = std::exp(log_p);
                return 10.0 * std::log10(snr_fn(s));
            };

            double lo = std::log(1e-6), hi = 0.0;
            int guard = 0;
            while (!(at(hi) >= target_db))
            {
                hi += std::log(10.0);
                if (++guard > 60)
                    fail(ErrorKind::NoBracket, "SNR target not reachable with finite power");
            }
            while (!(at(lo) <= target_db))
            {
                lo -= std::log(10.0);
                if (++guard > 120)
                    fail(ErrorKind::NoBracket, "SNR target below the reachable range");
            }
            double mid = 0.5 * (lo + hi);
            for (int i = 0; i < 200; ++i)
            {
                mid = 0.5 * (lo + hi);
                const double v = at(mid);
                if (std::abs(v - target_db) < 1e-11)
                    break;
                (v < target_db ? lo : hi) = mid;
            }
            return {std::exp(mid), eff};
        }

        std::vector<double> range(double from, double to, double step)
        {
            std::vector<double> v;
            const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
            for (std::size_t i = 0; i < n; ++i)
                v.push_back(from + static_cast<double>(i) * step);
            return v;
        }
    }

    std::size_t worker_count()
    {
        if (const std::size_t n = worker_override.load())
            return n;
        if (const char *env = std::getenv("OIRS_VLP_THREADS"))
        {
            char *end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end != env && *end == '\0' && v > 0)
                return v;
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    void set_worker_count(std::size_t n)
    {
        worker_override.store(n);
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body)
    {
        const std::size_t workers = std::min(worker_count(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto run = [&]
        {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(run);
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

    double nlos_snr(const Scene &scene, std::size_t n)
    {
        const double chi = nlos_mean(scene, n);
        return chi * chi / noise_coefficients(scene).variance(los_mean(scene) + chi);
    }

    Power power_for_target_snr(const Scene &scene, double target_db, const std::vector<bool> &activation)
    {
        return solve_power(scene, target_db, [&](const Scene &s) { return snr(s, activation); });
    }

    Power power_for_target_nlos_snr(const Scene &scene, std::size_t n, double target_db)
    {
        return solve_power(scene, target_db, [&](const Scene &s) { return nlos_snr(s, n); });
    }

    std::vector<OirsElement> oirs_layout(Layout layout, const Vec3 &room, const OirsElement &prototype)
    {
        std::vector<double> offsets;
        switch (layout)
        {
        case Layout::Single:
        case Layout::WallsCenter: offsets = {0.0}; break;
        case Layout::TwoPerWall: offsets = {-0.5, 0.5}; break;
        case Layout::ThreePerWall: offsets = {-1.0, 0.0, 1.0}; break;
        }
        const double X = room.x(), Y = room.y(), z = 0.5 * room.z();

        std::vector<OirsElement> out;
        auto add = [&](const Vec3 &center, const Vec3 &normal)
        {
            OirsElement e = prototype;
            e.center = center;
            e.wall_normal = normal;
            e.alpha = e.beta = 0.0;
            e.active = false;
            out.push_back(e);
        };
        for (double o : offsets)
            add({0.5 * X + o, 0.0, z}, Vec3::UnitY());
        if (layout == Layout::Single)
            return out;
        for (double o : offsets)
            add({0.5 * X + o, Y, z}, -Vec3::UnitY());
        for (double o : offsets)
            add({0.0, 0.5 * Y + o, z}, Vec3::UnitX());
        for (double o : offsets)
            add({X, 0.5 * Y + o, z}, -Vec3::UnitX());
        return out;
    }

    Layout layout_for_count(std::size_t n)
    {
        switch (n)
        {
        case 1: return Layout::Single;
        case 4: return Layout::WallsCenter;
        case 8: return Layout::TwoPerWall;
        case 12: return Layout::ThreePerWall;
        }
        fail(ErrorKind::ValidationError, "no built-in layout with " + std::to_string(n) + " elements (use 1, 4, 8 or 12)");
    }

    const char *to_string(SweepVariable v)
    {
        switch (v)
        {
        case SweepVariable::SnrDb: return "snr_db";
        case SweepVariable::AzimuthDeg: return "azimuth_deg";
        case SweepVariable::HorizontalM: return "horizontal_m";
        }
        return "value";
    }

    CsvTable SweepResult::table() const
    {
        CsvTable t;
        t.header = {to_string(variable), "rmse_ml_m", "rmse_rml_m", "deb_m", "trials_used", "trials_dropped"};
        for (const auto &r : rows)
            t.rows.push_back({r.value, r.rmse_ml, r.rmse_rml, r.bound, static_cast<std::int64_t>(r.used),
                              static_cast<std::int64_t>(r.dropped)});
        return t;
    }

    Vec3 sweep_position(const OirsElement &elem, SweepVariable variable, double value, double arc_radius_m)
    {
        const Vec3 h = elem.wall_axis(), n0 = elem.wall_normal;
        Vec3 u = elem.center;
        if (variable == SweepVariable::AzimuthDeg)
        {
            const double az = value * std::numbers::pi / 180.0;
            u += arc_radius_m * (std::cos(az) * h + std::sin(az) * n0);
        }
        else
            u += value * n0;
        u.z() = 0.0;
        return u;
    }

    SweepResult run_rmse_sweep(const Scene &scene, const SweepSpec &spec)
    {
        if (spec.values.empty() || spec.trials == 0 || spec.K == 0)
            fail(ErrorKind::ValidationError, "sweep needs values, trials >= 1 and K >= 1");
        for (std::size_t i = 1; i < spec.values.size(); ++i)
            if (!(spec.values[i] > spec.values[i - 1]))
                fail(ErrorKind::ValidationError, "sweep values must be strictly increasing");
        const bool los_only = spec.K_n == 0;
        if (los_only && spec.variable != SweepVariable::SnrDb)
            fail(ErrorKind::ValidationError, "geometry sweeps need NLoS samples (K_n >= 1)");
        if (!los_only && scene.oirs.empty())
            fail(ErrorKind::ValidationError, "NLoS sweep needs an OIRS element");

        const double m = lambertian_order(scene);
        const NoiseCoefficients nc = noise_coefficients(scene);
        GridSpec grid = spec.grid;
        if (!(grid.hi > grid.lo))
            grid.hi = scene.room.norm();

        SweepResult result;
        result.variable = spec.variable;
        for (std::size_t row = 0; row < spec.values.size(); ++row)
        {
            const double value = spec.values[row];
            Scene s = with_activation(scene, std::nullopt);
            if (!los_only)
            {
                s.oirs = {scene.oirs.front()};
                s.oirs[0].active = false;
                if (spec.variable != SweepVariable::SnrDb)
                    s.pd = sweep_position(s.oirs[0], spec.variable, value, spec.arc_radius_m);
                s = spec.steered ? steer_toward(s, s.pd) : rest_orientation(s);
            }
            if (spec.variable == SweepVariable::SnrDb)
                s.power = los_only ? power_for_target_snr(s, value, {}) : power_for_target_nlos_snr(s, 0, value);

            const LosCoefficient xi = los_coefficient(s);
            const double d = (s.led - s.pd).norm();
            double truth = d, bound = nan_value;
            NlosCoefficient coeff_w;
            if (los_only)
                bound = deb(fim_los(d, spec.K, xi, nc, m));
            else
            {
                const auto &e = s.oirs[0];
                truth = (e.center - s.pd).norm();
                coeff_w = nlos_coefficient(s, e.center, e.reflectivity);
                if (link_visible(s, 0))
                {
                    const Vec3 r = reflection_point(s.led, s.pd, e).point;
                    const NlosCoefficient c = nlos_coefficient(s, r, e.reflectivity);
                    bound = deb(fim_nlos((r - s.pd).norm(), c, spec.K_n, los_mean(s), nc));
                }
            }

            // err[t] = {ml error, rml error}; NaN marks a dropped trial
            std::vector<std::array<double, 2>> err(spec.trials);
            const Scene active = los_only ? s : with_activation(s, 0);
            parallel_for(spec.trials, [&](std::size_t t)
            {
                const std::uint64_t id = row * spec.trials + t;
                try
                {
                    const SufficientStats st = sufficient_stats(sample_los(s, spec.K, CounterRng(spec.seed, id, 0)).samples);
                    const double d_ml = ml_los(st, xi, nc, m).value;
                    const double d_rml = rml_los(st, xi, m).value;
                    if (los_only)
                    {
                        err[t] = {d_ml - truth, d_rml - truth};
                        return;
                    }
                    const ObservationBatch b = sample_nlos(active, 0, spec.K_n, CounterRng(spec.seed, id, 1));
                    const SufficientStats chi_ml = sufficient_stats(subtract_los(b, d_ml, xi.xi, m).samples);
                    const SufficientStats chi_rml = sufficient_stats(subtract_los(b, d_rml, xi.xi, m).samples);
                    const double dn_ml = ml_nlos(chi_ml, coeff_w, d_ml, xi, nc, m, grid).value;
                    const double dn_rml = rml_nlos(chi_rml, coeff_w).value;
                    err[t] = {dn_ml - truth, dn_rml - truth};
                }
                catch (const Error &e)
                {
                    if (!droppable(e.kind()))
                        throw;
                    err[t] = {nan_value, nan_value};
                }
            });

            SweepRow r;
            r.value = value;
            r.bound = bound;
            double ss_ml = 0.0, ss_rml = 0.0;
            for (const auto &e : err)
            {
                if (std::isnan(e[0]) || std::isnan(e[1]))
                {
                    ++r.dropped;
                    continue;
                }
                ++r.used;
                ss_ml += e[0] * e[0];
                ss_rml += e[1] * e[1];
            }
            r.rmse_ml = rmse(ss_ml, r.used);
            r.rmse_rml = rmse(ss_rml, r.used);
            result.rows.push_back(r);
        }
        return result;
    }

    std::vector<LocalizationRow> run_localization_sweep(const Scene &scene, const LocalizationConfig &cfg,
                                                        std::size_t trials, std::uint64_t seed)
    {
        if (trials == 0 || cfg.outer_max == 0)
            fail(ErrorKind::ValidationError, "localization sweep needs trials >= 1 and outer_max >= 1");
        const std::size_t N = scene.size();
        const Scene rest = rest_orientation(with_activation(scene, std::nullopt));

        double bound = nan_value;
        try
        {
            bound = peb(steer_toward(rest, scene.pd), cfg.K, std::vector<std::size_t>(N, cfg.K_n)).peb;
        }
        catch (const Error &e)
        {
            if (e.kind() != ErrorKind::SingularGeometry && e.kind() != ErrorKind::InvalidLink)
                throw;
        }

        std::vector<LocalizationRow> rows;
        const std::pair<WeightMode, const char *> variants[] = {{cfg.weight_mode, "iwls"},
                                                                {WeightMode::Uniform, "ils"}};
        for (const auto &[mode, name] : variants)
        {
            LocalizationConfig c = cfg;
            c.weight_mode = mode;
            // err[t][i] is the position error after outer iteration i (carried forward after an early stop)
            std::vector<std::vector<double>> err(trials);
            parallel_for(trials, [&](std::size_t t)
            {
                try
                {
                    const LocalizationRun run = run_algorithm1(rest, c, seed, t);
                    std::vector<double> e(cfg.outer_max);
                    for (std::size_t i = 0; i < cfg.outer_max; ++i)
                    {
                        const auto &it = run.outer_iterations[std::min(i, run.outer_iterations.size() - 1)];
                        e[i] = (it.position - scene.pd).norm();
                    }
                    err[t] = std::move(e);
                }
                catch (const Error &e)
                {
                    if (!droppable(e.kind()))
                        throw;
                }
            });

            for (std::size_t i = 0; i < cfg.outer_max; ++i)
            {
                LocalizationRow r;
                r.outer_iter = i + 1;
                r.method = name;
                r.peb = bound;
                double ss = 0.0;
                for (const auto &e : err)
                {
                    if (e.empty())
                    {
                        ++r.dropped;
                        continue;
                    }
                    ++r.used;
                    ss += e[i] * e[i];
                }
                r.rmse = rmse(ss, r.used);
                rows.push_back(r);
            }
        }
        return rows;
    }

    CsvTable localization_table(const std::vector<LocalizationRow> &rows)
    {
        CsvTable t;
        t.header = {"outer_iter", "rmse_m", "peb_m", "method", "trials_used", "trials_dropped"};
        for (const auto &r : rows)
            t.rows.push_back({static_cast<std::int64_t>(r.outer_iter), r.rmse, r.peb, r.method,
                              static_cast<std::int64_t>(r.used), static_cast<std::int64_t>(r.dropped)});
        return t;
    }

    double CoverageMap::coverage_fraction() const
    {
        if (cells.empty())
            return 0.0;
        std::size_t covered = 0;
        for (const auto &c : cells)
            covered += c.blank() ? 0 : 1;
        return static_cast<double>(covered) / static_cast<double>(cells.size());
    }

    CsvTable CoverageMap::table() const
    {
        CsvTable t;
        t.header = {"x_m", "y_m", "visible_links", "peb_m", "rmse_m", "blank_reason"};
        for (const auto &c : cells)
        {
            if (c.blank())
                t.rows.push_back({c.x, c.y, static_cast<std::int64_t>(c.visible), std::string(), std::string(),
                                  c.blank_reason});
            else
                t.rows.push_back({c.x, c.y, static_cast<std::int64_t>(c.visible), c.peb,
                                  std::isnan(c.rmse) ? CsvCell(std::string()) : CsvCell(c.rmse), std::string()});
        }
        return t;
    }

    CoverageMap run_coverage_map(const Scene &scene, double resolution_m, std::size_t trials,
                                 const LocalizationConfig &cfg, std::uint64_t seed)
    {
        if (!(resolution_m > 0.0))
            fail(ErrorKind::ValidationError, "coverage resolution must be positive");
        if (scene.size() < 2)
            fail(ErrorKind::ValidationError, "coverage map needs at least two OIRS elements");

        const Scene rest = rest_orientation(with_activation(scene, std::nullopt));
        const auto nx = static_cast<std::size_t>(std::floor(scene.room.x() / resolution_m + 1e-9));
        const auto ny = static_cast<std::size_t>(std::floor(scene.room.y() / resolution_m + 1e-9));

        CoverageMap map;
        map.resolution = resolution_m;
        map.n_oirs = scene.size();
        map.cells.resize(nx * ny);

        parallel_for(nx * ny, [&](std::size_t idx)
        {
            CoverageCell &cell = map.cells[idx];
            cell.x = (static_cast<double>(idx % nx) + 0.5) * resolution_m;
            cell.y = (static_cast<double>(idx / nx) + 0.5) * resolution_m;
            cell.rmse = nan_value;
            Scene s = rest;
            s.pd = Vec3(cell.x, cell.y, 0.0);
            for (std::size_t n = 0; n < s.size(); ++n)
                cell.visible += link_visible(s, n) ? 1 : 0;
            if (cell.visible < 2)
            {
                cell.blank_reason = "insufficient_visible_oirs";
                return;
            }

            Scene steered = steer_toward(s, s.pd);
            std::vector<OirsElement> keep;
            for (std::size_t n = 0; n < steered.size(); ++n)
                if (link_visible(steered, n))
                    keep.push_back(steered.oirs[n]);
            steered.oirs = keep;
            if (steered.size() < 2)
            {
                cell.blank_reason = "insufficient_visible_oirs";
                return;
            }
            try
            {
                cell.peb = peb(steered, cfg.K, std::vector<std::size_t>(steered.size(), cfg.K_n)).peb;
            }
            catch (const Error &e)
            {
                if (e.kind() != ErrorKind::SingularGeometry)
                    throw;
                cell.blank_reason = "singular_geometry";
                return;
            }

            double ss = 0.0;
            std::size_t used = 0;
            for (std::size_t t = 0; t < trials; ++t)
            {
                try
                {
                    const LocalizationRun run = run_algorithm1(s, cfg, seed, idx * trials + t);
                    ss += (run.final_position - s.pd).squaredNorm();
                    ++used;
                }
                catch (const Error &e)
                {
                    if (!droppable(e.kind()))
                        throw;
                }
            }
            if (trials)
                cell.rmse = rmse(ss, used);
        });
        return map;
    }

    const std::vector<std::string> &preset_names()
    {
        static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "fig7", "fig8"};
        return names;
    }

    std::vector<NamedTable> replicate(const std::string &preset, const ExperimentOptions &opt)
    {
        const Scene &base = opt.base;
        const std::size_t trials = opt.trials.value_or(10000);
        const OirsElement proto = base.oirs.empty() ? OirsElement{} : base.oirs.front();
        std::vector<NamedTable> out;

        Scene single = base;
        single.oirs = oirs_layout(Layout::Single, base.room, proto);

        if (preset == "fig2")
        {
            for (std::size_t K : {1, 3, 5})
            {
                SweepSpec spec;
                spec.values = range(10.0, 25.0, 1.0);
                spec.trials = trials;
                spec.seed = opt.seed;
                spec.K = K;
                out.push_back({"fig2_k" + std::to_string(K), run_rmse_sweep(base, spec).table()});
            }
        }
        else if (preset == "fig3" || preset == "fig4")
        {
            const bool arc = preset == "fig3";
            for (std::size_t Kn : {5, 20, 80})
            {
                SweepSpec spec;
                spec.variable = arc ? SweepVariable::AzimuthDeg : SweepVariable::HorizontalM;
                spec.values = arc ? range(65.0, 115.0, 2.5) : range(1.5, 4.5, 0.25);
                spec.trials = trials;
                spec.seed = opt.seed;
                spec.K = opt.nlos_los_samples;
                spec.K_n = Kn;
                out.push_back({preset + "_k" + std::to_string(Kn), run_rmse_sweep(single, spec).table()});
            }
        }
        else if (preset == "fig5")
        {
            for (bool steered : {false, true})
                for (std::size_t Kn : {1, 3, 5})
                {
                    SweepSpec spec;
                    spec.values = range(15.0, 55.0, 5.0);
                    spec.trials = trials;
                    spec.seed = opt.seed;
                    spec.K = opt.nlos_los_samples;
                    spec.K_n = Kn;
                    spec.steered = steered;
                    out.push_back({std::string(steered ? "fig5b_k" : "fig5a_k") + std::to_string(Kn),
                                   run_rmse_sweep(single, spec).table()});
                }
        }
        else if (preset == "fig7")
        {
            Scene s = base;
            s.oirs = oirs_layout(Layout::WallsCenter, base.room, proto);
            LocalizationConfig cfg = opt.loc;
            cfg.outer_max = 5;
            cfg.outer_eps = 0.0; // report every iteration
            for (double lm : {1000.0, 3000.0})
            {
                s.power = Power::from_lumens(lm, base.power.efficacy_lm_per_w);
                const auto rows = run_localization_sweep(s, cfg, trials, opt.seed);
                out.push_back({"fig7_" + std::to_string(static_cast<int>(lm)) + "lm", localization_table(rows)});
            }
        }
        else if (preset == "fig8")
        {
            const double res = opt.paper_scale ? 0.001 : 0.05;
            const std::size_t cov_trials = opt.trials.value_or(1000);
            CsvTable summary;
            summary.header = {"n_oirs", "coverage_fraction"};
            for (std::size_t N : {4, 8, 12})
            {
                Scene s = base;
                s.oirs = oirs_layout(layout_for_count(N), base.room, proto);
                const CoverageMap map = run_coverage_map(s, res, cov_trials, opt.loc, opt.seed);
                out.push_back({"fig8_n" + std::to_string(N), map.table()});
                summary.rows.push_back({static_cast<std::int64_t>(N), map.coverage_fraction()});
            }
            out.push_back({"fig8_summary", summary});
        }
        else
            fail(ErrorKind::ValidationError, "unknown preset '" + preset + "'");
        return out;
    }
}
