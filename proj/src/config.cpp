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
#include "oirs_vlp/config.hpp"
#include "oirs_vlp/csv.hpp"
#include "oirs_vlp/errors.hpp"
#include "oirs_vlp/estimation.hpp"
#include "oirs_vlp/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace oirs
{
    const char *const code_version = "oirs-vlp 0.1.0";

    namespace
    {
        constexpr double deg = std::numbers::pi / 180.0;

        struct Entry
        {
            int line = 0;
            std::vector<std::string> tokens;
        };

        [[noreturn]] void parse_error(int line, const std::string &key, const std::string &what)
        {
            fail(ErrorKind::ParseError, "line " + std::to_string(line) + ", key '" + key + "': " + what);
        }

        double to_number(const std::string &tok, int line, const std::string &key)
        {
            const char *begin = tok.c_str();
            char *end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin || *end != '\0' || !std::isfinite(v))
                parse_error(line, key, "'" + tok + "' is not a finite number");
            return v;
        }

        std::size_t to_count(const std::string &tok, int line, const std::string &key)
        {
            const double v = to_number(tok, line, key);
            if (v < 0 || v != std::floor(v) || v > 1e15)
                parse_error(line, key, "'" + tok + "' is not a non-negative integer");
            return static_cast<std::size_t>(v);
        }

        Vec3 wall_normal_from(const std::string &tok, int line)
        {
            if (tok == "+x") return Vec3::UnitX();
            if (tok == "-x") return -Vec3::UnitX();
            if (tok == "+y") return Vec3::UnitY();
            if (tok == "-y") return -Vec3::UnitY();
            parse_error(line, "oirs", "wall normal must be one of +x, -x, +y, -y");
        }

        // Keys that must be present when defaults are disabled.
        const std::vector<std::string> &required_keys()
        {
            static const std::vector<std::string> keys = {
                "room_m", "led_m", "pd_m", "power_lm", "luminous_efficacy_lm_per_w", "half_intensity_deg",
                "fov_deg", "refractive_index", "area_cm2", "filter_gain", "responsivity_a_per_w",
                "oirs_reflectivity", "electron_charge_c", "bandwidth_hz", "background_current_pa",
                "noise_bw_factor_i2", "noise_bw_factor_i3", "boltzmann_j_per_k", "temperature_k",
                "open_loop_gain", "capacitance_pf_per_cm2", "channel_noise_factor", "transconductance_ms"};
            return keys;
        }
    }

    std::uint64_t fnv1a64(const std::string &text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    Config parse_config(const std::string &text, Defaults defaults, const std::string &source)
    {
        Config cfg;
        cfg.source = source;
        cfg.hash = fnv1a64(text);

        std::map<std::string, Entry> scalars;
        std::vector<Entry> oirs_rows;
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw))
        {
            ++line_no;
            if (const auto hash = raw.find('#'); hash != std::string::npos)
                raw.erase(hash);
            std::istringstream ls(raw);
            std::string key, eq;
            if (!(ls >> key))
                continue;
            if (!(ls >> eq) || eq != "=")
                parse_error(line_no, key, "expected 'key = value'");
            Entry e;
            e.line = line_no;
            for (std::string tok; ls >> tok;)
                e.tokens.push_back(tok);
            if (e.tokens.empty())
                parse_error(line_no, key, "missing value");
            if (key == "oirs")
                oirs_rows.push_back(e);
            else if (!scalars.emplace(key, e).second)
                parse_error(line_no, key, "duplicate key");
        }

        Scene &sc = cfg.scene;
        OirsElement proto;
        std::string layout;
        std::set<std::string> seen;

        using Handler = std::function<void(const Entry &, const std::string &)>;
        auto one = [](const Entry &e, const std::string &key)
        {
            if (e.tokens.size() != 1)
                parse_error(e.line, key, "expected a single value");
            return to_number(e.tokens[0], e.line, key);
        };
        auto vec3 = [](const Entry &e, const std::string &key)
        {
            if (e.tokens.size() != 3)
                parse_error(e.line, key, "expected three values");
            return Vec3(to_number(e.tokens[0], e.line, key), to_number(e.tokens[1], e.line, key),
                        to_number(e.tokens[2], e.line, key));
        };
        auto word = [](const Entry &e, const std::string &key)
        {
            if (e.tokens.size() != 1)
                parse_error(e.line, key, "expected a single word");
            return e.tokens[0];
        };
        double power_lm = 1000.0, efficacy = 683.0;

        const std::map<std::string, Handler> handlers = {
            {"room_m", [&](auto &e, auto &k) { sc.room = vec3(e, k); }},
            {"led_m", [&](auto &e, auto &k) { sc.led = vec3(e, k); }},
            {"pd_m", [&](auto &e, auto &k) { sc.pd = vec3(e, k); }},
            {"power_lm", [&](auto &e, auto &k) { power_lm = one(e, k); }},
            {"luminous_efficacy_lm_per_w", [&](auto &e, auto &k) { efficacy = one(e, k); }},
            {"half_intensity_deg", [&](auto &e, auto &k) { sc.pd_params.half_intensity_rad = one(e, k) * deg; }},
            {"fov_deg", [&](auto &e, auto &k) { sc.pd_params.fov_rad = one(e, k) * deg; }},
            {"refractive_index", [&](auto &e, auto &k) { sc.pd_params.refractive_index = one(e, k); }},
            {"area_cm2", [&](auto &e, auto &k) { sc.pd_params.area_m2 = one(e, k) * 1e-4; }},
            {"filter_gain", [&](auto &e, auto &k) { sc.pd_params.filter_gain = one(e, k); }},
            {"responsivity_a_per_w", [&](auto &e, auto &k) { sc.pd_params.responsivity_a_per_w = one(e, k); }},
            {"electron_charge_c", [&](auto &e, auto &k) { sc.noise.electron_charge_c = one(e, k); }},
            {"bandwidth_hz", [&](auto &e, auto &k) { sc.noise.bandwidth_hz = one(e, k); }},
            {"background_current_pa", [&](auto &e, auto &k) { sc.noise.background_current_a = one(e, k) * 1e-12; }},
            {"noise_bw_factor_i2", [&](auto &e, auto &k) { sc.noise.noise_bw_factor_i2 = one(e, k); }},
            {"noise_bw_factor_i3", [&](auto &e, auto &k) { sc.noise.noise_bw_factor_i3 = one(e, k); }},
            {"boltzmann_j_per_k", [&](auto &e, auto &k) { sc.noise.boltzmann_j_per_k = one(e, k); }},
            {"temperature_k", [&](auto &e, auto &k) { sc.noise.temperature_k = one(e, k); }},
            {"open_loop_gain", [&](auto &e, auto &k) { sc.noise.open_loop_gain = one(e, k); }},
            {"capacitance_pf_per_cm2", [&](auto &e, auto &k) { sc.noise.capacitance_f_per_m2 = one(e, k) * 1e-12 / 1e-4; }},
            {"channel_noise_factor", [&](auto &e, auto &k) { sc.noise.channel_noise_factor = one(e, k); }},
            {"transconductance_ms", [&](auto &e, auto &k) { sc.noise.transconductance_s = one(e, k) * 1e-3; }},
            {"oirs_width_m", [&](auto &e, auto &k) { proto.width = one(e, k); }},
            {"oirs_height_m", [&](auto &e, auto &k) { proto.height = one(e, k); }},
            {"oirs_reflectivity", [&](auto &e, auto &k) { proto.reflectivity = one(e, k); }},
            {"oirs_layout", [&](auto &e, auto &k) { layout = word(e, k); }},
            {"los_samples", [&](auto &e, auto &k) { cfg.loc.K = to_count(word(e, k), e.line, k); }},
            {"nlos_samples", [&](auto &e, auto &k) { cfg.loc.K_n = to_count(word(e, k), e.line, k); }},
            {"nlos_los_samples", [&](auto &e, auto &k) { cfg.nlos_los_samples = to_count(word(e, k), e.line, k); }},
            {"los_estimator", [&](auto &e, auto &k) { cfg.loc.los_estimator = parse_method(word(e, k)); }},
            {"nlos_estimator", [&](auto &e, auto &k) { cfg.loc.nlos_estimator = parse_method(word(e, k)); }},
            {"weight_mode", [&](auto &e, auto &k) { cfg.loc.weight_mode = parse_weight_mode(word(e, k)); }},
            {"inner_eps_m", [&](auto &e, auto &k) { cfg.loc.inner_eps = one(e, k); }},
            {"inner_max", [&](auto &e, auto &k) { cfg.loc.inner_max = to_count(word(e, k), e.line, k); }},
            {"outer_eps_m", [&](auto &e, auto &k) { cfg.loc.outer_eps = one(e, k); }},
            {"outer_max", [&](auto &e, auto &k) { cfg.loc.outer_max = to_count(word(e, k), e.line, k); }},
            {"init", [&](auto &e, auto &k)
             {
                 const std::string w = word(e, k);
                 if (w != "centroid" && w != "random")
                     parse_error(e.line, k, "init must be 'centroid' or 'random'");
                 cfg.loc.random_init = w == "random";
             }},
            {"grid_min_m", [&](auto &e, auto &k) { cfg.loc.grid.lo = one(e, k); }},
            {"grid_step_m", [&](auto &e, auto &k) { cfg.loc.grid.step = one(e, k); }},
            {"grid_tol_m", [&](auto &e, auto &k) { cfg.loc.grid.tol = one(e, k); }},
            {"coverage_resolution_m", [&](auto &e, auto &k) { cfg.coverage_resolution_m = one(e, k); }},
            {"seed", [&](auto &e, auto &k)
             {
                 const std::string w = word(e, k);
                 char *end = nullptr;
                 cfg.run.seed = std::strtoull(w.c_str(), &end, 10);
                 if (end == w.c_str() || *end != '\0')
                     parse_error(e.line, k, "seed must be an unsigned integer");
             }},
            {"trials", [&](auto &e, auto &k) { cfg.run.trials = to_count(word(e, k), e.line, k); }},
            {"out_dir", [&](auto &e, auto &k) { cfg.run.out_dir = word(e, k); }},
        };

        for (const auto &[key, entry] : scalars)
        {
            const auto it = handlers.find(key);
            if (it == handlers.end())
                parse_error(entry.line, key, "unknown key");
            it->second(entry, key);
            seen.insert(key);
        }

        if (defaults == Defaults::Disabled)
        {
            for (const auto &k : required_keys())
                if (!seen.count(k))
                    fail(ErrorKind::ValidationError, "missing required key '" + k + "'");
            if (oirs_rows.empty() && layout.empty())
                fail(ErrorKind::ValidationError, "missing OIRS description ('oirs' rows or 'oirs_layout')");
        }

        sc.power = Power::from_lumens(power_lm, efficacy);
        if (!(efficacy > 0.0) || power_lm < 0.0)
            fail(ErrorKind::ValidationError, "luminous_efficacy_lm_per_w must be positive and power_lm non-negative");

        if (!oirs_rows.empty() && !layout.empty())
            fail(ErrorKind::ValidationError, "give either 'oirs' rows or 'oirs_layout', not both");
        for (const auto &row : oirs_rows)
        {
            // x y z wall alpha_deg beta_deg [width height reflectivity]
            if (row.tokens.size() != 6 && row.tokens.size() != 9)
                parse_error(row.line, "oirs", "expected 'x y z wall alpha_deg beta_deg [width height reflectivity]'");
            OirsElement e = proto;
            e.center = Vec3(to_number(row.tokens[0], row.line, "oirs"), to_number(row.tokens[1], row.line, "oirs"),
                            to_number(row.tokens[2], row.line, "oirs"));
            e.wall_normal = wall_normal_from(row.tokens[3], row.line);
            e.alpha = to_number(row.tokens[4], row.line, "oirs") * deg;
            e.beta = to_number(row.tokens[5], row.line, "oirs") * deg;
            if (row.tokens.size() == 9)
            {
                e.width = to_number(row.tokens[6], row.line, "oirs");
                e.height = to_number(row.tokens[7], row.line, "oirs");
                e.reflectivity = to_number(row.tokens[8], row.line, "oirs");
            }
            sc.oirs.push_back(e);
        }
        if (oirs_rows.empty())
        {
            static const std::map<std::string, Layout> layouts = {{"single", Layout::Single},
                                                                  {"walls_center", Layout::WallsCenter},
                                                                  {"two_per_wall", Layout::TwoPerWall},
                                                                  {"three_per_wall", Layout::ThreePerWall}};
            const auto it = layouts.find(layout.empty() ? "walls_center" : layout);
            if (it == layouts.end())
                fail(ErrorKind::ValidationError,
                     "oirs_layout must be single, walls_center, two_per_wall or three_per_wall");
            sc.oirs = oirs_layout(it->second, sc.room, proto);
        }

        validate(sc);
        const auto &L = cfg.loc;
        if (L.K == 0 || L.K_n == 0 || cfg.nlos_los_samples == 0)
            fail(ErrorKind::ValidationError, "sample counts must be at least 1");
        if (!(L.inner_eps > 0.0) || L.inner_max == 0 || L.outer_max == 0 || L.outer_eps < 0.0)
            fail(ErrorKind::ValidationError, "iteration thresholds and caps must be positive");
        if (!(L.grid.lo > 0.0) || !(L.grid.step > 0.0) || !(L.grid.tol > 0.0))
            fail(ErrorKind::ValidationError, "grid_min_m, grid_step_m and grid_tol_m must be positive");
        if (!(cfg.coverage_resolution_m > 0.0))
            fail(ErrorKind::ValidationError, "coverage_resolution_m must be positive");
        if (cfg.run.trials == 0)
            fail(ErrorKind::ValidationError, "trials must be at least 1");
        return cfg;
    }

    Config load_config(const std::filesystem::path &path, Defaults defaults)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            fail(ErrorKind::ParseError, "cannot read config file " + path.string());
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse_config(ss.str(), defaults, path.string());
    }

    std::vector<std::pair<std::string, std::string>> derived_constants(const Scene &scene)
    {
        const NoiseCoefficients nc = noise_coefficients(scene);
        return {
            {"lambertian_order", format_number(lambertian_order(scene))},
            {"concentrator_gain", format_number(concentrator_gain(scene))},
            {"thermal_variance_a2", format_number(thermal_variance(scene.noise, scene.pd_params.area_m2))},
            {"noise_a_a2", format_number(nc.a)},
            {"noise_b_a", format_number(nc.b)},
            {"power_w", format_number(scene.power.watts)},
            {"power_lm", format_number(scene.power.lumens())},
            {"los_coefficient_xi", format_number(los_coefficient(scene).xi)},
        };
    }

    std::string provenance(const Config &cfg, const std::string &command)
    {
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash));
        std::ostringstream out;
        out << "code_version = " << code_version << '\n'
            << "command = " << command << '\n'
            << "config = " << cfg.source << '\n'
            << "config_hash_fnv1a64 = " << hash << '\n'
            << "seed = " << cfg.run.seed << '\n'
            << "trials = " << cfg.run.trials << '\n'
            << "los_estimator = " << to_string(cfg.loc.los_estimator) << '\n'
            << "nlos_estimator = " << to_string(cfg.loc.nlos_estimator) << '\n'
            << "weight_mode = " << to_string(cfg.loc.weight_mode) << '\n';
        for (const auto &[k, v] : derived_constants(cfg.scene))
            out << k << " = " << v << '\n';
        return out.str();
    }
}
