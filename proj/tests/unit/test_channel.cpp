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
#include <catch_amalgamated.hpp>

#include "oirs_vlp/errors.hpp"
#include "oirs_vlp/experiment.hpp"
#include "oirs_vlp/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace oirs;
using Catch::Approx;

namespace
{
    constexpr double deg = std::numbers::pi / 180.0;
}

TEST_CASE("Lambertian order and concentrator gain at the default parameters")
{
    CHECK(lambertian_order(70.0 * deg) == Approx(0.646058770348734).epsilon(1e-12));
    CHECK(lambertian_order(60.0 * deg) == Approx(1.0).epsilon(1e-14));
    const double G = concentrator_gain(0.1, 70.0 * deg, 1.5);
    CHECK(G == Approx(2.5480672457215374).epsilon(1e-12));
    CHECK(concentrator_gain(71.0 * deg, 70.0 * deg, 1.5) == 0.0);
    CHECK(concentrator_gain(70.0 * deg, 70.0 * deg, 1.5) == G);
    CHECK_THROWS_AS(lambertian_order(90.0 * deg), Error);
}

TEST_CASE("thermal variance from the circuit parameters")
{
    // Direct evaluation with every constant written out.
    const double kT = 1.380649e-23 * 295.0;
    const double nuA = 112e-12 / 1e-4 * 0.2e-4;
    const double B = 5e6;
    const double expected = 8 * std::numbers::pi * kT / 10.0 * nuA * 0.562 * B * B +
                            16 * std::numbers::pi * std::numbers::pi * kT * 1.5 / 0.03 * nuA * nuA * 0.0868 * B * B * B;
    const double got = thermal_variance(NoiseParams{}, 0.2e-4);
    CHECK(got == Approx(expected).epsilon(1e-14));
    CHECK(got == Approx(3.3966579638e-18).epsilon(1e-9));
}

TEST_CASE("shot variance is affine in received power")
{
    const NoiseParams np;
    const double s0 = shot_variance(0.0, np, 0.54), s1 = shot_variance(1e-6, np, 0.54), s2 = shot_variance(2e-6, np, 0.54);
    CHECK(s2 - s1 == Approx(s1 - s0).epsilon(1e-12));
    CHECK(s0 == Approx(2 * np.electron_charge_c * np.bandwidth_hz * np.background_current_a).epsilon(1e-15));

    const NoiseCoefficients nc = noise_coefficients(np, 0.2e-4);
    const double P = 3e-6, mean = 0.54 * P;
    CHECK(nc.variance(mean) ==
          Approx(shot_variance(P, np, 0.54) + thermal_variance(np, 0.2e-4)).epsilon(1e-14));
}

TEST_CASE("LoS gain matches the angle form of the channel model")
{
    Scene s;
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> p(0.0, 5.0);
    const double m = lambertian_order(s), G = concentrator_gain(s);
    for (int i = 0; i < 200; ++i)
    {
        const Vec3 u(p(gen), p(gen), 0.0);
        const double d = (s.led - u).norm();
        const double cos_t = s.led.z() / d;
        const double expected = cos_t < std::cos(s.pd_params.fov_rad)
                                    ? 0.0
                                    : s.pd_params.area_m2 * G * (m + 1) / (2 * std::numbers::pi * d * d) *
                                          std::pow(cos_t, m) * cos_t;
        CHECK(los_gain(d, s) == Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("NLoS gain matches the angle form with an additive path length")
{
    Scene s;
    s.oirs = oirs_layout(Layout::WallsCenter, s.room, OirsElement{});
    const double m = lambertian_order(s), G = concentrator_gain(s);
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> p(0.2, 4.8);
    int checked = 0;
    for (int i = 0; i < 200; ++i)
    {
        s.pd = Vec3(p(gen), p(gen), 0.0);
        const Scene t = steer_toward(s, s.pd);
        const PathGeometry g = path_geometry(t);
        for (std::size_t n = 0; n < t.size(); ++n)
        {
            if (!g.nlos[n] || g.nlos[n]->phi > s.pd_params.fov_rad)
                continue;
            const NlosPath &path = *g.nlos[n];
            const double expected = 0.95 * s.pd_params.area_m2 * G * (m + 1) /
                                    (2 * std::numbers::pi * (path.s + path.d) * (path.s + path.d)) *
                                    std::pow(std::cos(path.theta), m) * std::cos(path.phi);
            CHECK(nlos_gain(path.s, path.d, path.r, 0.95, t) == Approx(expected).epsilon(1e-12));
            CHECK(nlos_mean(t, n) ==
                  Approx(s.pd_params.responsivity_a_per_w * s.power.watts * expected).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("power in lumens converts through the efficacy")
{
    const Power p = Power::from_lumens(1000.0, 683.0);
    CHECK(p.watts == Approx(1000.0 / 683.0).epsilon(1e-15));
    CHECK(p.lumens() == Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("SNR grows with power and power inversion round-trips")
{
    Scene s;
    s.power = Power::from_lumens(1000.0, 683.0);
    const double lo = snr(s, {});
    s.power.watts *= 2.0;
    CHECK(snr(s, {}) > lo);

    for (double target : {-5.0, 10.0, 15.0, 25.0, 40.0})
    {
        Scene t = s;
        t.power = power_for_target_snr(s, target, {});
        CHECK(std::abs(snr_db(t, {}) - target) < 1e-9);
    }

    // more thermal noise needs more power for the same SNR
    Scene noisy = s;
    noisy.noise.temperature_k *= 2.0;
    CHECK(power_for_target_snr(noisy, 15.0, {}).watts > power_for_target_snr(s, 15.0, {}).watts);
}

TEST_CASE("power inversion fails without any channel gain")
{
    Scene s;
    s.pd = Vec3(0.0, 0.0, 0.0);
    s.led = Vec3(5.0, 5.0, 0.1); // far outside the field of view
    try
    {
        power_for_target_snr(s, 15.0, {});
        FAIL("expected NoBracket");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::NoBracket);
    }
}

TEST_CASE("scene validation names the offending element")
{
    Scene s;
    s.oirs = oirs_layout(Layout::WallsCenter, s.room, OirsElement{});
    CHECK_NOTHROW(validate(s));
    s.oirs[2].center = Vec3(-1.0, 2.5, 1.5);
    try
    {
        validate(s);
        FAIL("expected ValidationError");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::ValidationError);
        CHECK(std::string(e.what()).find("oirs 3") != std::string::npos);
    }
}

TEST_CASE("activation helpers")
{
    Scene s;
    s.oirs = oirs_layout(Layout::WallsCenter, s.room, OirsElement{});
    CHECK_FALSE(active_element(s).has_value());
    const Scene one = with_activation(s, 2);
    REQUIRE(active_element(one).has_value());
    CHECK(*active_element(one) == 2);
    Scene two = one;
    two.oirs[0].active = true;
    CHECK_THROWS_AS(active_element(two), Error);
}
