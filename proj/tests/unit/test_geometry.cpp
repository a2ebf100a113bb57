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
#include "oirs_vlp/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace oirs;
using Catch::Approx;

namespace
{
    constexpr double deg = std::numbers::pi / 180.0;

    OirsElement wall_y0()
    {
        OirsElement e;
        e.center = Vec3(2.5, 0.0, 1.5);
        e.wall_normal = Vec3::UnitY();
        return e;
    }

    // Brute-force Fermat oracle: minimise |q - r| + |r - u| over a fine grid on the mirror face.
    Vec3 fermat_point(const Vec3 &q, const Vec3 &u, const OirsElement &e, double extent)
    {
        const auto [ah, av] = mirror_axes(e);
        double best = 1e300;
        Vec3 arg = e.center;
        double lo_h = -extent, hi_h = extent, lo_v = -extent, hi_v = extent;
        for (int pass = 0; pass < 6; ++pass)
        {
            const double sh = (hi_h - lo_h) / 200.0, sv = (hi_v - lo_v) / 200.0;
            double bh = 0, bv = 0;
            for (int i = 0; i <= 200; ++i)
                for (int j = 0; j <= 200; ++j)
                {
                    const double a = lo_h + i * sh, b = lo_v + j * sv;
                    const Vec3 r = e.center + a * ah + b * av;
                    const double len = (q - r).norm() + (r - u).norm();
                    if (len < best)
                    {
                        best = len;
                        arg = r;
                        bh = a;
                        bv = b;
                    }
                }
            lo_h = bh - 2 * sh;
            hi_h = bh + 2 * sh;
            lo_v = bv - 2 * sv;
            hi_v = bv + 2 * sv;
        }
        return arg;
    }
}

TEST_CASE("untilted normal equals the wall normal")
{
    for (const Vec3 &n : {Vec3(Vec3::UnitX()), Vec3(-Vec3::UnitX()), Vec3(Vec3::UnitY()), Vec3(-Vec3::UnitY())})
        CHECK((normal_from_tilt(0.0, 0.0, n) - n).norm() < 1e-15);
}

TEST_CASE("tilt round trip over the open domain")
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> ang(-85.0 * deg, 85.0 * deg);
    for (const Vec3 &n : {Vec3(Vec3::UnitY()), Vec3(-Vec3::UnitX())})
        for (int i = 0; i < 2000; ++i)
        {
            const double a = ang(gen), b = ang(gen);
            const Vec3 o = normal_from_tilt(a, b, n);
            CHECK(o.norm() == Approx(1.0).margin(1e-14));
            const Tilt t = tilt_angles_from_normal(o, n);
            CHECK(t.alpha == Approx(a).margin(1e-10));
            CHECK(t.beta == Approx(b).margin(1e-10));
        }
}

TEST_CASE("vertical normal is gimbal lock")
{
    try
    {
        tilt_angles_from_normal(Vec3::UnitZ(), Vec3::UnitY());
        FAIL("expected GimbalLock");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::GimbalLock);
    }
}

TEST_CASE("mirror axes are orthonormal and span the mirror plane")
{
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> ang(-80.0 * deg, 80.0 * deg);
    for (int i = 0; i < 500; ++i)
    {
        OirsElement e = wall_y0();
        e.alpha = ang(gen);
        e.beta = ang(gen);
        const auto [h, v] = mirror_axes(e);
        const Vec3 o = e.normal();
        CHECK(h.norm() == Approx(1.0).margin(1e-14));
        CHECK(v.norm() == Approx(1.0).margin(1e-14));
        CHECK(std::abs(h.dot(v)) < 1e-14);
        CHECK(std::abs(h.dot(o)) < 1e-14);
        CHECK(std::abs(v.dot(o)) < 1e-14);
        CHECK(std::abs(h.z()) < 1e-15);
    }
}

TEST_CASE("steering normal bisects the two arms")
{
    // Sphere-grid oracle: the unit vector that maximises the smaller of its cosines to the two arms.
    const Vec3 q(2.5, 2.5, 3.0), w(2.5, 0.0, 1.5);
    for (const Vec3 &u : {Vec3(3.0, 3.0, 0.0), Vec3(1.0, 4.0, 0.0), Vec3(4.6, 0.7, 0.0)})
    {
        const Vec3 o = steering_normal(q, w, u);
        const Vec3 a = (q - w).normalized(), b = (u - w).normalized();
        double best = -2.0;
        Vec3 arg;
        for (int i = 0; i <= 720; ++i)
            for (int j = 0; j <= 360; ++j)
            {
                const double th = i * std::numbers::pi / 360.0, ph = j * std::numbers::pi / 360.0;
                const Vec3 c(std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph));
                const double score = std::min(a.dot(c), b.dot(c));
                if (score > best)
                {
                    best = score;
                    arg = c;
                }
            }
        // the bisector is at least as good as every grid direction and sits next to the grid winner
        CHECK(std::min(a.dot(o), b.dot(o)) >= best - 1e-12);
        CHECK((arg - o).norm() < 3e-2);
        CHECK(a.dot(o) == Approx(b.dot(o)).margin(1e-14));
    }
}

TEST_CASE("steered mirror reflects the LED onto the target through its center")
{
    const Vec3 q(2.5, 2.5, 3.0);
    OirsElement e = wall_y0();
    for (const Vec3 &u : {Vec3(3.0, 3.0, 0.0), Vec3(0.5, 4.0, 0.0), Vec3(4.5, 1.0, 0.0)})
    {
        const Tilt t = tilt_angles_from_normal(steering_normal(q, e.center, u), e.wall_normal);
        e.alpha = t.alpha;
        e.beta = t.beta;
        const Reflection r = reflection_point(q, u, e);
        REQUIRE(r.valid());
        CHECK((r.point - e.center).norm() < 1e-12);
    }
}

TEST_CASE("reflection point agrees with the Fermat oracle")
{
    const Vec3 q(2.5, 2.5, 3.0);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ang(-25.0 * deg, 25.0 * deg), pos(0.5, 4.5);
    int checked = 0;
    for (int i = 0; i < 60; ++i)
    {
        OirsElement e = wall_y0();
        e.width = e.height = 3.0;
        e.alpha = ang(gen);
        e.beta = ang(gen);
        const Vec3 u(pos(gen), pos(gen), 0.0);
        const Reflection r = reflection_point(q, u, e);
        if (!r.valid())
            continue;
        ++checked;
        CHECK((r.point - fermat_point(q, u, e, 1.5)).norm() < 1e-6);
        // angle of incidence equals angle of reflection
        const Vec3 o = e.normal();
        CHECK((q - r.point).normalized().dot(o) == Approx((u - r.point).normalized().dot(o)).margin(1e-12));
    }
    CHECK(checked > 20);
}

TEST_CASE("reflection status classification")
{
    const Vec3 q(2.5, 2.5, 3.0);
    OirsElement e = wall_y0();

    SECTION("PD behind the mirror plane")
    {
        CHECK(reflection_point(q, Vec3(2.5, -1.0, 0.0), e).status == ReflectionStatus::BehindPlane);
    }
    SECTION("specular point off the aperture")
    {
        e.width = e.height = 0.1;
        CHECK(reflection_point(q, Vec3(0.2, 4.8, 0.0), e).status == ReflectionStatus::OutOfAperture);
    }
    SECTION("source in the mirror plane")
    {
        const Vec3 q_plane(2.5, 0.0, 2.9);
        CHECK(reflection_point(q_plane, Vec3(3.0, 3.0, 0.0), e).status == ReflectionStatus::BehindPlane);
    }
    SECTION("near-grazing source")
    {
        e.width = 5.0;
        const Vec3 q_graze(1.0, 1e-7, 1.5), u_graze(4.0, 1e-7, 1.5);
        CHECK(reflection_point(q_graze, u_graze, e).status == ReflectionStatus::GrazingIncidence);
    }
}

TEST_CASE("path geometry angles and distances")
{
    const Vec3 q(2.5, 2.5, 3.0), u(3.0, 3.0, 0.0);
    OirsElement e = wall_y0();
    const Reflection r = reflection_point(q, u, e);
    REQUIRE(r.valid());
    const PathGeometry g = path_geometry(q, u, {r, Reflection{}});
    CHECK(g.d == Approx(std::sqrt(9.5)).epsilon(1e-15));
    CHECK(std::cos(g.phi) == Approx(3.0 / std::sqrt(9.5)).epsilon(1e-14));
    REQUIRE(g.nlos[0].has_value());
    CHECK_FALSE(g.nlos[1].has_value());
    const NlosPath &p = *g.nlos[0];
    CHECK(p.s + p.d == Approx((q - 2.0 * (q - e.center).dot(e.normal()) * e.normal() - u).norm()).epsilon(1e-14));
    CHECK(std::cos(p.phi) == Approx(p.r.z() / p.d).epsilon(1e-14));
}

TEST_CASE("element validation")
{
    OirsElement e = wall_y0();
    e.width = 0.0;
    CHECK_THROWS_AS(validate(e), Error);
    e = wall_y0();
    e.alpha = 91.0 * deg;
    CHECK_THROWS_AS(validate(e), Error);
    e = wall_y0();
    e.reflectivity = 1.2;
    CHECK_THROWS_AS(validate(e), Error);
    CHECK_NOTHROW(validate(wall_y0()));
}
