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

#include "oirs_vlp/bounds.hpp"
#include "oirs_vlp/errors.hpp"
#include "oirs_vlp/experiment.hpp"
#include "oirs_vlp/localization.hpp"

#include <cmath>
#include <random>

using namespace oirs;
using Catch::Approx;

namespace
{
    Scene four_mirrors()
    {
        Scene s;
        s.power = Power::from_lumens(1000.0, 683.0);
        s.oirs = oirs_layout(Layout::WallsCenter, s.room, OirsElement{});
        return s;
    }

    double wls_cost(const AnchorSet &set, const Vec2 &u)
    {
        double c = 0.0;
        for (std::size_t j = 0; j < set.anchors.size(); ++j)
        {
            const Vec3 p = set.anchors[j];
            const double r = set.sq_dist[j] - ((u - p.head<2>()).squaredNorm() + p.z() * p.z());
            c += set.weights[j] * r * r;
        }
        return c;
    }
}

TEST_CASE("IWLS lands on the weighted least-squares minimum")
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Scene s = four_mirrors();
    for (int trial = 0; trial < 10; ++trial)
    {
        AnchorSet set;
        const Vec3 truth(0.5 + 4 * u(gen), 0.5 + 4 * u(gen), 0.0);
        set.anchors.push_back(s.led);
        for (const auto &e : s.oirs)
            set.anchors.push_back(e.center);
        for (const auto &a : set.anchors)
        {
            const double d = (a - truth).norm() + 0.05 * (u(gen) - 0.5);
            set.sq_dist.push_back(d * d);
            set.weights.push_back(0.2 + 2 * u(gen));
        }
        const SolverTrace tr = iwls_solve(set, Vec2(2.5, 2.5), 1e-12, 200);
        REQUIRE(tr.converged);
        CHECK(tr.stop_reason == StopReason::Threshold);
        CHECK(tr.iterates.front() == Vec2(2.5, 2.5));

        // grid oracle with successive refinement
        Vec2 best = Vec2(0, 0);
        double val = 1e300, step = 0.01;
        Vec2 lo(0, 0), hi(5, 5);
        for (int pass = 0; pass < 5; ++pass)
        {
            for (double x = lo.x(); x <= hi.x(); x += step)
                for (double y = lo.y(); y <= hi.y(); y += step)
                    if (const double c = wls_cost(set, Vec2(x, y)); c < val)
                    {
                        val = c;
                        best = Vec2(x, y);
                    }
            lo = best - Vec2(2 * step, 2 * step);
            hi = best + Vec2(2 * step, 2 * step);
            step /= 10;
        }
        CHECK((tr.final() - best).norm() < 1e-5);
        CHECK(wls_cost(set, tr.final()) <= val + 1e-12);
    }
}

TEST_CASE("IWLS recovers the position from exact distances")
{
    const Scene s = four_mirrors();
    AnchorSet set;
    const Vec3 truth(1.3, 3.9, 0.0);
    set.anchors.push_back(s.led);
    for (const auto &e : s.oirs)
        set.anchors.push_back(e.center);
    for (const auto &a : set.anchors)
    {
        set.sq_dist.push_back((a - truth).squaredNorm());
        set.weights.push_back(1.0);
    }
    const SolverTrace tr = iwls_solve(set, Vec2(2.5, 2.5), 1e-14, 100);
    CHECK((tr.final() - truth.head<2>()).norm() < 1e-9);
}

TEST_CASE("IWLS preconditions and singular normal equations")
{
    AnchorSet set;
    set.anchors = {Vec3(1, 1, 1), Vec3(1, 1, 2), Vec3(1, 1, 3)};
    set.sq_dist = {4, 5, 6};
    set.weights = {1, 1, 1};
    try
    {
        iwls_solve(set, Vec2(1, 1));
        FAIL("expected SingularNormalEquations");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::SingularNormalEquations);
    }
    set.weights = {1, 0, 1};
    CHECK_THROWS_AS(iwls_solve(set, Vec2(3, 3)), Error);
    set.anchors.pop_back();
    CHECK_THROWS_AS(iwls_solve(set, Vec2(3, 3)), Error);
}

TEST_CASE("IWLS stops at the iteration cap")
{
    const Scene s = four_mirrors();
    AnchorSet set;
    set.anchors.push_back(s.led);
    for (const auto &e : s.oirs)
        set.anchors.push_back(e.center);
    for (const auto &a : set.anchors)
    {
        set.sq_dist.push_back((a - Vec3(1, 1, 0)).squaredNorm());
        set.weights.push_back(1.0);
    }
    const SolverTrace tr = iwls_solve(set, Vec2(4, 4), 1e-30, 3);
    CHECK_FALSE(tr.converged);
    CHECK(tr.stop_reason == StopReason::MaxIter);
    CHECK(tr.inner_iterations == 3);
    CHECK(tr.iterates.size() == 4);
}

TEST_CASE("weight mode names round-trip")
{
    for (WeightMode m : {WeightMode::InvDeb, WeightMode::InvDebSq, WeightMode::Uniform})
        CHECK(parse_weight_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_weight_mode("inverse"), Error);
}

TEST_CASE("localization loop converges near the truth and steers at its estimate")
{
    Scene s = rest_orientation(four_mirrors());
    s.power = Power::from_lumens(3000.0, 683.0);
    LocalizationConfig cfg;
    cfg.outer_eps = 0.0;
    const LocalizationRun run = run_algorithm1(s, cfg, 5, 0);
    REQUIRE(run.outer_iterations.size() == cfg.outer_max);
    const Vec3 truth = s.pd;
    CHECK((run.final_position - truth).norm() < 0.05);

    // the first inner solve starts at the centroid of the LED and mirror centers
    Vec2 centroid = s.led.head<2>();
    for (const auto &e : s.oirs)
        centroid += e.center.head<2>();
    centroid /= 5.0;
    CHECK((run.outer_iterations[0].trace.iterates.front() - centroid).norm() < 1e-15);
    // later solves start warm from the previous estimate
    CHECK((run.outer_iterations[1].trace.iterates.front() - run.outer_iterations[0].position.head<2>()).norm() <
          1e-15);

    for (const auto &it : run.outer_iterations)
    {
        const Scene steered = steer_toward(s, it.position);
        REQUIRE(it.steering.size() == 4);
        for (std::size_t n = 0; n < 4; ++n)
        {
            CHECK(it.steering[n].alpha == Approx(steered.oirs[n].alpha).margin(1e-15));
            CHECK(it.steering[n].beta == Approx(steered.oirs[n].beta).margin(1e-15));
        }
        CHECK(it.los.method == Method::ML);
        for (const auto &e : it.nlos)
            CHECK(e.deb_weight > 0.0);
    }
}

TEST_CASE("localization loop is deterministic and stops on the outer threshold")
{
    const Scene s = rest_orientation(four_mirrors());
    LocalizationConfig cfg;
    cfg.outer_max = 20;
    cfg.outer_eps = 1e-2;
    const LocalizationRun a = run_algorithm1(s, cfg, 9, 3), b = run_algorithm1(s, cfg, 9, 3);
    CHECK(a.final_position == b.final_position);
    CHECK(a.outer_iterations.size() < 20);
    const auto &it = a.outer_iterations;
    CHECK((it.back().position - it[it.size() - 2].position).norm() < 1e-2);
}

TEST_CASE("uniform weights make every anchor weigh one")
{
    const Scene s = rest_orientation(four_mirrors());
    LocalizationConfig cfg;
    cfg.weight_mode = WeightMode::Uniform;
    cfg.outer_max = 1;
    const LocalizationRun run = run_algorithm1(s, cfg, 1, 0);
    CHECK(run.outer_iterations[0].los.deb_weight == 1.0);
    for (const auto &e : run.outer_iterations[0].nlos)
        CHECK(e.deb_weight == 1.0);
}

TEST_CASE("too few anchors is reported")
{
    Scene s = four_mirrors();
    for (auto &e : s.oirs)
        e.width = e.height = 1e-4; // every reflection misses its mirror
    s.oirs[0].alpha = s.oirs[1].alpha = s.oirs[2].alpha = s.oirs[3].alpha = 0.4;
    try
    {
        run_algorithm1(s, LocalizationConfig{}, 1, 0);
        FAIL("expected InvalidLink");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::InvalidLink);
    }
    CHECK_THROWS_AS(run_algorithm1(Scene{}, LocalizationConfig{}, 1, 0), Error);
}
