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
#include "oirs_vlp/localization.hpp"
#include "oirs_vlp/bounds.hpp"
#include "oirs_vlp/errors.hpp"
#include "oirs_vlp/observation.hpp"

#include <cmath>

namespace oirs
{
    SolverTrace iwls_solve(const AnchorSet &set, const Vec2 &u0, double eps, std::size_t max_iter)
    {
        const std::size_t J = set.anchors.size();
        if (J < 3 || set.sq_dist.size() != J || set.weights.size() != J)
            fail(ErrorKind::Precondition, "anchor set needs at least 3 consistent entries");
        for (double w : set.weights)
            if (!(w > 0.0) || !std::isfinite(w))
                fail(ErrorKind::Precondition, "weights must be positive and finite");
        if (!u0.allFinite())
            fail(ErrorKind::Precondition, "initial point is not finite");

        SolverTrace tr;
        tr.iterates.push_back(u0);
        Vec2 u = u0;
        for (std::size_t it = 0; it < max_iter; ++it)
        {
            Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
            Vec2 g = Vec2::Zero();
            for (std::size_t j = 0; j < J; ++j)
            {
                const Vec3 &p = set.anchors[j];
                const Vec2 diff = u - p.head<2>();
                const double f = diff.squaredNorm() + p.z() * p.z();
                const Vec2 h = 2.0 * diff;
                A += set.weights[j] * h * h.transpose();
                g += set.weights[j] * h * (set.sq_dist[j] - f);
            }

            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
            if (!(lo > 0.0) || hi / lo > 1e12)
                fail(ErrorKind::SingularNormalEquations, "normal equations are ill-conditioned");

            const Vec2 step = A.ldlt().solve(g);
            u += step;
            tr.iterates.push_back(u);
            tr.inner_iterations = it + 1;
            if (step.norm() < eps)
            {
                tr.converged = true;
                tr.stop_reason = StopReason::Threshold;
                break;
            }
        }
        return tr;
    }

    const char *to_string(WeightMode mode)
    {
        switch (mode)
        {
        case WeightMode::InvDeb: return "inv_deb";
        case WeightMode::InvDebSq: return "inv_deb_sq";
        case WeightMode::Uniform: return "uniform";
        }
        return "?";
    }

    WeightMode parse_weight_mode(const std::string &text)
    {
        if (text == "inv_deb")
            return WeightMode::InvDeb;
        if (text == "inv_deb_sq")
            return WeightMode::InvDebSq;
        if (text == "uniform")
            return WeightMode::Uniform;
        fail(ErrorKind::ValidationError, "weight mode must be inv_deb, inv_deb_sq or uniform, got '" + text + "'");
    }

    Scene rest_orientation(Scene scene)
    {
        for (auto &e : scene.oirs)
            e.alpha = e.beta = 0.0;
        return scene;
    }

    namespace
    {
        double weight_from_fisher(double fisher, WeightMode mode)
        {
            switch (mode)
            {
            case WeightMode::InvDeb: return 1.0 / deb(fisher);
            case WeightMode::InvDebSq: return fisher;
            case WeightMode::Uniform: return 1.0;
            }
            return 1.0;
        }

        bool droppable(ErrorKind k)
        {
            return k == ErrorKind::InvalidLink || k == ErrorKind::DegenerateSample || k == ErrorKind::GridExhausted;
        }
    }

    LocalizationRun run_algorithm1(const Scene &scene, const LocalizationConfig &cfg, std::uint64_t seed,
                                   std::uint64_t trial)
    {
        const std::size_t N = scene.size();
        if (N < 2)
            fail(ErrorKind::Precondition, "localization needs at least two OIRS elements");

        const double m = lambertian_order(scene);
        const NoiseCoefficients nc = noise_coefficients(scene);
        const LosCoefficient xi = los_coefficient(scene);
        GridSpec grid = cfg.grid;
        if (!(grid.hi > grid.lo))
            grid.hi = scene.room.norm();

        Vec2 u_hat = Vec2::Zero();
        if (cfg.random_init)
        {
            const CounterRng rng(seed, trial, ~std::uint64_t{0});
            u_hat = Vec2(rng.uniform(0) * scene.room.x(), rng.uniform(1) * scene.room.y());
        }
        else
        {
            u_hat = scene.led.head<2>();
            for (const auto &e : scene.oirs)
                u_hat += e.center.head<2>();
            u_hat /= static_cast<double>(N + 1);
        }

        LocalizationRun run;
        Scene current = with_activation(scene, std::nullopt);
        for (std::size_t t = 0; t < cfg.outer_max; ++t)
        {
            OuterIteration it;
            const std::uint64_t phase0 = t * (N + 1);

            const ObservationBatch los_batch = sample_los(current, cfg.K, CounterRng(seed, trial, phase0));
            const SufficientStats los_st = sufficient_stats(los_batch.samples);
            it.los = cfg.los_estimator == Method::ML ? ml_los(los_st, xi, nc, m) : rml_los(los_st, xi, m);
            const double d_hat = it.los.value;
            it.los.deb_weight = weight_from_fisher(fim_los(d_hat, cfg.K, xi, nc, m), cfg.weight_mode);

            AnchorSet set;
            set.anchors.push_back(scene.led);
            set.sq_dist.push_back(d_hat * d_hat);
            set.weights.push_back(it.los.deb_weight);

            for (std::size_t n = 0; n < N; ++n)
            {
                const auto &elem = current.oirs[n];
                // Mirror center stands in for the unknown reflection point
                const NlosCoefficient coeff = nlos_coefficient(current, elem.center, elem.reflectivity);
                try
                {
                    const ObservationBatch b = sample_nlos(with_activation(current, n), n, cfg.K_n,
                                                           CounterRng(seed, trial, phase0 + n + 1));
                    const CompensatedBatch comp = subtract_los(b, d_hat, xi.xi, m);
                    const SufficientStats chi = sufficient_stats(comp.samples);
                    DistanceEstimate e = cfg.nlos_estimator == Method::ML
                                             ? ml_nlos(chi, coeff, d_hat, xi, nc, m, grid)
                                             : rml_nlos(chi, coeff);
                    e.oirs = n;
                    const double fisher = fim_nlos(e.value, coeff, cfg.K_n, xi.xi / std::pow(d_hat, m + 3.0), nc);
                    if (!(fisher > 0.0) || !std::isfinite(fisher) || !(e.value > 0.0))
                    {
                        it.dropped_links.push_back(n);
                        continue;
                    }
                    e.deb_weight = weight_from_fisher(fisher, cfg.weight_mode);
                    set.anchors.push_back(elem.center);
                    set.sq_dist.push_back(e.value * e.value);
                    set.weights.push_back(e.deb_weight);
                    it.nlos.push_back(e);
                }
                catch (const Error &err)
                {
                    if (!droppable(err.kind()))
                        throw;
                    it.dropped_links.push_back(n);
                }
            }
            if (set.anchors.size() < 3)
                fail(ErrorKind::InvalidLink, "fewer than three usable anchors in this iteration");

            it.trace = iwls_solve(set, u_hat, cfg.inner_eps, cfg.inner_max);
            const Vec2 previous = u_hat;
            u_hat = it.trace.final();
            it.position = Vec3(u_hat.x(), u_hat.y(), 0.0);

            current = steer_toward(current, it.position);
            for (const auto &e : current.oirs)
                it.steering.push_back({e.alpha, e.beta});
            run.outer_iterations.push_back(std::move(it));

            if (t > 0 && (u_hat - previous).norm() < cfg.outer_eps)
                break;
        }
        run.final_position = run.outer_iterations.back().position;
        return run;
    }
}
