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
#include "oirs_vlp/estimation.hpp"
#include "oirs_vlp/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace oirs
{
    LosCoefficient los_coefficient(const Scene &scene)
    {
        const double m = lambertian_order(scene);
        const auto &pd = scene.pd_params;
        const double qz = scene.led.z();
        return {pd.responsivity_a_per_w * scene.power.watts * pd.area_m2 * pd.filter_gain *
                concentrator_gain(scene) * (m + 1.0) * std::pow(qz, m + 1.0) / (2.0 * std::numbers::pi)};
    }

    NlosCoefficient nlos_coefficient(const Scene &scene, const Vec3 &r, double reflectivity)
    {
        const double m = lambertian_order(scene);
        const auto &pd = scene.pd_params;
        const double qz = scene.led.z();
        NlosCoefficient c;
        c.s = (scene.led - r).norm();
        c.omega = pd.responsivity_a_per_w * scene.power.watts * reflectivity * pd.area_m2 * pd.filter_gain *
                  concentrator_gain(scene) * (m + 1.0) * std::pow(qz - r.z(), m) * r.z() /
                  (2.0 * std::numbers::pi * std::pow(c.s, m));
        return c;
    }

    SufficientStats sufficient_stats(std::span<const double> samples)
    {
        SufficientStats st;
        st.count = samples.size();
        if (st.count == 0)
            fail(ErrorKind::Precondition, "empty sample batch");
        double sum = 0.0, sum_sq = 0.0;
        for (double x : samples)
        {
            sum += x;
            sum_sq += x * x;
        }
        const double n = static_cast<double>(st.count);
        st.s1 = sum / n;
        st.s2 = sum_sq / n;
        double acc = 0.0;
        for (double x : samples)
            acc += (x - st.s1) * (x - st.s1);
        st.var = acc / n;
        return st;
    }

    const char *to_string(Method method)
    {
        return method == Method::ML ? "ml" : "rml";
    }

    Method parse_method(const std::string &text)
    {
        if (text == "ml")
            return Method::ML;
        if (text == "rml")
            return Method::RML;
        fail(ErrorKind::ValidationError, "estimator must be 'ml' or 'rml', got '" + text + "'");
    }

    double los_negative_log_likelihood(double d, const SufficientStats &st, LosCoefficient xi,
                                       NoiseCoefficients nc, double m)
    {
        const double mu = xi.xi / std::pow(d, m + 3.0);
        const double v = nc.variance(mu);
        const double K = static_cast<double>(st.count);
        const double e = st.s1 - mu;
        return 0.5 * K * std::log(2.0 * std::numbers::pi * v) + K * (st.var + e * e) / (2.0 * v);
    }

    DistanceEstimate ml_los(const SufficientStats &st, LosCoefficient xi, NoiseCoefficients nc, double m)
    {
        const double a = nc.a, b = nc.b;
        const double den = 2.0 * a * st.s1 + b * st.s2 - a * b;
        if (!(den > 0.0))
            fail(ErrorKind::DegenerateSample, "LoS ML denominator is not positive");
        const double t = a + b * st.s1;
        const double disc = t * t + b * b * st.var + 0.25 * b * b * b * b;
        DistanceEstimate e;
        e.method = Method::ML;
        e.value = std::pow(xi.xi * (std::sqrt(disc) + a + 0.5 * b * b) / den, 1.0 / (m + 3.0));
        return e;
    }

    DistanceEstimate rml_los(const SufficientStats &st, LosCoefficient xi, double m)
    {
        if (!(st.s1 > 0.0))
            fail(ErrorKind::DegenerateSample, "LoS sample mean is not positive");
        DistanceEstimate e;
        e.method = Method::RML;
        e.value = std::pow(xi.xi / st.s1, 1.0 / (m + 3.0));
        return e;
    }

    namespace
    {
        double nlos_mean_model(double dn, NlosCoefficient c)
        {
            const double sd = c.s + dn;
            return c.omega / (sd * sd * dn);
        }
    }

    double nlos_negative_log_likelihood(double dn, const SufficientStats &chi, NlosCoefficient coeff, double d_hat,
                                        LosCoefficient xi, NoiseCoefficients nc, double m)
    {
        const double g = nlos_mean_model(dn, coeff);
        const double v = nc.variance(g + xi.xi / std::pow(d_hat, m + 3.0));
        const double K = static_cast<double>(chi.count);
        const double e = chi.s1 - g;
        return 0.5 * K * std::log(2.0 * std::numbers::pi * v) + K * (chi.var + e * e) / (2.0 * v);
    }

    double nlos_compressed_cost(double dn, const SufficientStats &chi, NlosCoefficient coeff)
    {
        const double e = chi.s1 - nlos_mean_model(dn, coeff);
        return chi.var + e * e;
    }

    DistanceEstimate ml_nlos(const SufficientStats &chi, NlosCoefficient coeff, double d_hat, LosCoefficient xi,
                             NoiseCoefficients nc, double m, const GridSpec &grid)
    {
        if (!(grid.hi > grid.lo) || !(grid.lo > 0.0) || !(grid.step > 0.0))
            fail(ErrorKind::Precondition, "NLoS grid must satisfy 0 < lo < hi and step > 0");

        const double mu0 = xi.xi / std::pow(d_hat, m + 3.0);
        const double K = static_cast<double>(chi.count);
        const double log2pi = std::log(2.0 * std::numbers::pi);
        auto f = [&](double dn)
        {
            const double g = nlos_mean_model(dn, coeff);
            const double v = nc.variance(g + mu0);
            const double e = chi.s1 - g;
            return 0.5 * K * (log2pi + std::log(v)) + K * (chi.var + e * e) / (2.0 * v);
        };

        const auto nodes = static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step)) + 1;
        std::size_t best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes; ++i)
        {
            const double v = f(grid.lo + static_cast<double>(i) * grid.step);
            if (v < best_val)
            {
                best_val = v;
                best = i;
            }
        }
        if (best == 0 || best + 1 == nodes)
            fail(ErrorKind::GridExhausted, "NLoS likelihood minimum sits on the grid boundary");

        // Golden-section refinement inside the two cells adjacent to the winning node
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = grid.lo + static_cast<double>(best - 1) * grid.step;
        double hi = grid.lo + static_cast<double>(best + 1) * grid.step;
        double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        while (hi - lo > grid.tol)
        {
            if (f1 < f2)
            {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = f(x1);
            }
            else
            {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = f(x2);
            }
        }
        double x = 0.5 * (lo + hi);
        if (f(x) > best_val)
            x = grid.lo + static_cast<double>(best) * grid.step;

        DistanceEstimate e;
        e.method = Method::ML;
        e.value = x;
        return e;
    }

    DistanceEstimate rml_nlos(const SufficientStats &chi, NlosCoefficient coeff)
    {
        const double T = chi.s1;
        if (!(T > 0.0))
            fail(ErrorKind::DegenerateSample, "compensated NLoS sample mean is not positive");
        const double w = coeff.omega, s = coeff.s;
        const double s3 = s * s * s, T2 = T * T;
        const double gamma = std::cbrt(2.0);
        const double ups = std::cbrt(3.0 * std::sqrt(3.0 * w * T2 * T2 * (27.0 * w + 4.0 * T * s3)) +
                                     2.0 * T2 * T * s3 + 27.0 * w * T2);

        DistanceEstimate e;
        e.method = Method::RML;
        e.value = gamma * T * s * s / (3.0 * ups) + ups / (3.0 * gamma * T) - 2.0 * s / 3.0;
        return e;
    }

    DistanceEstimate ml_los(const ObservationBatch &batch, LosCoefficient xi, NoiseCoefficients nc, double m)
    {
        return ml_los(sufficient_stats(batch.samples), xi, nc, m);
    }

    DistanceEstimate rml_los(const ObservationBatch &batch, LosCoefficient xi, double m)
    {
        return rml_los(sufficient_stats(batch.samples), xi, m);
    }

    DistanceEstimate ml_nlos(const CompensatedBatch &comp, NlosCoefficient coeff, LosCoefficient xi,
                             NoiseCoefficients nc, double m, const GridSpec &grid)
    {
        auto e = ml_nlos(sufficient_stats(comp.samples), coeff, comp.d_hat_used, xi, nc, m, grid);
        e.oirs = comp.oirs;
        return e;
    }

    DistanceEstimate rml_nlos(const CompensatedBatch &comp, NlosCoefficient coeff)
    {
        auto e = rml_nlos(sufficient_stats(comp.samples), coeff);
        e.oirs = comp.oirs;
        return e;
    }
}
