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

#include "oirs_vlp/observation.hpp"
#include "oirs_vlp/scene.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace oirs
{
    // LoS mean current is xi / d^(m+3).
    struct LosCoefficient
    {
        double xi = 0.0;
    };

    // Compensated NLoS mean current is omega / ((s + d_n)^2 d_n).
    struct NlosCoefficient
    {
        double omega = 0.0;
        double s = 0.0;
    };

    LosCoefficient los_coefficient(const Scene &scene);

    // Coefficient for a reflection assumed to happen at point r; pass the mirror center to get
    // the misaligned-mode coefficient used before the PD position is known.
    NlosCoefficient nlos_coefficient(const Scene &scene, const Vec3 &r, double reflectivity);

    struct SufficientStats
    {
        double s1 = 0.0; // sample mean
        double s2 = 0.0; // sample mean of squares
        double var = 0.0; // s2 - s1^2, accumulated about the mean to avoid cancellation
        std::size_t count = 0;

        double t1() const { return s1; } // NLoS naming of the same mean
    };

    SufficientStats sufficient_stats(std::span<const double> samples);

    enum class Method
    {
        ML,
        RML
    };

    const char *to_string(Method method);
    Method parse_method(const std::string &text);

    struct DistanceEstimate
    {
        double value = 0.0;               // m
        Method method = Method::RML;
        std::optional<std::size_t> oirs;  // empty for the LoS path
        double deb_weight = 0.0;          // filled by the localization loop
    };

    struct GridSpec
    {
        double lo = 0.01;   // m
        double hi = 0.0;    // m; 0 means "room diagonal"
        double step = 1e-3; // m
        double tol = 1e-6;  // m, golden-section bracket width
    };

    double los_negative_log_likelihood(double d, const SufficientStats &st, LosCoefficient xi,
                                       NoiseCoefficients nc, double m);

    DistanceEstimate ml_los(const SufficientStats &st, LosCoefficient xi, NoiseCoefficients nc, double m);
    DistanceEstimate rml_los(const SufficientStats &st, LosCoefficient xi, double m);

    double nlos_negative_log_likelihood(double dn, const SufficientStats &chi, NlosCoefficient coeff, double d_hat,
                                        LosCoefficient xi, NoiseCoefficients nc, double m);

    // Compressed relaxed cost (mean squared residual).
    double nlos_compressed_cost(double dn, const SufficientStats &chi, NlosCoefficient coeff);

    DistanceEstimate ml_nlos(const SufficientStats &chi, NlosCoefficient coeff, double d_hat, LosCoefficient xi,
                             NoiseCoefficients nc, double m, const GridSpec &grid);
    DistanceEstimate rml_nlos(const SufficientStats &chi, NlosCoefficient coeff);

    // Convenience overloads on raw batches.
    DistanceEstimate ml_los(const ObservationBatch &batch, LosCoefficient xi, NoiseCoefficients nc, double m);
    DistanceEstimate rml_los(const ObservationBatch &batch, LosCoefficient xi, double m);
    DistanceEstimate ml_nlos(const CompensatedBatch &comp, NlosCoefficient coeff, LosCoefficient xi,
                             NoiseCoefficients nc, double m, const GridSpec &grid);
    DistanceEstimate rml_nlos(const CompensatedBatch &comp, NlosCoefficient coeff);
}
