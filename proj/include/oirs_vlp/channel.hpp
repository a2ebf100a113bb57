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

namespace oirs
{
    struct PdParams
    {
        double area_m2 = 0.2e-4;
        double filter_gain = 1.0;
        double fov_rad = 70.0 * 0.017453292519943295;
        double refractive_index = 1.5;
        double responsivity_a_per_w = 0.54;
        double half_intensity_rad = 70.0 * 0.017453292519943295;
    };

    struct NoiseParams
    {
        double electron_charge_c = 1.602176634e-19;
        double bandwidth_hz = 5e6;
        double background_current_a = 5e-12;
        double noise_bw_factor_i2 = 0.562;
        double noise_bw_factor_i3 = 0.0868;
        double boltzmann_j_per_k = 1.380649e-23;
        double temperature_k = 295.0;
        double open_loop_gain = 10.0;
        double capacitance_f_per_m2 = 112e-12 / 1e-4;
        double channel_noise_factor = 1.5;
        double transconductance_s = 30e-3;
    };

    struct Power
    {
        double watts = 0.0;
        double efficacy_lm_per_w = 683.0;

        double lumens() const { return watts * efficacy_lm_per_w; }

        static Power from_lumens(double lumens, double efficacy_lm_per_w)
        {
            return {lumens / efficacy_lm_per_w, efficacy_lm_per_w};
        }
    };

    // Photocurrent variance model sigma^2(mean) = a + b * mean.
    struct NoiseCoefficients
    {
        double a = 0.0; // A^2
        double b = 0.0; // A

        double variance(double mean_current) const { return a + b * mean_current; }
    };

    double lambertian_order(double half_intensity_rad);

    double concentrator_gain(double phi, double psi, double refractive_index);

    double shot_variance(double received_power_w, const NoiseParams &np, double responsivity);

    double thermal_variance(const NoiseParams &np, double area_m2);

    NoiseCoefficients noise_coefficients(const NoiseParams &np, double area_m2);

    void validate(const PdParams &pd);
    void validate(const NoiseParams &np);
}
