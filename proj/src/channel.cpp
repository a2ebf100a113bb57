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
#include "oirs_vlp/channel.hpp"
#include "oirs_vlp/errors.hpp"

#include <cmath>
#include <numbers>

namespace oirs
{
    double lambertian_order(double half_intensity_rad)
    {
        if (!(half_intensity_rad > 0.0) || !(half_intensity_rad < 0.5 * std::numbers::pi))
            fail(ErrorKind::OutOfDomain, "half-intensity angle must lie in (0, 90) deg");
        return -1.0 / std::log2(std::cos(half_intensity_rad));
    }

    double concentrator_gain(double phi, double psi, double refractive_index)
    {
        if (phi < 0.0 || phi > psi)
            return 0.0;
        const double s = std::sin(psi);
        return refractive_index * refractive_index / (s * s);
    }

    double shot_variance(double received_power_w, const NoiseParams &np, double responsivity)
    {
        const double two_qb = 2.0 * np.electron_charge_c * np.bandwidth_hz;
        return two_qb * responsivity * received_power_w + two_qb * np.background_current_a;
    }

    double thermal_variance(const NoiseParams &np, double area_m2)
    {
        const double pi = std::numbers::pi;
        const double kt = np.boltzmann_j_per_k * np.temperature_k;
        const double B = np.bandwidth_hz;
        const double c = np.capacitance_f_per_m2 * area_m2;
        const double feedback = 8.0 * pi * kt / np.open_loop_gain * c * np.noise_bw_factor_i2 * B * B;
        const double fet = 16.0 * pi * pi * kt * np.channel_noise_factor / np.transconductance_s * c * c *
                           np.noise_bw_factor_i3 * B * B * B;
        return feedback + fet;
    }

    NoiseCoefficients noise_coefficients(const NoiseParams &np, double area_m2)
    {
        NoiseCoefficients nc;
        nc.b = 2.0 * np.electron_charge_c * np.bandwidth_hz;
        nc.a = thermal_variance(np, area_m2) + nc.b * np.background_current_a;
        return nc;
    }

    void validate(const PdParams &pd)
    {
        if (!(pd.area_m2 > 0.0))
            fail(ErrorKind::ValidationError, "area_cm2 must be positive");
        if (!(pd.filter_gain > 0.0))
            fail(ErrorKind::ValidationError, "filter_gain must be positive");
        if (!(pd.fov_rad > 0.0) || pd.fov_rad > 0.5 * std::numbers::pi)
            fail(ErrorKind::ValidationError, "fov_deg must lie in (0, 90]");
        if (!(pd.refractive_index >= 1.0))
            fail(ErrorKind::ValidationError, "refractive_index must be >= 1");
        if (!(pd.responsivity_a_per_w > 0.0))
            fail(ErrorKind::ValidationError, "responsivity_a_per_w must be positive");
        if (!(pd.half_intensity_rad > 0.0) || !(pd.half_intensity_rad < 0.5 * std::numbers::pi))
            fail(ErrorKind::ValidationError, "half_intensity_deg must lie in (0, 90)");
    }

    void validate(const NoiseParams &np)
    {
        auto positive = [](double v, const char *key)
        {
            if (!(v > 0.0) || !std::isfinite(v))
                fail(ErrorKind::ValidationError, std::string(key) + " must be strictly positive");
        };
        positive(np.electron_charge_c, "electron_charge_c");
        positive(np.bandwidth_hz, "bandwidth_hz");
        positive(np.background_current_a, "background_current_pa");
        positive(np.noise_bw_factor_i2, "noise_bw_factor_i2");
        positive(np.noise_bw_factor_i3, "noise_bw_factor_i3");
        positive(np.boltzmann_j_per_k, "boltzmann_j_per_k");
        positive(np.temperature_k, "temperature_k");
        positive(np.open_loop_gain, "open_loop_gain");
        positive(np.capacitance_f_per_m2, "capacitance_pf_per_cm2");
        positive(np.channel_noise_factor, "channel_noise_factor");
        positive(np.transconductance_s, "transconductance_ms");
    }
}
