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

#include "oirs_vlp/channel.hpp"
#include "oirs_vlp/geometry.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace oirs
{
    struct Scene
    {
        Vec3 room{5.0, 5.0, 3.0};
        Vec3 led{2.5, 2.5, 3.0};
        std::vector<OirsElement> oirs;
        Vec3 pd{3.0, 3.0, 0.0};
        PdParams pd_params;
        NoiseParams noise;
        Power power;

        std::size_t size() const { return oirs.size(); }
    };

    void validate(const Scene &scene);

    double lambertian_order(const Scene &scene);

    // In-FoV concentrator gain, i.e. the constant the estimators treat as known.
    double concentrator_gain(const Scene &scene);

    NoiseCoefficients noise_coefficients(const Scene &scene);

    double los_gain(double d, const Scene &scene);

    double nlos_gain(double s, double d, const Vec3 &r, double reflectivity, const Scene &scene);

    std::vector<Reflection> reflections(const Scene &scene);

    PathGeometry path_geometry(const Scene &scene);

    // Mean photocurrents at the true PD position. The NLoS part is zero for an invalid link.
    double los_mean(const Scene &scene);
    double nlos_mean(const Scene &scene, std::size_t n);

    // Signal-to-noise ratio with the given activation pattern (linear, not dB).
    double snr(const Scene &scene, const std::vector<bool> &activation);
    double snr_db(const Scene &scene, const std::vector<bool> &activation);

    // Rotate every mirror so its specular point for a PD at target is the mirror center.
    Scene steer_toward(Scene scene, const Vec3 &target);

    // Activate exactly one element (or none).
    Scene with_activation(Scene scene, std::optional<std::size_t> n);

    // Returns the index of the single active element; throws if more than one is active.
    std::optional<std::size_t> active_element(const Scene &scene);
}
