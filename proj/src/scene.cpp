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
#include "oirs_vlp/scene.hpp"
#include "oirs_vlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace oirs
{
    namespace
    {
        bool inside_box(const Vec3 &p, const Vec3 &room)
        {
            for (int i = 0; i < 3; ++i)
                if (!(p[i] >= 0.0) || !(p[i] <= room[i]))
                    return false;
            return true;
        }

        // A T G (m+1) / (2 pi), shared by the LoS and NLoS gains.
        double gain_constant(const Scene &scene, double G)
        {
            const double m = lambertian_order(scene);
            return scene.pd_params.area_m2 * scene.pd_params.filter_gain * G * (m + 1.0) / (2.0 * std::numbers::pi);
        }
    }

    void validate(const Scene &scene)
    {
        if (!(scene.room.minCoeff() > 0.0))
            fail(ErrorKind::ValidationError, "room dimensions must be positive");
        if (!inside_box(scene.led, scene.room) || !(scene.led.z() > 0.0))
            fail(ErrorKind::ValidationError, "LED position lies outside the room");
        if (!inside_box(scene.pd, scene.room))
            fail(ErrorKind::ValidationError, "PD position lies outside the room");
        if (scene.pd.z() != 0.0)
            fail(ErrorKind::ValidationError, "PD must lie on the floor (z = 0)");
        for (std::size_t n = 0; n < scene.oirs.size(); ++n)
        {
            const std::string label = "oirs " + std::to_string(n + 1);
            validate(scene.oirs[n], label);
            if (!inside_box(scene.oirs[n].center, scene.room))
                fail(ErrorKind::ValidationError, label + ": center lies outside the room");
        }
        validate(scene.pd_params);
        validate(scene.noise);
        if (!(scene.power.watts >= 0.0) || !(scene.power.efficacy_lm_per_w > 0.0))
            fail(ErrorKind::ValidationError, "power must be non-negative and efficacy positive");
    }

    double lambertian_order(const Scene &scene)
    {
        return lambertian_order(scene.pd_params.half_intensity_rad);
    }

    double concentrator_gain(const Scene &scene)
    {
        return concentrator_gain(0.0, scene.pd_params.fov_rad, scene.pd_params.refractive_index);
    }

    NoiseCoefficients noise_coefficients(const Scene &scene)
    {
        return noise_coefficients(scene.noise, scene.pd_params.area_m2);
    }

    double los_gain(double d, const Scene &scene)
    {
        const double qz = scene.led.z();
        const double m = lambertian_order(scene);
        const double phi = std::acos(std::clamp(qz / d, -1.0, 1.0));
        const double G = concentrator_gain(phi, scene.pd_params.fov_rad, scene.pd_params.refractive_index);
        return gain_constant(scene, G) * std::pow(qz, m + 1.0) / std::pow(d, m + 3.0);
    }

    double nlos_gain(double s, double d, const Vec3 &r, double reflectivity, const Scene &scene)
    {
        const double qz = scene.led.z();
        const double m = lambertian_order(scene);
        const double phi = std::acos(std::clamp(r.z() / d, -1.0, 1.0));
        const double G = concentrator_gain(phi, scene.pd_params.fov_rad, scene.pd_params.refractive_index);
        const double sd = s + d;
        return reflectivity * gain_constant(scene, G) * std::pow(qz - r.z(), m) * r.z() /
               (std::pow(s, m) * sd * sd * d);
    }

    std::vector<Reflection> reflections(const Scene &scene)
    {
        std::vector<Reflection> out;
        out.reserve(scene.oirs.size());
        for (const auto &e : scene.oirs)
            out.push_back(reflection_point(scene.led, scene.pd, e));
        return out;
    }

    PathGeometry path_geometry(const Scene &scene)
    {
        return path_geometry(scene.led, scene.pd, reflections(scene));
    }

    double los_mean(const Scene &scene)
    {
        const double d = (scene.led - scene.pd).norm();
        return scene.pd_params.responsivity_a_per_w * scene.power.watts * los_gain(d, scene);
    }

    double nlos_mean(const Scene &scene, std::size_t n)
    {
        const auto &elem = scene.oirs.at(n);
        const Reflection refl = reflection_point(scene.led, scene.pd, elem);
        if (!refl.valid())
            return 0.0;
        const double s = (scene.led - refl.point).norm();
        const double d = (refl.point - scene.pd).norm();
        return scene.pd_params.responsivity_a_per_w * scene.power.watts *
               nlos_gain(s, d, refl.point, elem.reflectivity, scene);
    }

    double snr(const Scene &scene, const std::vector<bool> &activation)
    {
        double mean = los_mean(scene);
        for (std::size_t n = 0; n < activation.size() && n < scene.oirs.size(); ++n)
            if (activation[n])
                mean += nlos_mean(scene, n);
        return mean * mean / noise_coefficients(scene).variance(mean);
    }

    double snr_db(const Scene &scene, const std::vector<bool> &activation)
    {
        return 10.0 * std::log10(snr(scene, activation));
    }

    Scene steer_toward(Scene scene, const Vec3 &target)
    {
        for (auto &e : scene.oirs)
        {
            const Tilt t = tilt_angles_from_normal(steering_normal(scene.led, e.center, target), e.wall_normal);
            e.alpha = t.alpha;
            e.beta = t.beta;
        }
        return scene;
    }

    Scene with_activation(Scene scene, std::optional<std::size_t> n)
    {
        for (std::size_t i = 0; i < scene.oirs.size(); ++i)
            scene.oirs[i].active = n && *n == i;
        return scene;
    }

    std::optional<std::size_t> active_element(const Scene &scene)
    {
        std::optional<std::size_t> found;
        for (std::size_t i = 0; i < scene.oirs.size(); ++i)
        {
            if (!scene.oirs[i].active)
                continue;
            if (found)
                fail(ErrorKind::Precondition, "more than one OIRS element is active");
            found = i;
        }
        return found;
    }
}
