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

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace oirs
{
    using Vec2 = Eigen::Vector2d;
    using Vec3 = Eigen::Vector3d;

    // One tiltable mirror mounted on a vertical wall. The tilt angles are measured in the wall
    // frame: alpha rotates about the vertical axis (yaw), beta lifts the normal out of the
    // horizontal plane (pitch). At alpha = beta = 0 the mirror normal equals wall_normal.
    struct OirsElement
    {
        Vec3 center = Vec3::Zero();
        double width = 1.0;  // m, horizontal extent
        double height = 1.0; // m, vertical extent
        double alpha = 0.0;  // rad
        double beta = 0.0;   // rad
        bool active = false;
        Vec3 wall_normal = Vec3::UnitY(); // inward-facing, horizontal
        double reflectivity = 0.95;

        Vec3 normal() const;
        Vec3 wall_axis() const; // horizontal in-plane axis of the wall, wall_normal x e_z
    };

    void validate(const OirsElement &elem, const std::string &label = "oirs");

    struct Tilt
    {
        double alpha = 0.0;
        double beta = 0.0;
    };

    Vec3 steering_normal(const Vec3 &q, const Vec3 &w, const Vec3 &u_hat);

    Vec3 normal_from_tilt(double alpha, double beta, const Vec3 &wall_normal);

    Tilt tilt_angles_from_normal(const Vec3 &o, const Vec3 &wall_normal);

    // Orthonormal in-plane axes of the tilted mirror: first is horizontal, second points "up"
    // along the mirror face.
    std::pair<Vec3, Vec3> mirror_axes(const OirsElement &elem);

    enum class ReflectionStatus
    {
        Valid,
        OutOfAperture,
        BehindPlane,
        GrazingIncidence
    };

    const char *to_string(ReflectionStatus status);

    struct Reflection
    {
        ReflectionStatus status = ReflectionStatus::BehindPlane;
        Vec3 point = Vec3::Zero(); // filled whenever the plane intersection exists

        bool valid() const { return status == ReflectionStatus::Valid; }
    };

    Reflection reflection_point(const Vec3 &q, const Vec3 &u, const OirsElement &elem);

    struct NlosPath
    {
        Vec3 r = Vec3::Zero();
        double s = 0.0;       // LED to reflection point
        double d = 0.0;       // reflection point to PD
        double theta = 0.0;   // irradiance angle at the LED
        double phi = 0.0;     // incidence angle at the PD
    };

    struct PathGeometry
    {
        double d = 0.0;
        double theta = 0.0;
        double phi = 0.0;
        std::vector<std::optional<NlosPath>> nlos;
    };

    PathGeometry path_geometry(const Vec3 &q, const Vec3 &u, const std::vector<Reflection> &reflections);
}
