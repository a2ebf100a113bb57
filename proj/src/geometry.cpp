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
#include "oirs_vlp/geometry.hpp"
#include "oirs_vlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oirs
{
    const char *to_string(ErrorKind kind)
    {
        switch (kind)
        {
        case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorKind::GimbalLock: return "GimbalLock";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::Precondition: return "Precondition";
        case ErrorKind::InvalidLink: return "InvalidLink";
        case ErrorKind::DegenerateSample: return "DegenerateSample";
        case ErrorKind::GridExhausted: return "GridExhausted";
        case ErrorKind::SingularGeometry: return "SingularGeometry";
        case ErrorKind::SingularNormalEquations: return "SingularNormalEquations";
        case ErrorKind::NoBracket: return "NoBracket";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::IoError: return "IoError";
        }
        return "Error";
    }

    const char *to_string(ReflectionStatus status)
    {
        switch (status)
        {
        case ReflectionStatus::Valid: return "valid";
        case ReflectionStatus::OutOfAperture: return "out_of_aperture";
        case ReflectionStatus::BehindPlane: return "behind_plane";
        case ReflectionStatus::GrazingIncidence: return "grazing_incidence";
        }
        return "unknown";
    }

    Vec3 OirsElement::normal() const
    {
        return normal_from_tilt(alpha, beta, wall_normal);
    }

    Vec3 OirsElement::wall_axis() const
    {
        return wall_normal.cross(Vec3::UnitZ());
    }

    void validate(const OirsElement &elem, const std::string &label)
    {
        const double half_pi = 0.5 * std::numbers::pi;
        if (!(elem.width > 0.0) || !(elem.height > 0.0))
            fail(ErrorKind::ValidationError, label + ": width and height must be positive");
        if (!(std::abs(elem.alpha) < half_pi) || !(std::abs(elem.beta) < half_pi))
            fail(ErrorKind::ValidationError, label + ": tilt angles must lie strictly inside (-90, 90) deg");
        if (std::abs(elem.wall_normal.norm() - 1.0) > 1e-12 || std::abs(elem.wall_normal.z()) > 1e-12)
            fail(ErrorKind::ValidationError, label + ": wall normal must be a horizontal unit vector");
        if (!(elem.reflectivity > 0.0) || elem.reflectivity > 1.0)
            fail(ErrorKind::ValidationError, label + ": reflectivity must lie in (0, 1]");
        if (!elem.center.allFinite())
            fail(ErrorKind::ValidationError, label + ": center is not finite");
    }

    Vec3 steering_normal(const Vec3 &q, const Vec3 &w, const Vec3 &u_hat)
    {
        const Vec3 to_led = q - w, to_pd = u_hat - w;
        const double n_led = to_led.norm(), n_pd = to_pd.norm();
        if (n_led == 0.0 || n_pd == 0.0)
            fail(ErrorKind::DegenerateGeometry, "steering target coincides with the mirror center");

        const Vec3 sum = to_led / n_led + to_pd / n_pd;
        const double den = sum.norm(); // equals sqrt(2 + 2 cos) of the two arms
        if (den < 1e-9)
            fail(ErrorKind::DegenerateGeometry, "LED and PD directions are antiparallel");
        return sum / den;
    }

    Vec3 normal_from_tilt(double alpha, double beta, const Vec3 &wall_normal)
    {
        const Vec3 h = wall_normal.cross(Vec3::UnitZ());
        const double cb = std::cos(beta);
        return cb * std::sin(alpha) * h + cb * std::cos(alpha) * wall_normal + std::sin(beta) * Vec3::UnitZ();
    }

    Tilt tilt_angles_from_normal(const Vec3 &o, const Vec3 &wall_normal)
    {
        double sb = o.z();
        if (std::abs(sb) > 1.0 + 1e-12)
            fail(ErrorKind::OutOfDomain, "normal has |z| > 1");
        sb = std::clamp(sb, -1.0, 1.0);

        Tilt t;
        t.beta = std::asin(sb);
        const double cb = std::cos(t.beta);
        if (cb < 1e-9)
            fail(ErrorKind::GimbalLock, "mirror normal is vertical");

        double sa = o.dot(wall_normal.cross(Vec3::UnitZ())) / cb;
        if (std::abs(sa) > 1.0 + 1e-12)
            fail(ErrorKind::OutOfDomain, "horizontal tilt argument exceeds 1");
        t.alpha = std::asin(std::clamp(sa, -1.0, 1.0));
        return t;
    }

    std::pair<Vec3, Vec3> mirror_axes(const OirsElement &elem)
    {
        const Vec3 h = elem.wall_axis();
        const Vec3 &n0 = elem.wall_normal;
        const double ca = std::cos(elem.alpha), sa = std::sin(elem.alpha);
        const double cb = std::cos(elem.beta), sb = std::sin(elem.beta);
        Vec3 horizontal = ca * h - sa * n0;
        Vec3 vertical = -sb * (sa * h + ca * n0) + cb * Vec3::UnitZ();
        return {horizontal, vertical};
    }

    Reflection reflection_point(const Vec3 &q, const Vec3 &u, const OirsElement &elem)
    {
        const Vec3 o = elem.normal();
        const Vec3 &w = elem.center;
        const double hq = (q - w).dot(o); // heights above the mirror plane
        const double hu = (u - w).dot(o);

        Reflection out;
        if (!(hq > 0.0) || !(hu > 0.0))
        {
            out.status = ReflectionStatus::BehindPlane;
            return out;
        }

        // Mirror image of the LED; the specular point is where image->PD pierces the plane.
        const Vec3 image = q - 2.0 * hq * o;
        const double t = hq / (hq + hu);
        out.point = image + t * (u - image);

        const double cos_inc = hq / (q - out.point).norm();
        if (cos_inc < 1e-6)
        {
            out.status = ReflectionStatus::GrazingIncidence;
            return out;
        }

        const auto [ax_h, ax_v] = mirror_axes(elem);
        const Vec3 local = out.point - w;
        if (std::abs(local.dot(ax_h)) > 0.5 * elem.width || std::abs(local.dot(ax_v)) > 0.5 * elem.height)
        {
            out.status = ReflectionStatus::OutOfAperture;
            return out;
        }
        out.status = ReflectionStatus::Valid;
        return out;
    }

    PathGeometry path_geometry(const Vec3 &q, const Vec3 &u, const std::vector<Reflection> &reflections)
    {
        PathGeometry g;
        g.d = (q - u).norm();
        // LED points down and the PD points up, so both angles share q_z / d
        g.theta = std::acos(std::clamp(q.z() / g.d, -1.0, 1.0));
        g.phi = g.theta;

        g.nlos.reserve(reflections.size());
        for (const auto &refl : reflections)
        {
            if (!refl.valid())
            {
                g.nlos.emplace_back(std::nullopt);
                continue;
            }
            NlosPath p;
            p.r = refl.point;
            p.s = (q - p.r).norm();
            p.d = (p.r - u).norm();
            p.theta = std::acos(std::clamp((q.z() - p.r.z()) / p.s, -1.0, 1.0));
            p.phi = std::acos(std::clamp(p.r.z() / p.d, -1.0, 1.0));
            g.nlos.emplace_back(p);
        }
        return g;
    }
}
