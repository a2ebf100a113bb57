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
#include "oirs_vlp/bounds.hpp"
#include "oirs_vlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oirs
{
    double gaussian_fim_entry(double dmean_i, double dmean_j, double dvar_i, double dvar_j, double sigma2,
                              double count)
    {
        if (!(sigma2 > 0.0))
            fail(ErrorKind::Precondition, "variance must be positive");
        return count * (dmean_i * dmean_j / sigma2 + dvar_i * dvar_j / (2.0 * sigma2 * sigma2));
    }

    double fim_los(double d, std::size_t K, LosCoefficient xi, NoiseCoefficients nc, double m)
    {
        const double mu = xi.xi / std::pow(d, m + 3.0);
        const double dmu = -(m + 3.0) * mu / d;
        return gaussian_fim_entry(dmu, dmu, nc.b * dmu, nc.b * dmu, nc.variance(mu), static_cast<double>(K));
    }

    double fim_los(double d, std::size_t K, const Scene &scene)
    {
        return fim_los(d, K, los_coefficient(scene), noise_coefficients(scene), lambertian_order(scene));
    }

    namespace
    {
        double chi_mean(double dn, NlosCoefficient c)
        {
            return c.omega / ((c.s + dn) * (c.s + dn) * dn);
        }

        double chi_mean_derivative(double dn, NlosCoefficient c)
        {
            return -chi_mean(dn, c) * (c.s + 3.0 * dn) / (dn * (c.s + dn));
        }
    }

    double fim_nlos(double dn, NlosCoefficient coeff, std::size_t Kn, double los_mean, NoiseCoefficients nc)
    {
        const double g = chi_mean_derivative(dn, coeff);
        const double var = nc.variance(los_mean + chi_mean(dn, coeff));
        return gaussian_fim_entry(g, g, nc.b * g, nc.b * g, var, static_cast<double>(Kn));
    }

    bool link_visible(const Scene &scene, std::size_t n)
    {
        const Reflection refl = reflection_point(scene.led, scene.pd, scene.oirs.at(n));
        if (!refl.valid())
            return false;
        const double dn = (refl.point - scene.pd).norm();
        return std::acos(std::clamp(refl.point.z() / dn, -1.0, 1.0)) <= scene.pd_params.fov_rad;
    }

    FisherMatrices fisher_matrices(const Scene &scene, std::size_t K, const std::vector<std::size_t> &K_list)
    {
        const std::size_t N = scene.size();
        if (K_list.size() != N)
            fail(ErrorKind::Precondition, "one NLoS sample count per OIRS element is required");

        const double m = lambertian_order(scene);
        const NoiseCoefficients nc = noise_coefficients(scene);
        const LosCoefficient xi = los_coefficient(scene);
        const Vec3 &q = scene.led, &u = scene.pd;
        const double d = (q - u).norm();
        const double mu0 = xi.xi / std::pow(d, m + 3.0);
        const double dmu0 = -(m + 3.0) * mu0 / d;

        FisherMatrices fm;
        fm.j_dist = Eigen::MatrixXd::Zero(N + 1, N + 1);
        fm.t_mat = Eigen::MatrixXd::Zero(2, N + 1);
        fm.j_los = fim_los(d, K, xi, nc, m);
        fm.j_dist(0, 0) = fm.j_los;
        fm.t_mat.col(0) = (u - q).head<2>() / d;

        for (std::size_t n = 0; n < N; ++n)
        {
            if (!link_visible(scene, n))
                fail(ErrorKind::InvalidLink, "element " + std::to_string(n + 1) + " has no visible reflection");
            const auto &elem = scene.oirs[n];
            const Vec3 r = reflection_point(q, u, elem).point;
            const double dn = (r - u).norm();
            const NlosCoefficient c = nlos_coefficient(scene, r, elem.reflectivity);

            // The NLoS phase mean mu0(d) + chi(d_n) carries information on both d and d_n.
            const double var = nc.variance(mu0 + chi_mean(dn, c));
            const double g = chi_mean_derivative(dn, c);
            const double Kn = static_cast<double>(K_list[n]);
            const auto i = static_cast<Eigen::Index>(n + 1);
            fm.j_dist(0, 0) += gaussian_fim_entry(dmu0, dmu0, nc.b * dmu0, nc.b * dmu0, var, Kn);
            fm.j_dist(i, i) = gaussian_fim_entry(g, g, nc.b * g, nc.b * g, var, Kn);
            fm.j_dist(0, i) = fm.j_dist(i, 0) = gaussian_fim_entry(dmu0, g, nc.b * dmu0, nc.b * g, var, Kn);
            fm.j_nlos.push_back(fim_nlos(dn, c, K_list[n], mu0, nc));
            fm.t_mat.col(i) = (u - r).head<2>() / dn;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fm.j_dist, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo > 1e12)
            fail(ErrorKind::SingularGeometry, "distance-domain FIM is ill-conditioned");

        fm.j_pos = fm.t_mat * fm.j_dist * fm.t_mat.transpose();
        return fm;
    }

    Eigen::MatrixXd joint_fim(const Scene &scene, std::size_t K, const std::vector<std::size_t> &K_list)
    {
        return fisher_matrices(scene, K, K_list).j_dist;
    }

    BoundsReport peb(const Scene &scene, std::size_t K, const std::vector<std::size_t> &K_list)
    {
        if (scene.size() < 2)
            fail(ErrorKind::Precondition, "position bound needs at least two OIRS elements");

        BoundsReport rep;
        rep.fisher = fisher_matrices(scene, K, K_list);
        rep.deb_los = deb(rep.fisher.j_los);
        for (double j : rep.fisher.j_nlos)
            rep.deb_nlos.push_back(deb(j));

        const Eigen::Matrix2d &J = rep.fisher.j_pos;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(J, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo > 1e12)
            fail(ErrorKind::SingularGeometry, "position-domain FIM is singular (collinear anchors)");

        const Eigen::LDLT<Eigen::Matrix2d> ldlt(J);
        rep.peb = std::sqrt(ldlt.solve(Eigen::Matrix2d::Identity()).trace());
        return rep;
    }
}
