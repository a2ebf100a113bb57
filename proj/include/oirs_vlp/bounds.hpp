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

#include "oirs_vlp/estimation.hpp"
#include "oirs_vlp/scene.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

namespace oirs
{
    // Fisher information of one scalar Gaussian observation repeated `count` times, for two
    // parameters i and j that enter through the mean and the variance.
    double gaussian_fim_entry(double dmean_i, double dmean_j, double dvar_i, double dvar_j, double sigma2,
                              double count);

    double fim_los(double d, std::size_t K, LosCoefficient xi, NoiseCoefficients nc, double m);
    double fim_los(double d, std::size_t K, const Scene &scene);

    // los_mean is the LoS current that rides along in the NLoS phase (it only sets the variance).
    double fim_nlos(double dn, NlosCoefficient coeff, std::size_t Kn, double los_mean, NoiseCoefficients nc);

    inline double deb(double fisher) { return 1.0 / std::sqrt(fisher); }

    struct FisherMatrices
    {
        double j_los = 0.0;               // LoS batch alone
        std::vector<double> j_nlos;       // NLoS batch n alone, w.r.t. d_n
        Eigen::MatrixXd j_dist;           // (N+1) x (N+1), parameters (d, d_1..d_N)
        Eigen::MatrixXd t_mat;            // 2 x (N+1)
        Eigen::Matrix2d j_pos = Eigen::Matrix2d::Zero();
    };

    struct BoundsReport
    {
        double deb_los = 0.0;
        std::vector<double> deb_nlos;
        double peb = 0.0;
        FisherMatrices fisher;
    };

    // Joint distance-domain FIM at the scene's true PD position and current mirror orientations.
    // K_list holds one sample count per OIRS element.
    Eigen::MatrixXd joint_fim(const Scene &scene, std::size_t K, const std::vector<std::size_t> &K_list);

    FisherMatrices fisher_matrices(const Scene &scene, std::size_t K, const std::vector<std::size_t> &K_list);

    BoundsReport peb(const Scene &scene, std::size_t K, const std::vector<std::size_t> &K_list);

    // True when every link is a valid reflection whose incidence angle lies inside the FoV.
    bool link_visible(const Scene &scene, std::size_t n);
}
