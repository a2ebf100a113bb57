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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace oirs
{
    struct AnchorSet
    {
        std::vector<Vec3> anchors;    // LED first, then mirror centers
        std::vector<double> sq_dist;  // squared distance observations, m^2
        std::vector<double> weights;  // diagonal of W
    };

    enum class StopReason
    {
        Threshold,
        MaxIter
    };

    struct SolverTrace
    {
        std::vector<Vec2> iterates; // starts with the initial point
        bool converged = false;
        std::size_t inner_iterations = 0;
        StopReason stop_reason = StopReason::MaxIter;

        const Vec2 &final() const { return iterates.back(); }
    };

    // Gauss-Newton on squared-distance residuals with u_z pinned to 0.
    SolverTrace iwls_solve(const AnchorSet &set, const Vec2 &u0, double eps = 1e-6, std::size_t max_iter = 100);

    enum class WeightMode
    {
        InvDeb,
        InvDebSq,
        Uniform // plain ILS
    };

    const char *to_string(WeightMode mode);
    WeightMode parse_weight_mode(const std::string &text);

    struct LocalizationConfig
    {
        Method los_estimator = Method::ML;
        Method nlos_estimator = Method::RML;
        std::size_t K = 50;
        std::size_t K_n = 100;
        WeightMode weight_mode = WeightMode::InvDebSq;
        double inner_eps = 1e-6;
        std::size_t inner_max = 100;
        double outer_eps = 1e-4;
        std::size_t outer_max = 5;
        bool random_init = false;
        GridSpec grid; // hi <= lo is replaced by the room diagonal
    };

    struct OuterIteration
    {
        DistanceEstimate los;
        std::vector<DistanceEstimate> nlos;     // only links that produced an estimate
        std::vector<std::size_t> dropped_links; // zero-based element indices
        SolverTrace trace;
        Vec3 position = Vec3::Zero();           // u_z = 0
        std::vector<Tilt> steering;             // tilts applied after this iteration
    };

    struct LocalizationRun
    {
        std::vector<OuterIteration> outer_iterations;
        Vec3 final_position = Vec3::Zero();
    };

    Scene rest_orientation(Scene scene);

    // One Monte Carlo trial. The scene's mirror tilts are the initial steering state.
    LocalizationRun run_algorithm1(const Scene &scene, const LocalizationConfig &config, std::uint64_t seed,
                                   std::uint64_t trial);
}
