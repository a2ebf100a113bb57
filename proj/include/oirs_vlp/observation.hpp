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

#include "oirs_vlp/scene.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace oirs
{
    // Counter-based generator: every draw is a pure function of (seed, trial, phase, index), so a
    // trial produces the same samples no matter which worker runs it or in which order.
    class CounterRng
    {
    public:
        CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t phase);

        double uniform(std::uint64_t index) const; // open interval (0, 1)
        double normal(std::uint64_t index) const;  // standard normal

        std::uint64_t trial() const { return trial_; }
        std::uint64_t phase() const { return phase_; }

    private:
        std::uint64_t key_;
        std::uint64_t trial_;
        std::uint64_t phase_;
    };

    std::uint64_t splitmix64(std::uint64_t x);

    struct ObservationBatch
    {
        std::optional<std::size_t> oirs; // empty for the LoS-only phase
        std::vector<double> samples;     // A
        std::uint64_t trial = 0;
        std::uint64_t phase = 0;

        std::size_t count() const { return samples.size(); }
    };

    struct CompensatedBatch
    {
        std::size_t oirs = 0;
        std::vector<double> samples; // A
        double d_hat_used = 0.0;     // m
    };

    std::vector<double> gaussian_samples(double mean, double variance, std::size_t count, const CounterRng &rng);

    // LoS-only phase: every element must be inactive.
    ObservationBatch sample_los(const Scene &scene, std::size_t K, const CounterRng &rng);

    // Single-active phase: element n must be the only active element and its link must be valid.
    ObservationBatch sample_nlos(const Scene &scene, std::size_t n, std::size_t K, const CounterRng &rng);

    // Removes the LoS mean predicted from d_hat, given the LoS coefficient xi and Lambertian order m.
    CompensatedBatch subtract_los(const ObservationBatch &batch, double d_hat, double xi, double m);
}
