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
#include "oirs_vlp/observation.hpp"
#include "oirs_vlp/errors.hpp"

#include <cmath>
#include <numbers>

namespace oirs
{
    std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    CounterRng::CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t phase)
        : trial_(trial), phase_(phase)
    {
        std::uint64_t k = splitmix64(seed);
        k = splitmix64(k ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
        key_ = splitmix64(k ^ splitmix64(phase + 0x85157af5ULL));
    }

    double CounterRng::uniform(std::uint64_t index) const
    {
        const std::uint64_t bits = splitmix64(key_ ^ splitmix64(index));
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double CounterRng::normal(std::uint64_t index) const
    {
        const double u1 = uniform(2 * index), u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::vector<double> gaussian_samples(double mean, double variance, std::size_t count, const CounterRng &rng)
    {
        if (variance < 0.0)
            fail(ErrorKind::Precondition, "negative variance");
        const double sd = std::sqrt(variance);
        std::vector<double> out(count);
        for (std::size_t k = 0; k < count; ++k)
            out[k] = mean + sd * rng.normal(k);
        return out;
    }

    ObservationBatch sample_los(const Scene &scene, std::size_t K, const CounterRng &rng)
    {
        if (K == 0)
            fail(ErrorKind::Precondition, "LoS batch needs at least one sample");
        if (active_element(scene))
            fail(ErrorKind::Precondition, "LoS phase requires every OIRS element to be inactive");

        const double mean = los_mean(scene);
        ObservationBatch b;
        b.samples = gaussian_samples(mean, noise_coefficients(scene).variance(mean), K, rng);
        b.trial = rng.trial();
        b.phase = rng.phase();
        return b;
    }

    ObservationBatch sample_nlos(const Scene &scene, std::size_t n, std::size_t K, const CounterRng &rng)
    {
        if (K == 0)
            fail(ErrorKind::Precondition, "NLoS batch needs at least one sample");
        const auto active = active_element(scene);
        if (!active || *active != n)
            fail(ErrorKind::Precondition, "NLoS phase requires exactly element " + std::to_string(n + 1) + " active");

        const Reflection refl = reflection_point(scene.led, scene.pd, scene.oirs[n]);
        if (!refl.valid())
            fail(ErrorKind::InvalidLink, std::string("element ") + std::to_string(n + 1) + ": " + to_string(refl.status));

        const double mean = los_mean(scene) + nlos_mean(scene, n);
        ObservationBatch b;
        b.oirs = n;
        b.samples = gaussian_samples(mean, noise_coefficients(scene).variance(mean), K, rng);
        b.trial = rng.trial();
        b.phase = rng.phase();
        return b;
    }

    CompensatedBatch subtract_los(const ObservationBatch &batch, double d_hat, double xi, double m)
    {
        if (!batch.oirs)
            fail(ErrorKind::Precondition, "LoS subtraction needs an OIRS-active batch");
        if (!(d_hat > 0.0))
            fail(ErrorKind::Precondition, "LoS distance estimate must be positive");

        const double los = xi / std::pow(d_hat, m + 3.0);
        CompensatedBatch c;
        c.oirs = *batch.oirs;
        c.d_hat_used = d_hat;
        c.samples.reserve(batch.samples.size());
        for (double mu : batch.samples)
            c.samples.push_back(mu - los);
        return c;
    }
}
