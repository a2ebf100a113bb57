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

#include "oirs_vlp/localization.hpp"
#include "oirs_vlp/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace oirs
{
    struct RunSettings
    {
        std::uint64_t seed = 1;
        std::size_t trials = 10000;
        std::string out_dir = "out";
    };

    struct Config
    {
        Scene scene;
        LocalizationConfig loc;
        RunSettings run;
        double coverage_resolution_m = 0.05;
        std::size_t nlos_los_samples = 50;
        std::string source;       // file path or "<string>"
        std::uint64_t hash = 0;   // FNV-1a of the raw config text
    };

    enum class Defaults
    {
        Enabled,
        Disabled // every physics and geometry key must be given explicitly
    };

    Config parse_config(const std::string &text, Defaults defaults = Defaults::Enabled,
                        const std::string &source = "<string>");

    Config load_config(const std::filesystem::path &path, Defaults defaults = Defaults::Enabled);

    // Constants derived from the physics block, in a fixed order, already formatted.
    std::vector<std::pair<std::string, std::string>> derived_constants(const Scene &scene);

    std::uint64_t fnv1a64(const std::string &text);

    extern const char *const code_version;

    // Contents of the run.meta provenance record.
    std::string provenance(const Config &cfg, const std::string &command);
}
