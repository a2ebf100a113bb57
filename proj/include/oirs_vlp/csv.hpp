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

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace oirs
{
    // An empty string cell is written as an empty field (used for blanked values).
    using CsvCell = std::variant<double, std::int64_t, std::string>;

    struct CsvTable
    {
        std::vector<std::string> header;
        std::vector<std::vector<CsvCell>> rows;
    };

    // 9 significant digits, locale independent.
    std::string format_number(double value);

    std::string to_csv(const CsvTable &table);

    void emit_csv(const CsvTable &table, const std::filesystem::path &path);

    // Reads back a table; every cell stays a string.
    CsvTable parse_csv(const std::string &text);
    CsvTable read_csv(const std::filesystem::path &path);

    std::string cell_text(const CsvCell &cell);
}
