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
#include "oirs_vlp/csv.hpp"
#include "oirs_vlp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace oirs
{
    std::string format_number(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", value);
        return buf;
    }

    std::string cell_text(const CsvCell &cell)
    {
        if (const auto *d = std::get_if<double>(&cell))
            return format_number(*d);
        if (const auto *i = std::get_if<std::int64_t>(&cell))
            return std::to_string(*i);
        return std::get<std::string>(cell);
    }

    std::string to_csv(const CsvTable &table)
    {
        std::string out;
        for (std::size_t i = 0; i < table.header.size(); ++i)
            out += (i ? "," : "") + table.header[i];
        out += '\n';
        for (const auto &row : table.rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
                out += (i ? "," : "") + cell_text(row[i]);
            out += '\n';
        }
        return out;
    }

    void emit_csv(const CsvTable &table, const std::filesystem::path &path)
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
        f << to_csv(table);
        if (!f)
            fail(ErrorKind::IoError, "write to " + path.string() + " failed");
    }

    CsvTable parse_csv(const std::string &text)
    {
        CsvTable t;
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line))
        {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            std::vector<std::string> fields;
            std::string field;
            std::istringstream ls(line);
            while (std::getline(ls, field, ','))
                fields.push_back(field);
            if (!line.empty() && line.back() == ',')
                fields.emplace_back();
            if (first)
            {
                t.header = fields;
                first = false;
                continue;
            }
            std::vector<CsvCell> row(fields.begin(), fields.end());
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    CsvTable read_csv(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            fail(ErrorKind::IoError, "cannot open " + path.string());
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse_csv(ss.str());
    }
}
