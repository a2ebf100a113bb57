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
#include <catch_amalgamated.hpp>

#include "oirs_vlp/csv.hpp"
#include "oirs_vlp/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace oirs;

namespace
{
    std::filesystem::path temp_file(const std::string &name)
    {
        return std::filesystem::temp_directory_path() / ("oirs_vlp_test_" + name);
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(12345678912.0) == "1.23456789e+10");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("empty table writes only the header")
{
    CsvTable t;
    t.header = {"snr_db", "rmse_ml_m", "rmse_rml_m", "deb_m", "trials_used", "trials_dropped"};
    const auto p = temp_file("empty.csv");
    emit_csv(t, p);
    CHECK(slurp(p) == "snr_db,rmse_ml_m,rmse_rml_m,deb_m,trials_used,trials_dropped\n");
    std::filesystem::remove(p);
}

TEST_CASE("emitted values read back within nine significant digits")
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> mant(1.0, 10.0);
    std::uniform_int_distribution<int> expo(-20, 10);
    CsvTable t;
    t.header = {"x_m", "count", "label"};
    for (int i = 0; i < 500; ++i)
        t.rows.push_back({mant(gen) * std::pow(10.0, expo(gen)), std::int64_t{i}, std::string(i % 2 ? "" : "iwls")});

    const auto p = temp_file("roundtrip.csv");
    emit_csv(t, p);
    const CsvTable back = read_csv(p);
    REQUIRE(back.header == t.header);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        REQUIRE(back.rows[i].size() == 3);
        const double want = std::get<double>(t.rows[i][0]);
        const double got = std::stod(cell_text(back.rows[i][0]));
        // half a unit in the ninth significant digit
        const double ulp9 = std::pow(10.0, std::floor(std::log10(std::abs(want))) - 8);
        CHECK(std::abs(got - want) <= 0.5 * ulp9 * (1 + 1e-12));
        CHECK(cell_text(back.rows[i][1]) == std::to_string(i));
        CHECK(cell_text(back.rows[i][2]) == cell_text(t.rows[i][2]));
    }

    // writing the same table twice yields identical bytes
    const auto q = temp_file("roundtrip2.csv");
    emit_csv(t, q);
    CHECK(slurp(p) == slurp(q));
    std::filesystem::remove(p);
    std::filesystem::remove(q);
}

TEST_CASE("unwritable path is an I/O error")
{
    CsvTable t;
    t.header = {"a"};
    try
    {
        emit_csv(t, "/nonexistent-dir/x.csv");
        FAIL("expected IoError");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::IoError);
    }
}
