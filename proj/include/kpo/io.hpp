// Copyright 2026 The kpo-aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Result files: CSV tables with a header row (RFC 4180 quoting, numbers as
// %.17g so they round-trip), pretty JSON, and per-run output directories.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kpo/lindblad.hpp"

namespace kpo::io {

using Cell = std::variant<double, long, std::string>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    /// Throws kpo::Error(invalid_argument) when the row width differs from the header.
    void add_row(std::vector<Cell> row);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// %.17g; non-finite values become "inf", "-inf" and "nan".
std::string format_number(double v);

/// JSON number, or the strings "inf"/"-inf"/"nan" (JSON has no literals for them).
nlohmann::ordered_json json_number(double v);

/// Time column "t_us" followed by every channel.
CsvTable series_table(const lindblad::TimeSeries& series);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

/// Creates <root>/<name>-<UTC timestamp>/, appending -2, -3, ... when the
/// directory already exists so earlier results are never touched.
std::filesystem::path create_run_directory(const std::filesystem::path& root, const std::string& name);

}  // namespace kpo::io
