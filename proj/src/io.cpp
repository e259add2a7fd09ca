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

#include "kpo/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "kpo/units.hpp"

namespace kpo::io {

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return format_number(*d);
    if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
    return quote(std::get<std::string>(c));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorKind::invalid_argument, "write failed for '" + path.string() + "'");
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) {
        throw Error(ErrorKind::invalid_argument, "CSV row has " + std::to_string(row.size()) +
                                                     " cells, header has " +
                                                     std::to_string(header_.size()));
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + quote(header_[i]);
    out += "\r\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
        out += "\r\n";
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

CsvTable series_table(const lindblad::TimeSeries& series) {
    std::vector<std::string> header{"t_us"};
    for (const auto& [name, values] : series.channels) header.push_back(name);
    CsvTable table(std::move(header));
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::vector<Cell> row{units::to_us(series.times[i])};
        for (const auto& ch : series.channels) row.emplace_back(ch.second[i]);
        table.add_row(std::move(row));
    }
    return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

std::filesystem::path create_run_directory(const std::filesystem::path& root, const std::string& name) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);

    std::filesystem::create_directories(root);
    const std::string base = name + "-" + stamp;
    for (int n = 1;; ++n) {
        const std::filesystem::path dir = root / (n == 1 ? base : base + "-" + std::to_string(n));
        // create_directory returns false when the directory already exists.
        if (std::filesystem::create_directory(dir)) return dir;
    }
}

}  // namespace kpo::io
