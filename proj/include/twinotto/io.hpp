// Copyright 2026 The twinotto Authors
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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "twinotto/errors.hpp"

namespace twinotto {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<double, long long, std::string>;

/// Column-ordered result table shared by every output format.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// 12 significant digits, locale-independent.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch == '\n' ? ' ' : ch;
    }
    return q + "\"";
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline ordered_json cell_to_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? ordered_json(*d) : ordered_json(nullptr);
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

inline ordered_json table_to_json(const Table& t) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r = ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_to_json(row[i]);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Writes to `path`, or to stdout when the path is empty or "-".
inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

/// CSV: the table goes to `path` and, for file output, `meta` plus `extra`
/// to `path`.meta.json. JSON: one document {meta, ...extra, rows}.
inline void emit(const Table& t, const ordered_json& meta, const ordered_json& extra, const std::string& format,
                 const std::string& path) {
    if (format == "csv") {
        write_text(path, to_csv(t));
        if (!path.empty() && path != "-") {
            ordered_json side = {{"meta", meta}};
            for (const auto& [k, v] : extra.items()) side[k] = v;
            write_text(path + ".meta.json", side.dump(2) + "\n");
        }
        return;
    }
    if (format != "json") throw ValidationError("format", "must be csv or json");
    ordered_json doc = {{"meta", meta}};
    for (const auto& [k, v] : extra.items()) doc[k] = v;
    doc["rows"] = table_to_json(t);
    write_text(path, doc.dump(2) + "\n");
}

}  // namespace twinotto
