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

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinotto/errors.hpp"
#include "twinotto/model.hpp"
#include "twinotto/thermo.hpp"

namespace twinotto {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& prefix) {
    if (!j.is_object()) throw ValidationError(prefix.empty() ? "config" : prefix, "must be a JSON object");
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ValidationError(prefix + key, "unknown configuration key");
}

template <class T>
void read_key(const json& j, const char* key, T& out, const std::string& prefix) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ValidationError(prefix + key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(prefix + key, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ValidationError(prefix + key, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError(prefix + key, "expected a string");
    }
    out = v.get<T>();
}

}  // namespace detail

inline json to_json(const EngineParams& p) {
    return {{"G", p.G},         {"kappa_a", p.kappa_a}, {"kappa_b", p.kappa_b}, {"kappa_c", p.kappa_c},
            {"nbar_a", p.nbar_a}, {"nbar_b", p.nbar_b},   {"nbar_c", p.nbar_c},   {"xi0", p.xi0},
            {"xi1", p.xi1},     {"tau1", p.tau1},       {"tau2", p.tau2},       {"tau3", p.tau3},
            {"tau4", p.tau4},   {"rwa", p.rwa}};
}

/// Missing keys keep their defaults; unknown keys are rejected. No range
/// validation here (see validate_params).
inline EngineParams params_from_json(const json& j, const std::string& prefix = "") {
    detail::reject_unknown(j, {"G", "kappa_a", "kappa_b", "kappa_c", "nbar_a", "nbar_b", "nbar_c", "xi0", "xi1",
                               "tau1", "tau2", "tau3", "tau4", "rwa"},
                           prefix);
    EngineParams p;
    detail::read_key(j, "G", p.G, prefix);
    detail::read_key(j, "kappa_a", p.kappa_a, prefix);
    detail::read_key(j, "kappa_b", p.kappa_b, prefix);
    detail::read_key(j, "kappa_c", p.kappa_c, prefix);
    detail::read_key(j, "nbar_a", p.nbar_a, prefix);
    detail::read_key(j, "nbar_b", p.nbar_b, prefix);
    detail::read_key(j, "nbar_c", p.nbar_c, prefix);
    detail::read_key(j, "xi0", p.xi0, prefix);
    detail::read_key(j, "xi1", p.xi1, prefix);
    detail::read_key(j, "tau1", p.tau1, prefix);
    detail::read_key(j, "tau2", p.tau2, prefix);
    detail::read_key(j, "tau3", p.tau3, prefix);
    detail::read_key(j, "tau4", p.tau4, prefix);
    detail::read_key(j, "rwa", p.rwa, prefix);
    return p;
}

struct GridSpec {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    std::vector<double> values() const { return grid_values(min, max, step); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Everything a CLI run depends on.
struct RunConfig {
    EngineParams params;
    bool allow_boundary = false;
    GridSpec spectrum{"xi", -0.5, 1.0, 0.01};
    double dt_max = 0.05;
    int n_cycles = 1;
    double steady_xi = 1.0;
    GridSpec axis1{"xi1", -0.6, 0.0, 0.02};
    GridSpec axis2{"nbar_c", 0.0, 0.5, 0.02};
    int threads = 0;  // 0 = hardware concurrency
    std::vector<double> oracle_xi{-0.4, -0.1, 0.2, 0.6, 1.0};
    int n_max = 6;
    double kappa_scale = 100.0;
    std::string format = "csv";
    std::string out;  // empty = stdout

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline json grid_to_json(const GridSpec& g) { return {{"name", g.name}, {"min", g.min}, {"max", g.max}, {"step", g.step}}; }

inline GridSpec grid_from_json(const json& j, GridSpec g, const std::string& prefix) {
    detail::reject_unknown(j, {"name", "min", "max", "step"}, prefix);
    detail::read_key(j, "name", g.name, prefix);
    detail::read_key(j, "min", g.min, prefix);
    detail::read_key(j, "max", g.max, prefix);
    detail::read_key(j, "step", g.step, prefix);
    return g;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["params"] = to_json(c.params);
    j["allow_boundary"] = c.allow_boundary;
    j["spectrum"] = grid_to_json(c.spectrum);
    j["cycle"] = {{"dt_max", c.dt_max}, {"n_cycles", c.n_cycles}};
    j["steady"] = {{"xi", c.steady_xi}};
    j["sweep"] = {{"axis1", grid_to_json(c.axis1)}, {"axis2", grid_to_json(c.axis2)}, {"threads", c.threads}};
    j["oracle"] = {{"xi", c.oracle_xi}, {"n_max", c.n_max}, {"kappa_scale", c.kappa_scale}};
    j["format"] = c.format;
    j["out"] = c.out;
    return j;
}

/// Range checks for every field; throws ValidationError naming the key.
inline void validate_config(const RunConfig& c) {
    try {
        validate_params(c.params, c.allow_boundary);
    } catch (const ValidationError& e) {
        throw ValidationError("params." + e.key(), e.message());
    }
    if (!(c.spectrum.step > 0.0)) throw ValidationError("spectrum.step", "must be > 0");
    if (!(c.spectrum.max >= c.spectrum.min)) throw ValidationError("spectrum.max", "must be >= spectrum.min");
    if (!(c.dt_max > 0.0) || c.dt_max > kMaxDt) throw ValidationError("cycle.dt_max", "must be in (0, 0.1]");
    if (c.n_cycles < 1) throw ValidationError("cycle.n_cycles", "must be >= 1");
    if (!std::isfinite(c.steady_xi)) throw ValidationError("steady.xi", "must be finite");
    for (const auto* g : {&c.axis1, &c.axis2}) {
        const std::string key = g == &c.axis1 ? "sweep.axis1" : "sweep.axis2";
        try {
            parse_sweep_var(g->name);
        } catch (const ValidationError& e) {
            throw ValidationError(key + ".name", e.what());
        }
        if (!(g->step > 0.0)) throw ValidationError(key + ".step", "must be > 0");
        if (!(g->max >= g->min)) throw ValidationError(key + ".max", "must be >= min");
    }
    if (c.axis1.name == c.axis2.name) throw ValidationError("sweep.axis2.name", "must differ from axis1");
    const double n1 = std::floor((c.axis1.max - c.axis1.min) / c.axis1.step + 0.5) + 1.0;
    const double n2 = std::floor((c.axis2.max - c.axis2.min) / c.axis2.step + 0.5) + 1.0;
    if (n1 * n2 > static_cast<double>(kMaxGridPoints)) throw ValidationError("sweep", "grid exceeds 1e6 points");
    if (c.threads < 0) throw ValidationError("sweep.threads", "must be >= 0");
    if (c.oracle_xi.empty()) throw ValidationError("oracle.xi", "must list at least one value");
    if (c.n_max < 1) throw ValidationError("oracle.n_max", "must be >= 1");
    if (!(c.kappa_scale > 0.0)) throw ValidationError("oracle.kappa_scale", "must be > 0");
    if (c.format != "csv" && c.format != "json") throw ValidationError("format", "must be csv or json");
}

inline RunConfig config_from_json(const json& j) {
    detail::reject_unknown(j, {"params", "allow_boundary", "spectrum", "cycle", "steady", "sweep", "oracle", "format", "out"},
                           "");
    RunConfig c;
    if (j.contains("params")) c.params = params_from_json(j.at("params"), "params.");
    detail::read_key(j, "allow_boundary", c.allow_boundary, "");
    if (j.contains("spectrum")) c.spectrum = grid_from_json(j.at("spectrum"), c.spectrum, "spectrum.");
    if (j.contains("cycle")) {
        const json& s = j.at("cycle");
        detail::reject_unknown(s, {"dt_max", "n_cycles"}, "cycle.");
        detail::read_key(s, "dt_max", c.dt_max, "cycle.");
        detail::read_key(s, "n_cycles", c.n_cycles, "cycle.");
    }
    if (j.contains("steady")) {
        const json& s = j.at("steady");
        detail::reject_unknown(s, {"xi"}, "steady.");
        detail::read_key(s, "xi", c.steady_xi, "steady.");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        detail::reject_unknown(s, {"axis1", "axis2", "threads"}, "sweep.");
        if (s.contains("axis1")) c.axis1 = grid_from_json(s.at("axis1"), c.axis1, "sweep.axis1.");
        if (s.contains("axis2")) c.axis2 = grid_from_json(s.at("axis2"), c.axis2, "sweep.axis2.");
        detail::read_key(s, "threads", c.threads, "sweep.");
    }
    if (j.contains("oracle")) {
        const json& s = j.at("oracle");
        detail::reject_unknown(s, {"xi", "n_max", "kappa_scale"}, "oracle.");
        if (s.contains("xi")) {
            const json& xs = s.at("xi");
            if (!xs.is_array()) throw ValidationError("oracle.xi", "expected an array of numbers");
            c.oracle_xi.clear();
            for (const json& x : xs) {
                if (!x.is_number()) throw ValidationError("oracle.xi", "expected an array of numbers");
                c.oracle_xi.push_back(x.get<double>());
            }
        }
        detail::read_key(s, "n_max", c.n_max, "oracle.");
        detail::read_key(s, "kappa_scale", c.kappa_scale, "oracle.");
    }
    detail::read_key(j, "format", c.format, "");
    detail::read_key(j, "out", c.out, "");
    return c;
}

/// Loads and validates a config file; an empty path gives the defaults.
inline RunConfig parse_config(const std::string& path) {
    RunConfig c;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ValidationError("config", "'" + path + "' is not valid JSON: " + e.what());
        }
        c = config_from_json(j);
    }
    validate_config(c);
    return c;
}

}  // namespace twinotto
