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

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twinotto.hpp"

using namespace twinotto;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("twinotto_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TWINOTTO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string validation_key(const std::string& json_text) {
    try {
        validate_config(config_from_json(json::parse(json_text)));
    } catch (const ValidationError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST_CASE("empty configuration yields the defaults", "[config]") {
    const RunConfig c = config_from_json(json::object());
    CHECK(c == RunConfig{});
    CHECK(parse_config("") == RunConfig{});
    CHECK(c.params.G == 0.1);
    CHECK(c.params.rwa);
    CHECK(c.dt_max == 0.05);
    CHECK(c.n_max == 6);
}

TEST_CASE("configuration round-trips through JSON", "[config]") {
    RunConfig c;
    c.params.G = 0.05;
    c.params.rwa = false;
    c.params.xi0 = 0.9;
    c.axis1 = {"G", 0.01, 0.1, 0.01};
    c.oracle_xi = {0.3};
    c.format = "json";
    c.out = "x.json";
    CHECK(config_from_json(to_json(c)) == c);
    CHECK(to_json(c.params).size() == 14u);
}

TEST_CASE("invalid values name the offending key", "[config]") {
    CHECK(validation_key(R"({"params": {"kappa_a": -1}})") == "params.kappa_a");
    CHECK(validation_key(R"({"params": {"nbar_c": -0.1}})") == "params.nbar_c");
    CHECK(validation_key(R"({"cycle": {"dt_max": 0.5}})") == "cycle.dt_max");
    CHECK(validation_key(R"({"sweep": {"axis1": {"name": "kappa"}}})") == "sweep.axis1.name");
    CHECK(validation_key(R"({"sweep": {"axis2": {"name": "xi1"}}})") == "sweep.axis2.name");
    CHECK(validation_key(R"({"format": "xml"})") == "format");
    CHECK(validation_key(R"({"params": {"G": "big"}})") == "params.G");
    CHECK(validation_key(R"({"colour": 1})") == "colour");
    CHECK(validation_key(R"({"params": {"temperature": 1}})") == "params.temperature");
    CHECK(validation_key(R"({"oracle": {"xi": []}})") == "oracle.xi");
}

TEST_CASE("exact model enforces the linearization bound", "[config]") {
    const json j = json::parse(R"({"params": {"rwa": false, "xi0": 0.99}})");
    try {
        validate_config(config_from_json(j));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("0.9592") != std::string::npos);
    }
    RunConfig c = config_from_json(j);
    c.allow_boundary = true;
    CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config files: missing and malformed", "[config]") {
    CHECK_THROWS_AS(parse_config((scratch_dir() / "absent.json").string()), IoError);
    CHECK_THROWS_AS(parse_config(write_file("bad.json", "{ not json").string()), ValidationError);
    const RunConfig c = parse_config(write_file("ok.json", R"({"params": {"nbar_c": 0.3}})").string());
    CHECK(c.params.nbar_c == 0.3);
}

TEST_CASE("sweep output has one row per grid point", "[config][io]") {
    RunConfig c;
    c.axis1 = {"xi1", -0.6, 0.0, 0.1};
    c.axis2 = {"nbar_c", 0.0, 0.5, 0.1};
    c.threads = 2;
    const CommandOutput out = run_sweep(c);
    CHECK(out.table.rows.size() == 7u * 6u);
    c.threads = 1;
    CHECK(to_csv(run_sweep(c).table) == to_csv(out.table));
    CHECK(out.extra["grid"]["points"] == 42);
}

TEST_CASE("cycle output respects the row budget", "[config][io]") {
    RunConfig c;
    c.n_cycles = 2;
    const CommandOutput out = run_cycle(c);
    CHECK(out.table.rows.size() <= 2u * kMaxRowsPerCycle);
    CHECK(out.table.columns.size() == 10u);
    CHECK(out.extra["strokes"].size() == 8u);
    CHECK(out.extra["summary"]["extracted_work"].get<double>() > 0.0);
}

TEST_CASE("CSV and JSON emitters", "[io]") {
    Table t{{"a", "b", "s"}, {{1.5, 2LL, std::string("x,y")}, {std::nan(""), 0LL, std::string("ok")}}};
    CHECK(to_csv(t) == "a,b,s\n1.5,2,\"x,y\"\nnan,0,ok\n");
    const ordered_json j = table_to_json(t);
    CHECK(j[1]["a"].is_null());
    CHECK(j[0]["b"] == 2);
    const fs::path p = scratch_dir() / "t.csv";
    emit(t, {{"version", kVersion}}, {{"k", 1}}, "csv", p.string());
    CHECK(read_file(p) == to_csv(t));
    CHECK(json::parse(read_file(p.string() + ".meta.json"))["k"] == 1);
    CHECK_THROWS_AS(write_text((scratch_dir() / "missing" / "x.csv").string(), "x"), IoError);
}

TEST_CASE("command line: outputs and exit codes", "[cli]") {
    const fs::path a = scratch_dir() / "spec_a.csv", b = scratch_dir() / "spec_b.csv";
    CHECK(run_cli("spectrum --out " + a.string()) == 0);
    CHECK(run_cli("spectrum --out " + b.string()) == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a).rfind("xi,omega_A,omega_B,omega_C", 0) == 0);
    CHECK(fs::exists(a.string() + ".meta.json"));

    const fs::path s = scratch_dir() / "steady.json";
    CHECK(run_cli("steady --xi -0.2 --format json --out " + s.string()) == 0);
    const json doc = json::parse(read_file(s));
    CHECK(doc["meta"]["command"] == "steady");
    CHECK(doc["rows"].size() == 6u);

    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("spectrum --bogus") == 2);
    CHECK(run_cli("spectrum --format xml") == 2);
    CHECK(run_cli("spectrum --config " + write_file("neg.json", R"({"params": {"kappa_a": -1}})").string()) == 2);
    CHECK(run_cli("spectrum --no-rwa") == 2);
    CHECK(run_cli("steady --no-rwa --allow-boundary --xi 0.99") == 3);
    CHECK(run_cli("spectrum --config " + (scratch_dir() / "absent.json").string()) == 4);
    CHECK(run_cli("spectrum --out " + (scratch_dir() / "no_dir" / "x.csv").string()) == 4);
}
