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

// twinotto: command-line front end.
//
//   twinotto <spectrum|cycle|steady|sweep|oracle-compare> [--config FILE]
//            [--out PATH] [--format csv|json] [--rwa|--no-rwa] [--allow-boundary]
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twinotto.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<bool> rwa;
    bool allow_boundary = false;
    std::optional<double> dt;
    std::optional<int> cycles;
    std::optional<double> xi;
    std::optional<int> threads;
    std::optional<int> n_max;
};

void check_output_dir(const std::string& out) {
    if (out.empty() || out == "-") return;
    const std::filesystem::path dir = std::filesystem::absolute(out).parent_path();
    if (!std::filesystem::is_directory(dir))
        throw twinotto::IoError("output directory '" + dir.string() + "' does not exist");
}

twinotto::RunConfig resolve(const Flags& f, const std::string& command) {
    twinotto::RunConfig cfg = twinotto::parse_config(f.config);
    if (f.out) cfg.out = *f.out;
    if (f.format) cfg.format = *f.format;
    else if (command == "oracle-compare") cfg.format = "json";
    if (f.rwa) cfg.params.rwa = *f.rwa;
    if (f.allow_boundary) cfg.allow_boundary = true;
    if (f.dt) cfg.dt_max = *f.dt;
    if (f.cycles) cfg.n_cycles = *f.cycles;
    if (f.xi) cfg.steady_xi = *f.xi;
    if (f.threads) cfg.threads = *f.threads;
    if (f.n_max) cfg.n_max = *f.n_max;
    twinotto::validate_config(cfg);
    return cfg;
}

int run(const std::string& command, const Flags& flags) {
    using namespace twinotto;
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = resolve(flags, command);
    check_output_dir(cfg.out);

    CommandOutput result;
    if (command == "spectrum") result = run_spectrum(cfg);
    else if (command == "cycle") result = run_cycle(cfg);
    else if (command == "steady") result = run_steady(cfg);
    else if (command == "sweep") result = run_sweep(cfg);
    else result = run_oracle_compare(cfg);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ordered_json meta = {{"version", kVersion},
                         {"command", command},
                         {"config", ordered_json::parse(to_json(cfg).dump())},
                         {"wall_time_s", wall}};
    emit(result.table, meta, result.extra, cfg.format, cfg.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Straight-twin polariton Otto engine simulator"};
    app.require_subcommand(1);
    Flags flags;
    std::string command;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"spectrum", "Polariton and bare-mode frequencies along a xi grid"},
        {"cycle", "Time-resolved Otto cycle: populations, work rate, per-stroke W and Q"},
        {"steady", "Steady polariton populations and moments at a fixed xi"},
        {"sweep", "Adiabatic-limit work and correlation over a two-axis grid"},
        {"oracle-compare", "Gaussian steady state versus truncated Fock-space master equation"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "JSON configuration file");
        sub->add_option("--out", flags.out, "Output path (default: stdout)");
        sub->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--rwa,!--no-rwa", flags.rwa, "Drop (or keep) the anti-rotating coupling terms");
        sub->add_flag("--allow-boundary", flags.allow_boundary, "Skip the sqrt(1-8G^2) validity check");
        if (name == "cycle") {
            sub->add_option("--dt", flags.dt, "Maximum RK4 step (1/omega_m)");
            sub->add_option("--cycles", flags.cycles, "Number of cycles");
        }
        if (name == "steady") sub->add_option("--xi", flags.xi, "Control value xi (omega_m)");
        if (name == "sweep") sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
        if (name == "oracle-compare") sub->add_option("--n-max", flags.n_max, "Fock truncation per mode");
        sub->callback([&command, name = name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        return run(command, flags);
    } catch (const twinotto::ValidationError& e) {
        std::cerr << "twinotto: invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const twinotto::NumericalError& e) {
        std::cerr << "twinotto: numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const twinotto::IoError& e) {
        std::cerr << "twinotto: I/O error: " << e.what() << "\n";
        return kIo;
    }
}
