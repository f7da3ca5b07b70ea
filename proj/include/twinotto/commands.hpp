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

// Table builders behind each CLI subcommand. Each is a pure function of the
// RunConfig.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "twinotto/config.hpp"
#include "twinotto/cycle.hpp"
#include "twinotto/fock.hpp"
#include "twinotto/io.hpp"
#include "twinotto/polariton.hpp"
#include "twinotto/thermo.hpp"

namespace twinotto {

struct CommandOutput {
    Table table;
    ordered_json extra = ordered_json::object();
};

inline CommandOutput run_spectrum(const RunConfig& cfg) {
    const EngineParams& p = cfg.params;
    const std::vector<double> xs = cfg.spectrum.values();
    if (!p.rwa && !cfg.allow_boundary) {
        const double bound = validity_bound(p.G);
        for (double x : xs)
            if (std::abs(x) >= bound)
                throw ValidationError("spectrum", "xi=" + format_number(x) + " violates the validity bound sqrt(1-8G^2) = " +
                                                      format_number(bound));
    }
    const std::vector<PolaritonBasis> path = exact_polariton_path(p, xs);
    CommandOutput out;
    out.table.columns = {"xi", "omega_A", "omega_B", "omega_C", "bare_a", "bare_b", "bare_c"};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Detunings d = detunings(p, xs[i]);
        out.table.rows.push_back({xs[i], path[i].freq(Branch::A), path[i].freq(Branch::B), path[i].freq(Branch::C),
                                  -d.delta_a, -d.delta_b, 1.0});
    }
    return out;
}

inline CommandOutput run_cycle(const RunConfig& cfg) {
    const EngineParams& p = cfg.params;
    const Cov3 initial = run_until_steady(p, p.xi0, {.verify = false});
    const CycleTrajectory traj = integrate_cycle(p, initial, cfg.dt_max, cfg.n_cycles);
    CommandOutput out;
    out.table.columns = {"t", "xi", "n_a", "n_b", "n_c", "n_A", "n_B", "n_C", "work_rate", "stroke_index"};
    out.table.rows.reserve(traj.samples.size());
    for (const TrajectorySample& s : traj.samples)
        out.table.rows.push_back({s.t, s.xi, s.bare[0], s.bare[1], s.bare[2], s.polariton[0], s.polariton[1],
                                  s.polariton[2], s.work_rate, static_cast<long long>(s.stroke)});
    ordered_json strokes = ordered_json::array();
    for (const StrokeSummary& s : traj.strokes)
        strokes.push_back({{"cycle", s.cycle},
                           {"stroke", s.stroke},
                           {"W", s.work},
                           {"Q", s.heat},
                           {"E_start", s.energy_start},
                           {"E_end", s.energy_end},
                           {"first_row", s.first_row},
                           {"last_row", s.last_row}});
    const StrokeTotals w = work_from_trajectory(traj);
    const StrokeTotals q = heat_from_trajectory(traj);
    out.extra["strokes"] = strokes;
    out.extra["summary"] = {{"W_total", w.total},
                            {"Q_total", q.total},
                            {"extracted_work", -w.total},
                            {"limit_cycle", traj.limit_cycle},
                            {"min_state_eigenvalue", traj.min_state_eigenvalue}};
    return out;
}

inline CommandOutput run_steady(const RunConfig& cfg) {
    const EngineParams& p = cfg.params;
    const double xi = cfg.steady_xi;
    const PolaritonSteadyState q = steady_state_polariton(p, xi, SteadyMode::quantum);
    const PolaritonSteadyState c = steady_state_polariton(p, xi, SteadyMode::quasi_classical);
    const PolaritonRates r = polariton_rates(p, xi);
    const std::array<double, 3> kap{r.kappa_A, r.kappa_B, r.kappa_C};
    const DriftDiffusion dd = drift_diffusion(p, xi);
    const Cov3 sigma = lyapunov_steady_state<kModes>(dd.a, dd.d);
    const auto bare = bare_populations(sigma);

    CommandOutput out;
    out.table.columns = {"mode", "frequency", "n_quantum", "n_quasi_classical", "kappa_eff"};
    for (Branch b : kBranches) {
        const int i = static_cast<int>(b);
        out.table.rows.push_back({std::string(branch_name(b)), q.basis.freq(b), q.n[i], c.n[i], kap[i]});
    }
    const std::array<const char*, 3> bare_names{"a", "b", "c"};
    const auto k = p.kappas();
    for (int m = 0; m < kModes; ++m) {
        const Detunings d = detunings(p, xi);
        const double f = m == 0 ? -d.delta_a : (m == 1 ? -d.delta_b : 1.0);
        out.table.rows.push_back({std::string(bare_names[m]), f, bare[m], p.nbars()[m], k[m]});
    }
    out.extra["xi"] = xi;
    out.extra["moments"] = {{"adag_b_re", q.adag_b.real()}, {"adag_b_im", q.adag_b.imag()},
                            {"var_A", q.var_A},            {"var_B", q.var_B},
                            {"cov_AB", q.cov_AB},          {"J_n", detail::correlation(q.cov_AB, q.var_A, q.var_B)}};
    out.extra["rates"] = {{"S_AB", r.S_AB}, {"S_AC", r.S_AC}, {"S_BC", r.S_BC},
                          {"R_AB", r.R_AB}, {"R_AC", r.R_AC}, {"R_BC", r.R_BC}};
    return out;
}

inline CommandOutput run_sweep(const RunConfig& cfg) {
    const SweepAxis a1{parse_sweep_var(cfg.axis1.name), cfg.axis1.values()};
    const SweepAxis a2{parse_sweep_var(cfg.axis2.name), cfg.axis2.values()};
    const std::vector<SweepRow> rows =
        sweep(cfg.params, a1, a2, static_cast<unsigned>(cfg.threads), cfg.allow_boundary);
    CommandOutput out;
    out.table.columns = {"xi1", "nbar_c", "G", "W_quantum", "W_classical", "VarA", "VarB", "Cov", "J", "status"};
    for (const SweepRow& r : rows)
        out.table.rows.push_back({r.xi1, r.nbar_c, r.G, r.report.extracted_quantum(), r.report.extracted_classical(),
                                  r.report.Var_3A, r.report.Var_3B, r.report.Cov_3AB, r.report.J, r.status});
    out.extra["grid"] = {{"axis1", grid_to_json(cfg.axis1)}, {"axis2", grid_to_json(cfg.axis2)},
                         {"points", rows.size()}, {"order", "axis2 fastest"}};
    out.extra["params_base"] = to_json(cfg.params);
    out.extra["work_convention"] = "W_quantum and W_classical are extracted work (-W, positive = delivered)";
    return out;
}

/// Matched Gaussian / Fock steady states with kappas scaled by kappa_scale.
inline CommandOutput run_oracle_compare(const RunConfig& cfg) {
    const EngineParams p = scaled_kappas(cfg.params, cfg.kappa_scale);
    CommandOutput out;
    out.table.columns = {"xi",          "n_a_gauss",   "n_a_fock",     "n_b_gauss",    "n_b_fock",
                         "n_c_gauss",   "n_c_fock",    "cov_AB_gauss", "cov_AB_fock",  "max_pop_diff",
                         "pop_tolerance", "truncation_tail", "pops_agree", "cov_sign_agree"};
    bool all_ok = true;
    for (double xi : cfg.oracle_xi) {
        const DriftDiffusion dd = drift_diffusion(p, xi);
        const Cov3 sigma = lyapunov_steady_state<kModes>(dd.a, dd.d);
        const auto g = bare_populations(sigma);
        const PolaritonSteadyState gp = steady_state_polariton(p, xi, SteadyMode::quantum);

        FockConfig fc;
        fc.params = p;
        fc.xi = xi;
        fc.n_max = {cfg.n_max, cfg.n_max, cfg.n_max};
        const FockState st = fock_steady_state(fc);
        const FockObservables fb = fock_observables(st, FockBasis::bare);
        const FockObservables fp = fock_observables(st, FockBasis::rwa_polariton);

        double diff = 0.0;
        for (int m = 0; m < kModes; ++m) diff = std::max(diff, std::abs(g[m] - fb.n[m]));
        const double tol = std::max(1e-3, st.truncation_tail);
        const bool pops_ok = diff <= tol;
        const bool sign_ok = (gp.cov_AB > 0.0) == (fp.cov[0][1] > 0.0);
        all_ok = all_ok && pops_ok && sign_ok;
        out.table.rows.push_back({xi, g[0], fb.n[0], g[1], fb.n[1], g[2], fb.n[2], gp.cov_AB, fp.cov[0][1], diff, tol,
                                  st.truncation_tail, std::string(pops_ok ? "true" : "false"),
                                  std::string(sign_ok ? "true" : "false")});
    }
    out.extra["kappa_scale"] = cfg.kappa_scale;
    out.extra["n_max"] = cfg.n_max;
    out.extra["all_agree"] = all_ok;
    return out;
}

}  // namespace twinotto
