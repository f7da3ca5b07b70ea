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

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "twinotto/errors.hpp"
#include "twinotto/gaussian.hpp"
#include "twinotto/model.hpp"
#include "twinotto/polariton.hpp"

namespace twinotto {

/// Effective dissipation of the RWA polaritons A, B, C.
struct PolaritonRates {
    double kappa_A, kappa_B, kappa_C;
    double nbar_A, nbar_B, nbar_C;
    double S_AB, S_AC, S_BC;  // kappa-weighted coupling coefficients
    double R_AB, R_AC, R_BC;  // same with kappa_o -> kappa_o nbar_o
};

namespace detail {

struct RateSet {
    double A, B, C, AB, AC, BC;
};

inline RateSet rate_set(double theta, double ka, double kb, double kc) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const double c2 = c * c, s2 = s * s;
    const double st = std::sin(theta), ct = std::cos(theta);
    const double st2 = st * st;
    return {ka * c2 * c2 + kb * s2 * s2 + 0.5 * kc * st2,
            kb * c2 * c2 + ka * s2 * s2 + 0.5 * kc * st2,
            0.5 * (ka + kb) * st2 + kc * ct * ct,
            0.25 * (2.0 * kc - ka - kb) * st2,
            st / std::sqrt(2.0) * (kb * s2 - ka * c2 + kc * ct),
            st / std::sqrt(2.0) * (ka * s2 - kb * c2 + kc * ct)};
}

}  // namespace detail

inline PolaritonRates polariton_rates(const EngineParams& p, double xi) {
    const double theta = mixing_angle(p, xi);
    const detail::RateSet k = detail::rate_set(theta, p.kappa_a, p.kappa_b, p.kappa_c);
    const detail::RateSet kn =
        detail::rate_set(theta, p.kappa_a * p.nbar_a, p.kappa_b * p.nbar_b, p.kappa_c * p.nbar_c);
    // the C row of the analytic basis flips sign with xi
    const double sc = xi >= 0.0 ? 1.0 : -1.0;
    return {k.A,      k.B,      k.C,      kn.A / k.A, kn.B / k.B,    kn.C / k.C,
            k.AB,     sc * k.AC, sc * k.BC, kn.AB,      sc * kn.AC, sc * kn.BC};
}

/// Population correction n_A - nbar_A implied by the steady polariton master
/// equation: -(S_AB Re<A^dag B> + S_AC Re<A^dag C>) / kappa_A, with moments
/// taken in the analytic RWA basis (exact under the RWA).
inline double population_correction_A(const PolaritonRates& r, cplx bdag_a, cplx cdag_a) {
    return -(r.S_AB * bdag_a.real() + r.S_AC * cdag_a.real()) / r.kappa_A;
}

/// Work W = (freq_end - freq_start) n_start of a slow frequency ramp at fixed
/// population. Negative values are delivered by the engine.
inline double adiabatic_stroke_work(double n_start, double freq_start, double freq_end) {
    if (!(n_start >= 0.0)) throw ValidationError("n_start", "population must be >= 0");
    return (freq_end - freq_start) * n_start;
}

/// Ideal cycle work 2 [R(xi1) - R(xi0)] nbar_b, R(xi) = sqrt(2 G^2 + xi^2).
inline double ideal_total_work(const EngineParams& p) {
    const double g2 = 2.0 * p.G * p.G;
    return 2.0 * (std::sqrt(g2 + p.xi1 * p.xi1) - std::sqrt(g2 + p.xi0 * p.xi0)) * p.nbar_b;
}

/// Refined form [R(xi1) - R(xi0)] [n_A(xi1) - n_B(xi1) + nbar_b] with
/// supplied steady populations at xi1.
inline double ideal_total_work(const EngineParams& p, double n_A_x1, double n_B_x1) {
    const double g2 = 2.0 * p.G * p.G;
    return (std::sqrt(g2 + p.xi1 * p.xi1) - std::sqrt(g2 + p.xi0 * p.xi0)) * (n_A_x1 - n_B_x1 + p.nbar_b);
}

enum class SteadyMode { quantum, quasi_classical };

inline const char* mode_name(SteadyMode m) { return m == SteadyMode::quantum ? "quantum" : "quasi_classical"; }

struct PolaritonSteadyState {
    PolaritonBasis basis;
    std::array<double, 3> n{};  // n_A, n_B, n_C
    cplx adag_b{}, adag_c{}, bdag_c{};
    double var_A = 0.0, var_B = 0.0, cov_AB = 0.0;  // number moments
};

inline PolaritonSteadyState steady_state_polariton(const EngineParams& p, double xi, SteadyMode mode) {
    PolaritonSteadyState out;
    // under the RWA the analytic basis fixes the phases of the cross moments
    out.basis = p.rwa ? rwa_transform(p, xi) : polariton_basis(p, xi);
    const DriftDiffusion dd = drift_diffusion(p, xi);
    if (!is_hurwitz<kModes>(dd.a)) throw NotHurwitzError("drift matrix is not Hurwitz at xi=" + std::to_string(xi));
    if (mode == SteadyMode::quasi_classical) {
        const PolaritonRates r = polariton_rates(p, xi);
        out.n = {r.nbar_A, r.nbar_B, r.nbar_C};
        out.var_A = r.nbar_A * (r.nbar_A + 1.0);
        out.var_B = r.nbar_B * (r.nbar_B + 1.0);
        return out;
    }
    const Cov3 sigma = lyapunov_steady_state<kModes>(dd.a, dd.d);
    const Pair3 pa = out.basis.pair(Branch::A), pb = out.basis.pair(Branch::B), pc = out.basis.pair(Branch::C);
    const PairMoments ab = pair_moments(sigma, pa, pb);
    const PairMoments ac = pair_moments(sigma, pa, pc);
    const PairMoments bc = pair_moments(sigma, pb, pc);
    out.n = {ab.n_j, ab.n_k, ac.n_k};
    out.adag_b = ab.jdag_k;
    out.adag_c = ac.jdag_k;
    out.bdag_c = bc.jdag_k;
    const NumberMoments nm = number_moments(sigma, pa, pb);
    out.var_A = nm.var_j;
    out.var_B = nm.var_k;
    out.cov_AB = nm.cov_jk;
    return out;
}

/// Per-polariton stroke works and stroke-3 work fluctuations.
struct WorkReport {
    double W_1A = 0.0, W_1B = 0.0, W_3A = 0.0, W_3B = 0.0;
    double Var_3A = 0.0, Var_3B = 0.0, Cov_3AB = 0.0;
    double J = 0.0;    // stroke 3 (at xi1)
    double J_1 = 0.0;  // stroke 1 (at xi0)
    double W_total_quantum = 0.0;
    double W_total_classical = 0.0;

    double W_total() const { return W_1A + W_1B + W_3A + W_3B; }
    double extracted_quantum() const { return -W_total_quantum; }
    double extracted_classical() const { return -W_total_classical; }
};

namespace detail {

inline double correlation(double cov, double var1, double var2) {
    const double den = std::sqrt(var1 * var2);
    if (!(den > 0.0)) return 0.0;
    return std::clamp(cov / den, -1.0, 1.0);
}

struct EndpointWorks {
    double w1a, w1b, w3a, w3b;
    double d_a, d_b;  // omega(xi0) - omega(xi1) per branch
};

inline EndpointWorks endpoint_works(const PolaritonSteadyState& s0, const PolaritonSteadyState& s1) {
    const double fa0 = s0.basis.freq(Branch::A), fa1 = s1.basis.freq(Branch::A);
    const double fb0 = s0.basis.freq(Branch::B), fb1 = s1.basis.freq(Branch::B);
    return {adiabatic_stroke_work(s0.n[0], fa0, fa1), adiabatic_stroke_work(s0.n[1], fb0, fb1),
            adiabatic_stroke_work(s1.n[0], fa1, fa0), adiabatic_stroke_work(s1.n[1], fb1, fb0),
            fa0 - fa1, fb0 - fb1};
}

}  // namespace detail

/// Adiabatic-limit cycle work between steady states at xi0 and xi1.
/// Per-stroke fields and fluctuations follow `mode`; both totals are filled.
inline WorkReport work_statistics(const EngineParams& p, double xi0, double xi1, SteadyMode mode) {
    const PolaritonSteadyState q0 = steady_state_polariton(p, xi0, SteadyMode::quantum);
    const PolaritonSteadyState q1 = steady_state_polariton(p, xi1, SteadyMode::quantum);
    const PolaritonSteadyState c0 = steady_state_polariton(p, xi0, SteadyMode::quasi_classical);
    const PolaritonSteadyState c1 = steady_state_polariton(p, xi1, SteadyMode::quasi_classical);
    const detail::EndpointWorks wq = detail::endpoint_works(q0, q1);
    const detail::EndpointWorks wc = detail::endpoint_works(c0, c1);

    const bool quantum = mode == SteadyMode::quantum;
    const detail::EndpointWorks& w = quantum ? wq : wc;
    const PolaritonSteadyState& s0 = quantum ? q0 : c0;
    const PolaritonSteadyState& s1 = quantum ? q1 : c1;

    WorkReport r;
    r.W_1A = w.w1a;
    r.W_1B = w.w1b;
    r.W_3A = w.w3a;
    r.W_3B = w.w3b;
    r.Var_3A = w.d_a * w.d_a * s1.var_A;
    r.Var_3B = w.d_b * w.d_b * s1.var_B;
    r.Cov_3AB = w.d_a * w.d_b * s1.cov_AB;
    r.J = detail::correlation(r.Cov_3AB, r.Var_3A, r.Var_3B);
    r.J_1 = detail::correlation(w.d_a * w.d_b * s0.cov_AB, w.d_a * w.d_a * s0.var_A, w.d_b * w.d_b * s0.var_B);
    r.W_total_quantum = wq.w1a + wq.w1b + wq.w3a + wq.w3b;
    r.W_total_classical = wc.w1a + wc.w1b + wc.w3a + wc.w3b;
    return r;
}

// ---------------------------------------------------------------- sweeps

enum class SweepVar { xi1, nbar_c, G };

inline const char* sweep_var_name(SweepVar v) {
    switch (v) {
        case SweepVar::xi1: return "xi1";
        case SweepVar::nbar_c: return "nbar_c";
        default: return "G";
    }
}

inline SweepVar parse_sweep_var(const std::string& name) {
    if (name == "xi1") return SweepVar::xi1;
    if (name == "nbar_c") return SweepVar::nbar_c;
    if (name == "G") return SweepVar::G;
    throw ValidationError("axis", "unknown sweep axis '" + name + "' (expected xi1, nbar_c or G)");
}

struct SweepAxis {
    SweepVar var;
    std::vector<double> values;
};

/// lo, lo + step, ... up to hi (inclusive within half a step).
inline std::vector<double> grid_values(double lo, double hi, double step) {
    if (!(step > 0.0)) throw ValidationError("step", "must be > 0");
    if (!(hi >= lo)) throw ValidationError("range", "upper bound below lower bound");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5)) + 1;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
    return v;
}

inline constexpr std::size_t kMaxGridPoints = 1000000;

struct SweepRow {
    double xi1, nbar_c, G;
    WorkReport report;  // quantum mode
    std::string status;  // "ok" or an error description

    bool ok() const { return status == "ok"; }
};

inline void set_sweep_var(EngineParams& p, SweepVar v, double value) {
    switch (v) {
        case SweepVar::xi1: p.xi1 = value; break;
        case SweepVar::nbar_c: p.nbar_c = value; break;
        case SweepVar::G: p.G = value; break;
    }
}

/// Evaluates work_statistics on the grid axis1 x axis2 (axis2 fastest).
/// Points run concurrently; the row order is fixed. Failing points keep
/// NaN works and record the error in `status`.
inline std::vector<SweepRow> sweep(const EngineParams& base, const SweepAxis& axis1, const SweepAxis& axis2,
                                   unsigned n_threads = 0, bool allow_boundary = false) {
    if (axis1.var == axis2.var) throw ValidationError("axis", "sweep axes must differ");
    const std::size_t n1 = axis1.values.size(), n2 = axis2.values.size();
    if (n1 == 0 || n2 == 0) throw ValidationError("axis", "sweep axes must be non-empty");
    if (n1 * n2 > kMaxGridPoints) throw ValidationError("axis", "grid exceeds 1e6 points");

    std::vector<SweepRow> rows(n1 * n2);
    auto eval = [&](std::size_t idx) {
        EngineParams p = base;
        set_sweep_var(p, axis1.var, axis1.values[idx / n2]);
        set_sweep_var(p, axis2.var, axis2.values[idx % n2]);
        SweepRow& row = rows[idx];
        row.xi1 = p.xi1;
        row.nbar_c = p.nbar_c;
        row.G = p.G;
        try {
            validate_params(p, allow_boundary);
            row.report = work_statistics(p, p.xi0, p.xi1, SteadyMode::quantum);
            row.status = "ok";
        } catch (const std::exception& e) {
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            row.report.W_total_quantum = row.report.W_total_classical = nan;
            row.report.Var_3A = row.report.Var_3B = row.report.Cov_3AB = row.report.J = nan;
            row.status = std::string("error: ") + e.what();
        }
    };

    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, rows.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) eval(i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

}  // namespace twinotto
