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

// Four-stroke Otto protocol: covariance dynamics under the control
// schedule, populations, work and heat bookkeeping.
//
// Work convention: work done by the engine is negative. The work rate is
// <dH/dt> = xi_dot (n_b - n_a), integrated alongside sigma by the same RK4
// stages so that stroke works converge at fourth order.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "twinotto/errors.hpp"
#include "twinotto/gaussian.hpp"
#include "twinotto/integrator.hpp"
#include "twinotto/model.hpp"
#include "twinotto/polariton.hpp"

namespace twinotto {

inline constexpr double kDefaultDt = 0.05;
inline constexpr double kMaxDt = 0.1;
inline constexpr std::size_t kMaxRowsPerCycle = 20000;
inline constexpr double kLimitCycleWorkTol = 1e-4;

struct TrajectorySample {
    double t;
    double xi;
    std::array<double, 3> bare;       // n_a, n_b, n_c
    std::array<double, 3> polariton;  // n_A, n_B, n_C
    double work_rate;
    int stroke;  // 1..4
    int cycle;   // 0-based
};

struct StrokeSummary {
    int cycle;
    int stroke;
    double work;
    double heat;
    double energy_start;
    double energy_end;
    std::size_t first_row;
    std::size_t last_row;
};

struct CycleTrajectory {
    std::vector<TrajectorySample> samples;
    std::vector<StrokeSummary> strokes;  // 4 per cycle, in time order
    std::vector<Cov3> cycle_states;      // state at the start of every cycle plus the final state
    double min_state_eigenvalue = 0.0;   // over every stored sample
    int n_cycles = 0;
    bool limit_cycle = false;            // last two cycles agree per stroke within 1e-4

    const StrokeSummary& stroke(int cycle, int s) const { return strokes[static_cast<std::size_t>(4 * cycle + s - 1)]; }
};

namespace detail {

struct CycleState {
    Mat6 sigma;
    double work;

    friend CycleState operator+(const CycleState& l, const CycleState& r) { return {l.sigma + r.sigma, l.work + r.work}; }
    friend CycleState operator*(double s, const CycleState& y) { return {s * y.sigma, s * y.work}; }
};

/// A(xi) = A0 + xi * A1, since xi enters M only through the bare detunings.
struct LinearDrift {
    Mat6 a0;
    Mat6 a1;
    Mat6 d;

    explicit LinearDrift(const EngineParams& p) {
        const DriftDiffusion dd0 = drift_diffusion(p, 0.0);
        const DriftDiffusion dd1 = drift_diffusion(p, 1.0);
        a0 = dd0.a;
        a1 = dd1.a - dd0.a;
        d = dd0.d;
    }

    Mat6 at(double xi) const { return a0 + xi * a1; }
};

inline double raw_population(const Mat6& s, int mode) {
    return 0.25 * (s(2 * mode, 2 * mode) + s(2 * mode + 1, 2 * mode + 1) - 2.0);
}

inline double work_rate(double xi_dot, const Mat6& s) {
    return xi_dot * (raw_population(s, kMicrowave) - raw_population(s, kOptical));
}

}  // namespace detail

/// Evolves sigma at fixed xi for `duration` with steps no larger than dt.
inline Cov3 evolve_fixed(const EngineParams& p, double xi, const Cov3& initial, double duration, double dt) {
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
    const DriftDiffusion dd = drift_diffusion(p, xi);
    const Mat6 at = dd.a.transpose();
    auto rhs = [&](double, const Mat6& s) -> Mat6 { return dd.a * s + s * at + dd.d; };
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration / dt)));
    const double h = duration / static_cast<double>(steps);
    Mat6 s = initial.matrix();
    for (long i = 0; i < steps; ++i) {
        s = rk4_step(rhs, 0.0, s, h);
        s = 0.5 * (s + s.transpose());
    }
    return Cov3(s);
}

/// Integrates n_cycles engine cycles starting from `initial`.
inline CycleTrajectory integrate_cycle(const EngineParams& p, const Cov3& initial, double dt_max = kDefaultDt,
                                       int n_cycles = 1) {
    if (!(dt_max > 0.0) || dt_max > kMaxDt)
        throw ValidationError("dt_max", "must be in (0, 0.1], got " + std::to_string(dt_max));
    if (n_cycles < 1) throw ValidationError("n_cycles", "must be >= 1");
    {
        const StateCheck chk = validate_state(initial);
        if (!chk.physical) throw PhysicalityError("initial state is unphysical");
    }

    const ControlSchedule sched(p);
    const detail::LinearDrift drift(p);

    std::array<long, 4> steps{};
    long total_steps = 0;
    for (int s = 1; s <= 4; ++s) {
        steps[s - 1] = std::max(1L, static_cast<long>(std::ceil(sched.stroke_duration(s) / dt_max)));
        total_steps += steps[s - 1];
    }
    const long stride = std::max(1L, static_cast<long>(std::ceil(static_cast<double>(total_steps) /
                                                                 static_cast<double>(kMaxRowsPerCycle - 8))));

    CycleTrajectory traj;
    traj.n_cycles = n_cycles;
    traj.min_state_eigenvalue = validate_state(initial).min_eigenvalue;
    traj.cycle_states.push_back(initial);

    Mat6 sigma = initial.matrix();
    double t_cycle0 = 0.0;
    for (int cyc = 0; cyc < n_cycles; ++cyc) {
        for (int s = 1; s <= 4; ++s) {
            const double t0 = sched.stroke_start(s);
            const double h = sched.stroke_duration(s) / static_cast<double>(steps[s - 1]);
            const double xi_dot = sched.xi_dot_in_stroke(s);
            const bool ramp = (s == 1 || s == 3);
            PolaritonBasis hold_basis;
            if (!ramp) hold_basis = polariton_basis(p, sched.xi_in_stroke(s, 0.0));

            auto record = [&](long i, const Mat6& sg) {
                const double tl = static_cast<double>(i) * h;
                const double xi = sched.xi_in_stroke(s, tl);
                const Cov3 cov(sg);
                const StateCheck chk = validate_state(cov);
                traj.min_state_eigenvalue = std::min(traj.min_state_eigenvalue, chk.min_eigenvalue);
                if (!chk.physical)
                    throw PhysicalityError("state became unphysical at t=" + std::to_string(t_cycle0 + t0 + tl) +
                                           " (min eig " + std::to_string(chk.min_eigenvalue) + ")");
                const PolaritonBasis basis = ramp ? polariton_basis(p, xi) : hold_basis;
                traj.samples.push_back({t_cycle0 + t0 + tl, xi, bare_populations(cov),
                                        polariton_populations(cov, basis), detail::work_rate(xi_dot, sg), s, cyc});
            };

            StrokeSummary sum{};
            sum.cycle = cyc;
            sum.stroke = s;
            sum.energy_start = fluctuation_energy(p, sched.xi_in_stroke(s, 0.0), Cov3(sigma));
            sum.first_row = traj.samples.size();
            record(0, sigma);

            auto rhs = [&](double tl, const detail::CycleState& y) -> detail::CycleState {
                const Mat6 a = drift.at(sched.xi_in_stroke(s, tl));
                return {a * y.sigma + y.sigma * a.transpose() + drift.d, detail::work_rate(xi_dot, y.sigma)};
            };
            detail::CycleState y{sigma, 0.0};
            const long n = steps[s - 1];
            for (long i = 0; i < n; ++i) {
                y = rk4_step(rhs, static_cast<double>(i) * h, y, h);
                y.sigma = 0.5 * (y.sigma + y.sigma.transpose());
                if ((i + 1) % stride == 0 || i + 1 == n) record(i + 1, y.sigma);
            }
            sigma = y.sigma;
            sum.work = y.work;
            sum.energy_end = fluctuation_energy(p, sched.xi_in_stroke(s, sched.stroke_duration(s)), Cov3(sigma));
            sum.heat = (sum.energy_end - sum.energy_start) - sum.work;
            sum.last_row = traj.samples.size() - 1;
            traj.strokes.push_back(sum);
        }
        t_cycle0 += sched.duration();
        traj.cycle_states.push_back(Cov3(sigma));
    }

    if (n_cycles > 1) {
        bool same = true;
        for (int s = 1; s <= 4; ++s)
            same = same && std::abs(traj.stroke(n_cycles - 1, s).work - traj.stroke(n_cycles - 2, s).work) <
                               kLimitCycleWorkTol;
        traj.limit_cycle = same;
    }
    return traj;
}

struct StrokeTotals {
    std::array<double, 4> per_stroke{};
    double total = 0.0;
};

/// Per-stroke works (W1..W4) of one cycle (default: the last one).
inline StrokeTotals work_from_trajectory(const CycleTrajectory& traj, int cycle = -1) {
    const int c = cycle < 0 ? traj.n_cycles - 1 : cycle;
    StrokeTotals out;
    for (int s = 1; s <= 4; ++s) {
        out.per_stroke[s - 1] = traj.stroke(c, s).work;
        out.total += out.per_stroke[s - 1];
    }
    return out;
}

/// Per-stroke heats Q = dE - W of one cycle (default: the last one).
inline StrokeTotals heat_from_trajectory(const CycleTrajectory& traj, int cycle = -1) {
    const int c = cycle < 0 ? traj.n_cycles - 1 : cycle;
    StrokeTotals out;
    for (int s = 1; s <= 4; ++s) {
        out.per_stroke[s - 1] = traj.stroke(c, s).heat;
        out.total += out.per_stroke[s - 1];
    }
    return out;
}

struct SteadyOptions {
    double tol = 1e-4;             // max entrywise disagreement with time integration
    double horizon_factor = 10.0;  // integrate to horizon_factor / min(kappa)
    double dt = kMaxDt;
    bool verify = true;
};

/// Coupled steady state at fixed xi (Lyapunov solve), optionally checked
/// against direct time integration from the bare thermal product state.
inline Cov3 run_until_steady(const EngineParams& p, double xi, const SteadyOptions& opt = {}) {
    const DriftDiffusion dd = drift_diffusion(p, xi);
    Cov3 steady = lyapunov_steady_state<kModes>(dd.a, dd.d);
    if (opt.verify) {
        const auto k = p.kappas();
        const double horizon = opt.horizon_factor / *std::min_element(k.begin(), k.end());
        const Cov3 evolved = evolve_fixed(p, xi, Cov3::thermal(p.nbars()), horizon, opt.dt);
        const double diff = detail::max_abs(Mat6(evolved.matrix() - steady.matrix()));
        if (diff > opt.tol)
            throw NumericalError("steady state disagrees with time integration by " + std::to_string(diff));
    }
    return steady;
}

}  // namespace twinotto
