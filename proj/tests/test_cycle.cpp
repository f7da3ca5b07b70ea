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

#include <cmath>

#include "twinotto/cycle.hpp"
#include "twinotto/fock.hpp"

using namespace twinotto;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Largest |n(t) - n(stroke start)| of one polariton branch within a stroke.
double branch_drift(const CycleTrajectory& tr, int cycle, int stroke, int branch) {
    const StrokeSummary& s = tr.stroke(cycle, stroke);
    const double n0 = tr.samples[s.first_row].polariton[branch];
    double worst = 0.0;
    for (std::size_t i = s.first_row; i <= s.last_row; ++i)
        worst = std::max(worst, std::abs(tr.samples[i].polariton[branch] - n0));
    return worst;
}

const CycleTrajectory& reference_limit_cycle() {
    static const CycleTrajectory traj = [] {
        const EngineParams p;
        return integrate_cycle(p, run_until_steady(p, p.xi0, {.verify = false}), kDefaultDt, 5);
    }();
    return traj;
}

}  // namespace

TEST_CASE("uncoupled engine does no net work", "[cycle]") {
    EngineParams p;
    p.G = 0.0;
    const Cov3 th = Cov3::thermal(p.nbars());
    const CycleTrajectory tr = integrate_cycle(p, th, 0.1, 1);
    for (const auto& s : tr.samples)
        for (int m = 0; m < 3; ++m) CHECK_THAT(s.bare[m], WithinAbs(p.nbars()[m], 1e-9));
    const StrokeTotals w = work_from_trajectory(tr);
    CHECK_THAT(w.per_stroke[0], WithinAbs((p.xi1 - p.xi0) * p.nbar_b, 1e-9));
    CHECK_THAT(w.per_stroke[0], WithinAbs(-w.per_stroke[2], 1e-9));
    CHECK(w.per_stroke[1] == 0.0);
    CHECK(w.per_stroke[3] == 0.0);
    CHECK_THAT(w.total, WithinAbs(0.0, 1e-9));
}

TEST_CASE("no ramp means no work", "[cycle]") {
    EngineParams p;
    p.xi1 = p.xi0;
    p.tau2 = p.tau4 = 2000.0;
    const CycleTrajectory tr = integrate_cycle(p, Cov3::thermal(p.nbars()), 0.1, 1);
    const StrokeTotals w = work_from_trajectory(tr);
    for (double x : w.per_stroke) CHECK(x == 0.0);
}

TEST_CASE("zero-temperature steady engine exchanges no heat", "[cycle]") {
    EngineParams p;
    p.nbar_a = p.nbar_b = p.nbar_c = 0.0;
    p.xi1 = p.xi0;
    p.tau2 = p.tau4 = 2000.0;
    const CycleTrajectory tr = integrate_cycle(p, run_until_steady(p, p.xi0, {.verify = false}), 0.1, 1);
    const StrokeTotals q = heat_from_trajectory(tr);
    for (double x : q.per_stroke) CHECK_THAT(x, WithinAbs(0.0, 1e-12));
}

TEST_CASE("thermalization heat of a single relaxing mode", "[cycle]") {
    EngineParams p;
    p.G = 0.0;
    p.tau2 = 1e5;
    Cov3 init = Cov3::thermal({p.nbar_a, 0.2, p.nbar_c});
    const CycleTrajectory tr = integrate_cycle(p, init, 0.1, 1);
    const double nb_end1 = tr.samples[tr.stroke(0, 1).last_row].bare[1];
    const double omega_b = -detunings(p, p.xi1).delta_b;
    CHECK_THAT(tr.stroke(0, 2).heat, WithinAbs(omega_b * (p.nbar_b - nb_end1), 1e-6));
}

TEST_CASE("reference cycle: polaritons carry the populations", "[cycle][reference]") {
    const CycleTrajectory& tr = reference_limit_cycle();
    const int last = tr.n_cycles - 1;
    for (int stroke : {1, 3}) {
        const StrokeSummary& s = tr.stroke(last, stroke);
        const auto& n0 = tr.samples[s.first_row].polariton;
        const double scale = std::max(n0[0], n0[1]);
        for (int br : {0, 1}) {
            INFO("stroke " << stroke << " branch " << br);
            CHECK(branch_drift(tr, last, stroke, br) < 0.1 * scale);
        }
    }
    // microwave -> optical conversion during stroke 1
    const auto& end1 = tr.samples[tr.stroke(last, 1).last_row].bare;
    CHECK(end1[kOptical] > end1[kMicrowave]);
    // quasi-dark mode population stays put
    const double nc0 = tr.samples[tr.stroke(last, 1).first_row].polariton[2];
    for (std::size_t i = tr.stroke(last, 1).first_row; i <= tr.stroke(last, 4).last_row; ++i)
        CHECK(std::abs(tr.samples[i].polariton[2] - nc0) <= 0.2 * nc0 + 0.01);
    CHECK(work_from_trajectory(tr).total < 0.0);
}

TEST_CASE("reference cycle: limit cycle and first law", "[cycle][reference]") {
    const CycleTrajectory& tr = reference_limit_cycle();
    CHECK(tr.limit_cycle);
    const int n = tr.n_cycles;
    CHECK((tr.cycle_states[n].matrix() - tr.cycle_states[n - 1].matrix()).cwiseAbs().maxCoeff() <= 1e-6);
    const StrokeTotals w = work_from_trajectory(tr);
    const StrokeTotals q = heat_from_trajectory(tr);
    CHECK_THAT(w.total + q.total, WithinAbs(0.0, 1e-6));
    // Q = dE - W stroke by stroke
    for (int s = 1; s <= 4; ++s) {
        const StrokeSummary& ss = tr.stroke(n - 1, s);
        CHECK_THAT(ss.heat + ss.work, WithinAbs(ss.energy_end - ss.energy_start, 1e-15));
    }
    // heat leaks during the finite-duration ramps; thermalization strokes carry the rest
    const double ramp_heat = q.per_stroke[0] + q.per_stroke[2];
    CHECK_THAT(q.per_stroke[1] + q.per_stroke[3], WithinAbs(-w.total - ramp_heat, 1e-6));
    CHECK(std::abs(ramp_heat) < 0.1 * std::abs(w.total));
    CHECK(tr.min_state_eigenvalue >= -1e-8);
}

TEST_CASE("reference cycle: decimation and bookkeeping", "[cycle][reference]") {
    const CycleTrajectory& tr = reference_limit_cycle();
    CHECK(tr.samples.size() <= kMaxRowsPerCycle * static_cast<std::size_t>(tr.n_cycles));
    CHECK(tr.strokes.size() == 4u * static_cast<std::size_t>(tr.n_cycles));
    const ControlSchedule sched(EngineParams{});
    for (const StrokeSummary& s : tr.strokes) {
        CHECK(s.last_row >= s.first_row + 1);
        const double t0 = s.cycle * sched.duration() + sched.stroke_start(s.stroke);
        CHECK_THAT(tr.samples[s.first_row].t, WithinAbs(t0, 1e-9));
        CHECK_THAT(tr.samples[s.last_row].t, WithinAbs(t0 + sched.stroke_duration(s.stroke), 1e-6));
        for (std::size_t i = s.first_row; i <= s.last_row; ++i) CHECK(tr.samples[i].stroke == s.stroke);
    }
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t >= tr.samples[i - 1].t);
}

TEST_CASE("integrator converges at fourth order", "[cycle][property]") {
    EngineParams p;
    p.tau1 = p.tau3 = 50.0;
    p.tau2 = p.tau4 = 200.0;
    const Cov3 s0 = run_until_steady(p, p.xi0, {.verify = false});
    std::vector<double> w;
    for (double dt : {0.05, 0.025, 0.0125}) w.push_back(work_from_trajectory(integrate_cycle(p, s0, dt, 1)).total);
    const double d1 = std::abs(w[1] - w[0]), d2 = std::abs(w[2] - w[1]);
    CHECK(d1 > 0.0);
    CHECK(d2 <= 0.1 * d1);
}

TEST_CASE("slower ramps suppress non-adiabatic population drift", "[cycle][property]") {
    // rates far below 1/tau so that only the non-adiabatic drift remains
    EngineParams p = scaled_kappas(EngineParams{}, 1e-4);
    p.tau2 = p.tau4 = 100.0;
    const Cov3 s0 = run_until_steady(EngineParams{}, p.xi0, {.verify = false});
    std::array<std::array<double, 4>, 2> drift{};
    for (int k = 0; k < 2; ++k) {
        p.tau1 = p.tau3 = 250.0 * (k + 1);
        const CycleTrajectory tr = integrate_cycle(p, s0, kDefaultDt, 1);
        drift[k] = {branch_drift(tr, 0, 1, 0), branch_drift(tr, 0, 1, 1), branch_drift(tr, 0, 3, 0),
                    branch_drift(tr, 0, 3, 1)};
    }
    for (int i = 0; i < 4; ++i) CHECK(drift[1][i] <= 0.6 * drift[0][i]);
}

TEST_CASE("steady state agrees with long-time integration", "[cycle]") {
    const EngineParams p;
    const Cov3 s = run_until_steady(p, p.xi0, {.tol = 1e-4});
    const DriftDiffusion dd = drift_diffusion(p, p.xi0);
    CHECK((s.matrix() - lyapunov_steady_state<3>(dd.a, dd.d).matrix()).cwiseAbs().maxCoeff() == 0.0);
    EngineParams unstable;
    unstable.rwa = false;
    CHECK_THROWS_AS(run_until_steady(unstable, 0.99), NotHurwitzError);
}

TEST_CASE("integrate_cycle input validation", "[cycle]") {
    const EngineParams p;
    const Cov3 th = Cov3::thermal(p.nbars());
    CHECK_THROWS_AS(integrate_cycle(p, th, 0.2, 1), ValidationError);
    CHECK_THROWS_AS(integrate_cycle(p, th, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(integrate_cycle(p, th, 0.05, 0), ValidationError);
    CHECK_THROWS_AS(integrate_cycle(p, Cov3(0.5 * Mat6::Identity()), 0.05, 1), PhysicalityError);
}
