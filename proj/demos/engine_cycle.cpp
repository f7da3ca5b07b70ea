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

// Runs the reference engine to its limit cycle and prints the stroke
// bookkeeping next to the adiabatic-limit prediction.

#include <cstdio>

#include "twinotto.hpp"

int main() {
    using namespace twinotto;
    const EngineParams p;
    const Cov3 start = run_until_steady(p, p.xi0, {.verify = false});
    const CycleTrajectory tr = integrate_cycle(p, start, kDefaultDt, 5);

    std::printf("straight-twin Otto engine: G=%.2f xi0=%.2f xi1=%.2f nbar=(%.2f, %.2f, %.2f)\n", p.G, p.xi0, p.xi1,
                p.nbar_a, p.nbar_b, p.nbar_c);
    for (int c = 0; c < tr.n_cycles; ++c) {
        const StrokeTotals w = work_from_trajectory(tr, c);
        const StrokeTotals q = heat_from_trajectory(tr, c);
        std::printf("cycle %d: W = %+.6f  Q = %+.6f  W+Q = %+.1e\n", c + 1, w.total, q.total, w.total + q.total);
    }
    std::printf("\nlimit cycle (%s):\n", tr.limit_cycle ? "converged" : "not converged");
    std::printf("%-8s %12s %12s\n", "stroke", "W", "Q");
    for (int s = 1; s <= 4; ++s) {
        const StrokeSummary& ss = tr.stroke(tr.n_cycles - 1, s);
        std::printf("%-8d %+12.6f %+12.6f\n", s, ss.work, ss.heat);
    }

    const WorkReport adiabatic = work_statistics(p, p.xi0, p.xi1, SteadyMode::quantum);
    std::printf("\nextracted work: dynamical %.6f, adiabatic limit %.6f, ideal %.6f\n",
                -work_from_trajectory(tr).total, adiabatic.extracted_quantum(), -ideal_total_work(p));
    std::printf("stroke-3 work correlation J = %.3e\n", adiabatic.J);
    return 0;
}
