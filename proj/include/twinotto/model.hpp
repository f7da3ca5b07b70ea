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

// Engine parameterization and the linearized three-mode model.
//
// Mode order is (a, b, c) = (optical, microwave, mechanical). All
// frequencies and rates are in units of the mechanical frequency omega_m,
// times in units of 1/omega_m, and hbar = 1.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "twinotto/errors.hpp"
#include "twinotto/gaussian.hpp"

namespace twinotto {

inline constexpr int kModes = 3;
inline constexpr int kOptical = 0;
inline constexpr int kMicrowave = 1;
inline constexpr int kMechanical = 2;

using Mat6 = PhaseMatrix<kModes>;
using Cov3 = CovMatrix<kModes>;
using Hamiltonian3 = HamiltonianMatrix<kModes>;
using Bogoliubov3 = BogoliubovResult<kModes>;
using Pair3 = ModePair<kModes>;

/// Physical constants of the engine. Defaults are the reference operating point
/// of the straight-twin engine.
struct EngineParams {
    double G = 0.1;  // G_b = -G_a = G
    double kappa_a = 1e-4;
    double kappa_b = 1.4e-4;
    double kappa_c = 2e-4;
    double nbar_a = 0.0;
    double nbar_b = 0.04;
    double nbar_c = 0.1;
    double xi0 = 1.0;  // xi = g x, stroke endpoints
    double xi1 = -0.4;
    double tau1 = 500.0;
    double tau2 = 2e4;
    double tau3 = 500.0;
    double tau4 = 2e4;
    bool rwa = true;  // drop the anti-rotating d c + d^dag c^dag terms

    std::array<double, kModes> kappas() const { return {kappa_a, kappa_b, kappa_c}; }
    std::array<double, kModes> nbars() const { return {nbar_a, nbar_b, nbar_c}; }

    friend bool operator==(const EngineParams&, const EngineParams&) = default;
};

/// Largest |xi| for which the exact (non-RWA) quadratic Hamiltonian stays
/// positive definite: sqrt(1 - 8 G^2).
inline double validity_bound(double G) {
    const double r = 1.0 - 8.0 * G * G;
    return r > 0.0 ? std::sqrt(r) : 0.0;
}

/// Throws ValidationError naming the first offending key.
inline void validate_params(const EngineParams& p, bool allow_boundary = false) {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(key, "must be > 0, got " + std::to_string(v));
    };
    auto non_negative = [](const char* key, double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(key, "must be >= 0, got " + std::to_string(v));
    };
    positive("G", p.G);
    positive("kappa_a", p.kappa_a);
    positive("kappa_b", p.kappa_b);
    positive("kappa_c", p.kappa_c);
    non_negative("nbar_a", p.nbar_a);
    non_negative("nbar_b", p.nbar_b);
    non_negative("nbar_c", p.nbar_c);
    if (!std::isfinite(p.xi0)) throw ValidationError("xi0", "must be finite");
    if (!std::isfinite(p.xi1)) throw ValidationError("xi1", "must be finite");
    positive("tau1", p.tau1);
    positive("tau2", p.tau2);
    positive("tau3", p.tau3);
    positive("tau4", p.tau4);
    if (!p.rwa && !allow_boundary) {
        const double bound = validity_bound(p.G);
        for (auto [key, v] : {std::pair{"xi0", p.xi0}, std::pair{"xi1", p.xi1}}) {
            if (std::abs(v) >= bound) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "|%.4g| violates the linearized-model validity bound sqrt(1-8G^2) = %.4f "
                              "(use --allow-boundary to override)",
                              v, bound);
                throw ValidationError(key, msg);
            }
        }
    }
}

struct Detunings {
    double delta_a;
    double delta_b;
};

/// Delta_a = -1 + xi, Delta_b = -1 - xi (pump offsets fixed at -omega_m).
inline Detunings detunings(const EngineParams&, double xi) { return {-1.0 + xi, -1.0 - xi}; }

/// Quadrature matrix of
///   H/hbar = c^dag c - Delta_a a^dag a - Delta_b b^dag b
///            + G (a + a^dag)(c + c^dag) - G (b + b^dag)(c + c^dag)
/// With rwa, each coupling keeps only G (d c^dag + d^dag c).
inline Hamiltonian3 hamiltonian_matrix(const EngineParams& p, double xi) {
    const Detunings d = detunings(p, xi);
    Mat6 m = Mat6::Zero();
    const std::array<double, kModes> freq{-d.delta_a, -d.delta_b, 1.0};
    for (int k = 0; k < kModes; ++k) m(2 * k, 2 * k) = m(2 * k + 1, 2 * k + 1) = freq[k];
    const int xc = 2 * kMechanical, pc = xc + 1;
    for (auto [mode, sign] : {std::pair{kOptical, 1.0}, std::pair{kMicrowave, -1.0}}) {
        const int xd = 2 * mode, pd = xd + 1;
        if (p.rwa) {
            // d c^dag + d^dag c = x_d x_c + p_d p_c
            m(xd, xc) = m(xc, xd) = sign * p.G;
            m(pd, pc) = m(pc, pd) = sign * p.G;
        } else {
            // (d + d^dag)(c + c^dag) = 2 x_d x_c
            m(xd, xc) = m(xc, xd) = 2.0 * sign * p.G;
        }
    }
    return Hamiltonian3(m);
}

struct DriftDiffusion {
    Mat6 a;
    Mat6 d;
};

/// d sigma/dt = A sigma + sigma A^T + D with A = Omega M - diag(kappa/2),
/// D = diag(kappa (2 nbar + 1)).
inline DriftDiffusion drift_diffusion(const EngineParams& p, double xi) {
    DriftDiffusion out;
    out.a = symplectic_form<kModes>() * hamiltonian_matrix(p, xi).matrix();
    out.d = Mat6::Zero();
    const auto k = p.kappas();
    const auto n = p.nbars();
    for (int m = 0; m < kModes; ++m) {
        for (int q = 2 * m; q < 2 * m + 2; ++q) {
            out.a(q, q) -= 0.5 * k[m];
            out.d(q, q) = k[m] * (2.0 * n[m] + 1.0);
        }
    }
    return out;
}

/// Bose-Einstein occupation 1/(exp(h f / k_B T) - 1) of a mode of ordinary
/// frequency freq_hz at temperature temp_K (SI).
inline double thermal_occupation(double freq_hz, double temp_K) {
    constexpr double kPlanck = 6.62607015e-34;
    constexpr double kBoltzmann = 1.380649e-23;
    if (!(freq_hz > 0.0)) throw ValidationError("freq_hz", "must be > 0");
    if (!(temp_K >= 0.0)) throw ValidationError("temp_K", "must be >= 0");
    if (temp_K == 0.0) return 0.0;
    return 1.0 / std::expm1(kPlanck * freq_hz / (kBoltzmann * temp_K));
}

/// Piecewise control xi(t): ramp xi0 -> xi1 (tau1), hold (tau2),
/// ramp back (tau3), hold (tau4).
class ControlSchedule {
public:
    explicit ControlSchedule(const EngineParams& p)
        : xi0_(p.xi0), xi1_(p.xi1), tau_{p.tau1, p.tau2, p.tau3, p.tau4} {
        start_[0] = 0.0;
        for (int s = 1; s < 4; ++s) start_[s] = start_[s - 1] + tau_[s - 1];
    }

    double duration() const { return start_[3] + tau_[3]; }
    double stroke_start(int stroke) const { return start_[stroke - 1]; }
    double stroke_duration(int stroke) const { return tau_[stroke - 1]; }

    /// Stroke (1..4) containing t in [0, duration]; boundaries belong to the later stroke.
    int stroke_at(double t) const {
        for (int s = 4; s >= 1; --s)
            if (t >= start_[s - 1]) return s;
        return 1;
    }

    double xi_in_stroke(int stroke, double t_local) const {
        switch (stroke) {
            case 1: return xi0_ + (xi1_ - xi0_) * (t_local / tau_[0]);
            case 2: return xi1_;
            case 3: return xi1_ + (xi0_ - xi1_) * (t_local / tau_[2]);
            default: return xi0_;
        }
    }

    double xi_dot_in_stroke(int stroke) const {
        switch (stroke) {
            case 1: return (xi1_ - xi0_) / tau_[0];
            case 3: return (xi0_ - xi1_) / tau_[2];
            default: return 0.0;
        }
    }

    double xi(double t) const {
        const int s = stroke_at(t);
        return xi_in_stroke(s, t - start_[s - 1]);
    }

private:
    double xi0_, xi1_;
    std::array<double, 4> tau_;
    std::array<double, 4> start_{};
};

/// Energy <H> - <H>_vacuum = 1/4 tr(M (sigma - I)) of the fluctuation Hamiltonian.
inline double fluctuation_energy(const EngineParams& p, double xi, const Cov3& state) {
    return 0.25 * (hamiltonian_matrix(p, xi).matrix() * (state.matrix() - Mat6::Identity())).trace();
}

inline std::array<double, kModes> bare_populations(const Cov3& state) {
    return {mode_population(state, bare_pair<kModes>(kOptical)),
            mode_population(state, bare_pair<kModes>(kMicrowave)),
            mode_population(state, bare_pair<kModes>(kMechanical))};
}

}  // namespace twinotto
