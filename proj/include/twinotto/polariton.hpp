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

// Polariton (normal-mode) bases of the engine Hamiltonian.
//
// Branch A is the lower polariton, B the upper one and C the quasi-dark
// middle branch that stays near omega_m.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "twinotto/gaussian.hpp"
#include "twinotto/model.hpp"

namespace twinotto {

enum class Branch { A = 0, B = 1, C = 2 };

inline constexpr std::array<Branch, 3> kBranches{Branch::A, Branch::B, Branch::C};

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::A: return "A";
        case Branch::B: return "B";
        default: return "C";
    }
}

struct PolaritonBasis {
    Bogoliubov3 transform;
    std::array<int, 3> slot{0, 2, 1};  // slot[branch] = normal-mode index in `transform`
    double theta = 0.0;
    double xi = 0.0;

    double freq(Branch b) const { return transform.freqs[slot[static_cast<int>(b)]]; }
    Pair3 pair(Branch b) const { return transform.pair(slot[static_cast<int>(b)]); }
    const ModeRow<kModes>& mode(Branch b) const { return transform.modes[slot[static_cast<int>(b)]]; }
    double bare_weight(Branch b, int bare_mode) const {
        return transform.bare_weight(slot[static_cast<int>(b)], bare_mode);
    }
};

/// theta = atan2(sqrt(2) G, xi): pi/2 at xi = 0, -> 0 for xi >> G, -> pi for xi << -G.
inline double mixing_angle(const EngineParams& p, double xi) { return std::atan2(std::sqrt(2.0) * p.G, xi); }

/// Coefficients of the RWA polaritons on (a, b, c), rows ordered A, B, C.
///
/// The mechanical column carries the sign that diagonalizes this library's
/// Hamiltonian (G_a = -G, G_b = +G). The C row uses the xi >= 0
/// representative for xi >= 0 and flips sign for xi < 0.
inline std::array<std::array<double, 3>, 3> rwa_coefficients(double theta, double xi) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const double cs = std::sqrt(2.0) * c * s;
    const double sgn = xi >= 0.0 ? 1.0 : -1.0;
    const double st = std::sin(theta) / std::sqrt(2.0);
    return {{{c * c, -s * s, -cs}, {-s * s, c * c, -cs}, {-sgn * st, -sgn * st, -sgn * std::cos(theta)}}};
}

/// Analytic RWA polariton basis; frequencies 1 -/+ sqrt(2 G^2 + xi^2) and 1.
inline PolaritonBasis rwa_transform(const EngineParams& p, double xi) {
    PolaritonBasis basis;
    basis.theta = mixing_angle(p, xi);
    basis.xi = xi;
    const auto coeff = rwa_coefficients(basis.theta, xi);
    const double r = std::sqrt(2.0 * p.G * p.G + xi * xi);
    const std::array<double, 3> freq{1.0 - r, 1.0 + r, 1.0};
    // normal-mode order in the transform is ascending frequency: A, C, B
    basis.slot = {0, 2, 1};
    basis.transform.s = Mat6::Zero();
    for (Branch br : kBranches) {
        const int j = basis.slot[static_cast<int>(br)];
        const Pair3 pr = pair_from_coefficients<kModes>(coeff[static_cast<int>(br)]);
        basis.transform.s.row(2 * j) = pr.x;
        basis.transform.s.row(2 * j + 1) = pr.p;
        basis.transform.modes[j] = pr.annihilation();
        basis.transform.freqs[j] = freq[static_cast<int>(br)];
    }
    return basis;
}

namespace detail {

/// Symplectic overlap |i u Omega v^H| of two normalized mode rows, in [0, 1].
inline double mode_overlap(const ModeRow<kModes>& u, const ModeRow<kModes>& v) {
    const Eigen::Matrix<cplx, 2 * kModes, 2 * kModes> omega = symplectic_form<kModes>().cast<cplx>();
    return std::abs((cplx(0.0, 1.0) * u * omega * v.adjoint())(0, 0));
}

inline PolaritonBasis frequency_ordered(const EngineParams& p, double xi, const Bogoliubov3& t) {
    PolaritonBasis basis;
    basis.transform = t;
    basis.slot = {0, 2, 1};
    basis.theta = mixing_angle(p, xi);
    basis.xi = xi;
    return basis;
}

}  // namespace detail

/// Numerical polariton basis at a single xi, labels by frequency order.
inline PolaritonBasis polariton_basis(const EngineParams& p, double xi) {
    return detail::frequency_ordered(p, xi, bogoliubov_diagonalize(hamiltonian_matrix(p, xi)));
}

inline constexpr double kMinBranchOverlap = 0.9;

/// Numerical polariton bases along an ordered xi path. The first sample is
/// labeled by frequency order; later samples inherit labels from the
/// previous sample by maximal mode overlap.
inline std::vector<PolaritonBasis> exact_polariton_path(const EngineParams& p, std::span<const double> xi_samples) {
    std::vector<PolaritonBasis> path;
    path.reserve(xi_samples.size());
    for (const double xi : xi_samples) {
        const Bogoliubov3 t = bogoliubov_diagonalize(hamiltonian_matrix(p, xi));
        if (path.empty()) {
            path.push_back(detail::frequency_ordered(p, xi, t));
            continue;
        }
        const PolaritonBasis& prev = path.back();
        std::array<int, 3> perm{0, 1, 2};
        std::array<int, 3> best{};
        double best_min = -1.0, best_sum = -1.0;
        do {
            double mn = 2.0, sum = 0.0;
            for (Branch br : kBranches) {
                const double ov = detail::mode_overlap(prev.mode(br), t.modes[perm[static_cast<int>(br)]]);
                mn = std::min(mn, ov);
                sum += ov;
            }
            if (mn > best_min + 1e-12 || (std::abs(mn - best_min) <= 1e-12 && sum > best_sum)) {
                best_min = mn;
                best_sum = sum;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (best_min < kMinBranchOverlap)
            throw BranchTrackingError("branch overlap " + std::to_string(best_min) + " between xi=" +
                                      std::to_string(prev.xi) + " and xi=" + std::to_string(xi) +
                                      " is below 0.9; refine the xi grid");
        PolaritonBasis next;
        next.transform = t;
        next.slot = best;
        next.theta = mixing_angle(p, xi);
        next.xi = xi;
        path.push_back(next);
    }
    return path;
}

/// (n_A, n_B, n_C) of a state in the given basis.
inline std::array<double, 3> polariton_populations(const Cov3& state, const PolaritonBasis& basis) {
    return {mode_population(state, basis.pair(Branch::A)), mode_population(state, basis.pair(Branch::B)),
            mode_population(state, basis.pair(Branch::C))};
}

}  // namespace twinotto
