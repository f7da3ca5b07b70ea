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

// Quadrature-space Gaussian formalism for N bosonic modes.
//
// Conventions used throughout the library:
//   r = (x_1, p_1, ..., x_N, p_N),  x = (a + a^dag)/sqrt(2),  p = (a - a^dag)/(i sqrt(2))
//   [r_i, r_j] = i Omega_ij
//   sigma_ij = <{dr_i, dr_j}>            (vacuum -> identity)
//   H / hbar = 1/2 r^T M r + const       (Heisenberg: dr/dt = Omega M r)

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "twinotto/errors.hpp"

namespace twinotto {

using cplx = std::complex<double>;

template <int N>
using PhaseMatrix = Eigen::Matrix<double, 2 * N, 2 * N>;

template <int N>
using QuadVector = Eigen::Matrix<double, 2 * N, 1>;

template <int N>
using QuadRow = Eigen::Matrix<double, 1, 2 * N>;

template <int N>
using ModeRow = Eigen::Matrix<cplx, 1, 2 * N>;

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPhysicalityTol = 1e-8;
inline constexpr double kPopulationClamp = 1e-9;
inline constexpr double kCanonicalTol = 1e-9;

namespace detail {

template <class Mat>
double max_abs(const Mat& m) {
    return m.cwiseAbs().maxCoeff();
}

template <class Mat>
bool is_symmetric(const Mat& m, double tol) {
    return max_abs(m - m.transpose()) <= tol * std::max(1.0, max_abs(m));
}

}  // namespace detail

/// Block-diagonal symplectic form, one [[0,1],[-1,0]] block per mode.
template <int N>
PhaseMatrix<N> symplectic_form() {
    static_assert(N >= 1);
    PhaseMatrix<N> omega = PhaseMatrix<N>::Zero();
    for (int k = 0; k < N; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

inline Eigen::MatrixXd symplectic_form(int n_modes) {
    if (n_modes < 1) throw ValidationError("n_modes", "must be >= 1");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

/// Symmetric covariance matrix of the quadrature fluctuations.
template <int N>
class CovMatrix {
public:
    using Matrix = PhaseMatrix<N>;

    explicit CovMatrix(const Matrix& sigma) {
        if (!sigma.allFinite()) throw PhysicalityError("covariance matrix has non-finite entries");
        if (!detail::is_symmetric(sigma, kSymmetryTol))
            throw ValidationError("sigma", "covariance matrix is not symmetric");
        sigma_ = 0.5 * (sigma + sigma.transpose());
    }

    static CovMatrix vacuum() { return CovMatrix(Matrix::Identity()); }

    /// Product of thermal states with the given mean occupations.
    static CovMatrix thermal(const std::array<double, N>& nbar) {
        Matrix s = Matrix::Zero();
        for (int k = 0; k < N; ++k) s(2 * k, 2 * k) = s(2 * k + 1, 2 * k + 1) = 2.0 * nbar[k] + 1.0;
        return CovMatrix(s);
    }

    const Matrix& matrix() const noexcept { return sigma_; }
    double operator()(int i, int j) const { return sigma_(i, j); }

private:
    Matrix sigma_;
};

/// Real symmetric M with H/hbar = 1/2 r^T M r.
template <int N>
class HamiltonianMatrix {
public:
    using Matrix = PhaseMatrix<N>;

    explicit HamiltonianMatrix(const Matrix& m) {
        if (!detail::is_symmetric(m, kSymmetryTol))
            throw ValidationError("M", "Hamiltonian matrix is not symmetric");
        m_ = 0.5 * (m + m.transpose());
    }

    const Matrix& matrix() const noexcept { return m_; }

private:
    Matrix m_;
};

/// A canonical pair of quadrature rows (X, P) with X Omega P^T = 1.
template <int N>
struct ModePair {
    QuadRow<N> x;
    QuadRow<N> p;

    /// Row of the annihilation operator, A = (X + iP)/sqrt(2).
    ModeRow<N> annihilation() const {
        return (x.template cast<cplx>() + cplx(0.0, 1.0) * p.template cast<cplx>()) / std::sqrt(2.0);
    }
};

template <int N>
ModePair<N> bare_pair(int mode) {
    ModePair<N> pr{QuadRow<N>::Zero(), QuadRow<N>::Zero()};
    pr.x(2 * mode) = 1.0;
    pr.p(2 * mode + 1) = 1.0;
    return pr;
}

/// Builds the canonical pair for the operator A = sum_k coeff_k a_k with
/// real coefficients (number-conserving transforms).
template <int N>
ModePair<N> pair_from_coefficients(const std::array<double, N>& coeff) {
    ModePair<N> pr{QuadRow<N>::Zero(), QuadRow<N>::Zero()};
    for (int k = 0; k < N; ++k) {
        pr.x(2 * k) = coeff[k];
        pr.p(2 * k + 1) = coeff[k];
    }
    return pr;
}

template <int N>
double symplectic_product(const ModePair<N>& pr) {
    return pr.x * symplectic_form<N>() * pr.p.transpose();
}

template <int N>
void require_canonical(const ModePair<N>& pr) {
    const double sp = symplectic_product(pr);
    if (std::abs(sp - 1.0) > kCanonicalTol)
        throw NonCanonicalPairError("mode rows are not a canonical pair (X Omega P^T = " +
                                    std::to_string(sp) + ")");
}

/// Normal-mode decomposition of a quadratic Hamiltonian.
///
/// Rows (2j, 2j+1) of `s` are the (X_j, P_j) quadratures of mode j, so that
/// r' = s r. Frequencies are ascending and carry the Krein sign: a mode of an
/// indefinite but stable Hamiltonian may have a negative frequency.
template <int N>
struct BogoliubovResult {
    PhaseMatrix<N> s;
    std::array<double, N> freqs{};
    std::array<ModeRow<N>, N> modes;  // annihilation-operator rows, i*u*Omega*u^H = 1

    ModePair<N> pair(int j) const { return {s.row(2 * j), s.row(2 * j + 1)}; }

    /// Weight |alpha_k|^2 - |beta_k|^2 of bare mode k in normal mode j
    /// (A_j = sum alpha_k a_k + beta_k a_k^dag). Weights of a mode sum to 1.
    double bare_weight(int j, int k) const {
        const cplx ux = modes[j](2 * k), up = modes[j](2 * k + 1);
        const cplx i1(0.0, 1.0);
        const cplx alpha = (ux - i1 * up) / std::sqrt(2.0);
        const cplx beta = (ux + i1 * up) / std::sqrt(2.0);
        return std::norm(alpha) - std::norm(beta);
    }
};

/// Diagonalizes H = 1/2 r^T M r into N uncoupled oscillators.
///
/// Throws InstabilityError if Omega*M has an eigenvalue with
/// |Re| > 1e-9, or if it is not diagonalizable by a symplectic transform.
template <int N>
BogoliubovResult<N> bogoliubov_diagonalize(const HamiltonianMatrix<N>& ham) {
    constexpr int D = 2 * N;
    using CMat = Eigen::Matrix<cplx, D, D>;
    const PhaseMatrix<N> omega = symplectic_form<N>();
    const PhaseMatrix<N> dyn = omega * ham.matrix();
    const double scale = std::max(1.0, detail::max_abs(dyn));

    // Left eigenvectors u (u * dyn = lambda * u) describe operators u.r with
    // d/dt (u.r) = lambda (u.r).
    Eigen::EigenSolver<PhaseMatrix<N>> es(dyn.transpose());
    if (es.info() != Eigen::Success) throw InstabilityError("eigen-decomposition of Omega*M failed");
    const auto lambdas = es.eigenvalues();
    const CMat vecs = es.eigenvectors();

    for (int i = 0; i < D; ++i) {
        if (std::abs(lambdas(i).real()) > 1e-9 * scale)
            throw InstabilityError("Omega*M has eigenvalue with real part " +
                                   std::to_string(lambdas(i).real()) +
                                   "; linearized model is unstable here");
    }

    const CMat omega_c = omega.template cast<cplx>();
    const cplx i1(0.0, 1.0);

    struct Mode {
        double freq;
        ModeRow<N> row;
    };
    std::array<Mode, N> found;
    int n_found = 0;

    std::array<bool, D> used{};
    const double cluster_tol = 1e-7 * scale;
    for (int i = 0; i < D; ++i) {
        if (used[i]) continue;
        std::array<int, D> members{};
        int m = 0;
        for (int j = i; j < D; ++j) {
            if (!used[j] && std::abs(lambdas(j) - lambdas(i)) <= cluster_tol) {
                used[j] = true;
                members[m++] = j;
            }
        }
        Eigen::MatrixXcd u(m, D);
        for (int r = 0; r < m; ++r) u.row(r) = vecs.col(members[r]).transpose();
        const Eigen::MatrixXcd gram = i1 * u * omega_c * u.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ge(0.5 * (gram + gram.adjoint()));
        const double gscale = std::max(1e-300, ge.eigenvalues().cwiseAbs().maxCoeff());
        for (int r = 0; r < m; ++r) {
            const double mu = ge.eigenvalues()(r);
            if (std::abs(mu) <= 1e-8 * gscale)
                throw InstabilityError("Omega*M is not diagonalizable by a symplectic transform");
            if (mu < 0.0) continue;
            if (n_found == N) throw InstabilityError("inconsistent symplectic signature");
            ModeRow<N> row = (ge.eigenvectors().col(r).conjugate().transpose() * u) / std::sqrt(mu);
            found[n_found++] = {-lambdas(i).imag(), row};
        }
    }
    if (n_found != N) throw InstabilityError("inconsistent symplectic signature");

    std::sort(found.begin(), found.begin() + N,
              [](const Mode& a, const Mode& b) { return a.freq < b.freq; });

    BogoliubovResult<N> out;
    out.s = PhaseMatrix<N>::Zero();
    for (int j = 0; j < N; ++j) {
        ModeRow<N> row = found[j].row;
        // Phase convention: first component of (near) maximal magnitude is real positive.
        const double mx = row.cwiseAbs().maxCoeff();
        int pivot = 0;
        while (std::abs(row(pivot)) < mx * (1.0 - 1e-9)) ++pivot;
        row *= std::conj(row(pivot)) / std::abs(row(pivot));
        out.freqs[j] = found[j].freq;
        out.modes[j] = row;
        out.s.row(2 * j) = std::sqrt(2.0) * row.real();
        out.s.row(2 * j + 1) = std::sqrt(2.0) * row.imag();
    }
    return out;
}

/// S^{-T} M S^{-1}: the Hamiltonian matrix expressed in normal-mode quadratures.
template <int N>
PhaseMatrix<N> transformed_hamiltonian(const BogoliubovResult<N>& b, const HamiltonianMatrix<N>& ham) {
    const PhaseMatrix<N> omega = symplectic_form<N>();
    const PhaseMatrix<N> s_inv = -omega * b.s.transpose() * omega;
    return s_inv.transpose() * ham.matrix() * s_inv;
}

template <int N>
double symplectic_defect(const PhaseMatrix<N>& s) {
    const PhaseMatrix<N> omega = symplectic_form<N>();
    return detail::max_abs(s * omega * s.transpose() - omega);
}

struct StateCheck {
    bool physical;
    double min_eigenvalue;  // of sigma + i*Omega
};

template <int N>
StateCheck validate_state(const CovMatrix<N>& state) {
    using CMat = Eigen::Matrix<cplx, 2 * N, 2 * N>;
    const CMat h = state.matrix().template cast<cplx>() +
                   cplx(0.0, 1.0) * symplectic_form<N>().template cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    return {mn >= -kPhysicalityTol, mn};
}

namespace detail {

inline double clamp_population(double n) {
    if (n < -kPopulationClamp)
        throw PhysicalityError("negative mode population " + std::to_string(n));
    return std::max(n, 0.0);
}

}  // namespace detail

/// Mean occupation <A^dag A> of the mode spanned by a canonical pair.
template <int N>
double mode_population(const CovMatrix<N>& state, const ModePair<N>& pr) {
    require_canonical(pr);
    const double sxx = pr.x * state.matrix() * pr.x.transpose();
    const double spp = pr.p * state.matrix() * pr.p.transpose();
    return detail::clamp_population((sxx + spp - 2.0) / 4.0);
}

/// Second moments of two modes j, k of a zero-mean Gaussian state.
struct PairMoments {
    double n_j;
    double n_k;
    cplx jdag_k;  // <j^dag k>
    cplx j_k;     // <j k>
    cplx j_j;     // <j j>
    cplx k_k;     // <k k>
};

template <int N>
PairMoments pair_moments(const CovMatrix<N>& state, const ModePair<N>& pj, const ModePair<N>& pk) {
    require_canonical(pj);
    require_canonical(pk);
    using CMat = Eigen::Matrix<cplx, 2 * N, 2 * N>;
    // <r_i r_j> = (sigma + i Omega)_ij / 2
    const CMat c = 0.5 * (state.matrix().template cast<cplx>() +
                          cplx(0.0, 1.0) * symplectic_form<N>().template cast<cplx>());
    const ModeRow<N> a = pj.annihilation();
    const ModeRow<N> b = pk.annihilation();
    auto bil = [&](const ModeRow<N>& l, const ModeRow<N>& r) -> cplx { return (l * c * r.transpose())(0, 0); };
    PairMoments m{};
    m.n_j = detail::clamp_population(bil(a.conjugate(), a).real());
    m.n_k = detail::clamp_population(bil(b.conjugate(), b).real());
    m.jdag_k = bil(a.conjugate(), b);
    m.j_k = bil(a, b);
    m.j_j = bil(a, a);
    m.k_k = bil(b, b);
    return m;
}

struct NumberMoments {
    double var_j;
    double var_k;
    double cov_jk;
};

/// Var(n_j), Var(n_k), Cov(n_j, n_k) by Gaussian moment factorization:
///   Var(n)     = n^2 + n + |<a a>|^2
///   Cov(nj,nk) = |<j^dag k>|^2 + |<j k>|^2
template <int N>
NumberMoments number_moments(const CovMatrix<N>& state, const ModePair<N>& pj, const ModePair<N>& pk) {
    const PairMoments m = pair_moments(state, pj, pk);
    return {m.n_j * m.n_j + m.n_j + std::norm(m.j_j), m.n_k * m.n_k + m.n_k + std::norm(m.k_k),
            std::norm(m.jdag_k) + std::norm(m.j_k)};
}

template <int N>
double lyapunov_residual(const PhaseMatrix<N>& a, const PhaseMatrix<N>& d, const PhaseMatrix<N>& sigma) {
    return (a * sigma + sigma * a.transpose() + d).norm();
}

template <int N>
bool is_hurwitz(const PhaseMatrix<N>& a) {
    Eigen::EigenSolver<PhaseMatrix<N>> es(a, false);
    return es.eigenvalues().real().maxCoeff() < 0.0;
}

/// Solves A sigma + sigma A^T + D = 0 for symmetric sigma by a direct solve
/// on the n(n+1)/2 independent entries.
template <int N>
CovMatrix<N> lyapunov_steady_state(const PhaseMatrix<N>& a, const PhaseMatrix<N>& d) {
    constexpr int D = 2 * N;
    constexpr int K = D * (D + 1) / 2;
    if (!is_hurwitz<N>(a)) throw NotHurwitzError("drift matrix is not Hurwitz; no steady state");

    using Op = Eigen::Matrix<double, K, K>;
    using Vec = Eigen::Matrix<double, K, 1>;
    auto vech = [](const PhaseMatrix<N>& m) {
        Vec v;
        int idx = 0;
        for (int i = 0; i < D; ++i)
            for (int j = i; j < D; ++j) v(idx++) = m(i, j);
        return v;
    };
    auto unvech = [](const Vec& v) {
        PhaseMatrix<N> m;
        int idx = 0;
        for (int i = 0; i < D; ++i)
            for (int j = i; j < D; ++j) m(i, j) = m(j, i) = v(idx++);
        return m;
    };

    Op op;
    int col = 0;
    for (int i = 0; i < D; ++i) {
        for (int j = i; j < D; ++j) {
            PhaseMatrix<N> e = PhaseMatrix<N>::Zero();
            e(i, j) = e(j, i) = 1.0;
            op.col(col++) = vech(a * e + e * a.transpose());
        }
    }
    const Eigen::FullPivLU<Op> lu(op);
    Vec x = lu.solve(-vech(d));
    // one step of iterative refinement
    const PhaseMatrix<N> s0 = unvech(x);
    x += lu.solve(-vech(a * s0 + s0 * a.transpose() + d));
    CovMatrix<N> sigma(unvech(x));

    const StateCheck chk = validate_state(sigma);
    if (!chk.physical)
        throw PhysicalityError("Lyapunov steady state violates the uncertainty relation (min eig " +
                               std::to_string(chk.min_eigenvalue) + ")");
    return sigma;
}

}  // namespace twinotto
