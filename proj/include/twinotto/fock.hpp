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

// Truncated-Fock-space Lindblad oracle for the three-mode model.
//
//   d rho/dt = -i[H, rho] + sum_o kappa_o (nbar_o + 1) D[o] rho + kappa_o nbar_o D[o^dag] rho
//
// The Hamiltonian and every jump operator shift a conserved charge by a
// fixed amount (total excitation number under the RWA, its parity
// otherwise), so the steady state is block diagonal in charge sectors and is
// stored block by block. Large problems are solved as the fixed point
//   rho = (S + s)^{-1} (J + s) rho,   S X = i (K X - X K^dag),  J X = sum L X L^dag,
// with K = H - (i/2) sum L^dag L, by GMRES on (1 - T + P) rho = 1/d where P
// pins the trace. Small problems use a dense null-space solve.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>
#include <unsupported/Eigen/KroneckerProduct>

#include "twinotto/errors.hpp"
#include "twinotto/gaussian.hpp"
#include "twinotto/model.hpp"
#include "twinotto/polariton.hpp"

namespace twinotto {

using SparseC = Eigen::SparseMatrix<cplx>;

inline constexpr long kMaxFockDimension = 4096;
inline constexpr long kDenseLiouvilleLimit = 1000;
inline constexpr double kTruncationTailLimit = 1e-4;

struct FockConfig {
    EngineParams params;
    double xi = 0.0;
    std::array<int, kModes> n_max{6, 6, 6};  // 0 freezes a mode in its vacuum
    double kappa_scale = 1.0;                // uniform factor on every kappa

    long dimension() const {
        long d = 1;
        for (int n : n_max) d *= (n + 1);
        return d;
    }
};

inline void validate_fock_config(const FockConfig& cfg) {
    for (int k = 0; k < kModes; ++k)
        if (cfg.n_max[k] < 0) throw ValidationError("n_max", "truncation must be >= 0");
    if (!(cfg.kappa_scale > 0.0)) throw ValidationError("kappa_scale", "must be > 0");
    if (cfg.dimension() > kMaxFockDimension)
        throw DimensionCapError("Fock dimension " + std::to_string(cfg.dimension()) + " exceeds the cap of " +
                                std::to_string(kMaxFockDimension));
}

namespace detail {

inline SparseC sparse_identity(long n) {
    SparseC id(n, n);
    id.setIdentity();
    return id;
}

inline SparseC single_mode_lowering(int n_max) {
    SparseC a(n_max + 1, n_max + 1);
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 1; n <= n_max; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

struct FockOperators {
    std::array<SparseC, kModes> lower;  // a, b, c on the full space
    SparseC h;
    std::vector<SparseC> jumps;
    long dim = 0;
};

inline FockOperators fock_operators(const FockConfig& cfg) {
    validate_fock_config(cfg);
    FockOperators ops;
    ops.dim = cfg.dimension();
    for (int m = 0; m < kModes; ++m) {
        SparseC op = sparse_identity(1);
        for (int k = 0; k < kModes; ++k) {
            const SparseC f = k == m ? single_mode_lowering(cfg.n_max[k]) : sparse_identity(cfg.n_max[k] + 1);
            op = SparseC(Eigen::kroneckerProduct(op, f));
        }
        ops.lower[m] = op;
    }
    const EngineParams& p = cfg.params;
    const SparseC& a = ops.lower[kOptical];
    const SparseC& b = ops.lower[kMicrowave];
    const SparseC& c = ops.lower[kMechanical];
    const SparseC ad = a.adjoint(), bd = b.adjoint(), cd = c.adjoint();
    const Detunings det = detunings(p, cfg.xi);
    SparseC h = cd * c - det.delta_a * (ad * a) - det.delta_b * (bd * b);
    if (p.rwa) {
        h += p.G * (ad * c + a * cd) - p.G * (bd * c + b * cd);
    } else {
        const SparseC xc = c + cd;
        h += p.G * (SparseC(a + ad) * xc) - p.G * (SparseC(b + bd) * xc);
    }
    ops.h = h;
    const auto kap = p.kappas();
    const auto nb = p.nbars();
    for (int m = 0; m < kModes; ++m) {
        const double k = kap[m] * cfg.kappa_scale;
        ops.jumps.push_back(std::sqrt(k * (nb[m] + 1.0)) * ops.lower[m]);
        if (nb[m] > 0.0) ops.jumps.push_back(std::sqrt(k * nb[m]) * SparseC(ops.lower[m].adjoint()));
    }
    return ops;
}

inline SparseC vec_left(const SparseC& a, long d) { return Eigen::kroneckerProduct(sparse_identity(d), a); }
inline SparseC vec_right(const SparseC& b, long d) {
    return Eigen::kroneckerProduct(SparseC(b.transpose()), sparse_identity(d));
}

}  // namespace detail

/// Generator of d vec(rho)/dt for column-major vec.
inline SparseC build_liouvillian(const FockConfig& cfg) {
    const detail::FockOperators ops = detail::fock_operators(cfg);
    const long d = ops.dim;
    const cplx i1(0.0, 1.0);
    SparseC l = -i1 * (detail::vec_left(ops.h, d) - detail::vec_right(ops.h, d));
    for (const SparseC& jump : ops.jumps) {
        const SparseC ldl = jump.adjoint() * jump;
        l += SparseC(Eigen::kroneckerProduct(SparseC(jump.conjugate()), jump));
        l -= 0.5 * (detail::vec_left(ldl, d) + detail::vec_right(ldl, d));
    }
    l.makeCompressed();
    return l;
}

/// Block-diagonal density operator over conserved-charge sectors.
struct FockState {
    FockConfig config;
    long dim = 0;
    std::vector<std::vector<long>> sectors;  // basis indices per sector
    std::vector<Eigen::MatrixXcd> blocks;    // rho restricted to each sector
    std::vector<int> sector_of;              // basis index -> sector
    std::vector<long> position;              // basis index -> row within its sector
    double truncation_tail = 0.0;            // probability of any mode at its top level
    bool truncation_adequate = false;
    double min_eigenvalue = 0.0;
    double residual = 0.0;  // ||L rho|| / ||J rho||
    int iterations = 0;
    std::string method;

    /// tr(rho X) for an operator on the full space.
    cplx expect(const SparseC& x) const {
        cplx sum = 0.0;
        for (int col = 0; col < x.outerSize(); ++col)
            for (SparseC::InnerIterator it(x, col); it; ++it) {
                const long r = it.row(), c = it.col();
                if (sector_of[r] != sector_of[c]) continue;
                sum += blocks[sector_of[c]](position[c], position[r]) * it.value();
            }
        return sum;
    }

    Eigen::MatrixXcd dense() const {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t q = 0; q < sectors.size(); ++q)
            for (std::size_t i = 0; i < sectors[q].size(); ++i)
                for (std::size_t j = 0; j < sectors[q].size(); ++j)
                    rho(sectors[q][i], sectors[q][j]) = blocks[q](i, j);
        return rho;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (const auto& b : blocks) t += b.trace();
        return t;
    }
};

namespace detail {

inline std::array<int, kModes> fock_digits(const FockConfig& cfg, long idx) {
    std::array<int, kModes> n{};
    for (int k = kModes - 1; k >= 0; --k) {
        n[k] = static_cast<int>(idx % (cfg.n_max[k] + 1));
        idx /= (cfg.n_max[k] + 1);
    }
    return n;
}

inline void partition_sectors(const FockConfig& cfg, FockState& st) {
    st.dim = cfg.dimension();
    std::map<int, std::vector<long>> by_charge;
    for (long i = 0; i < st.dim; ++i) {
        const auto n = fock_digits(cfg, i);
        const int total = n[0] + n[1] + n[2];
        by_charge[cfg.params.rwa ? total : total % 2].push_back(i);
    }
    st.sector_of.assign(static_cast<std::size_t>(st.dim), 0);
    st.position.assign(static_cast<std::size_t>(st.dim), 0);
    for (auto& [q, idx] : by_charge) {
        const int s = static_cast<int>(st.sectors.size());
        for (std::size_t j = 0; j < idx.size(); ++j) {
            st.sector_of[idx[j]] = s;
            st.position[idx[j]] = static_cast<long>(j);
        }
        st.sectors.push_back(idx);
    }
}

inline SparseC restrict_operator(const SparseC& x, const std::vector<long>& rows, const std::vector<long>& cols,
                                 const FockState& st, int row_sector) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (SparseC::InnerIterator it(x, cols[j]); it; ++it)
            if (st.sector_of[it.row()] == row_sector) t.emplace_back(st.position[it.row()], j, it.value());
    SparseC out(static_cast<long>(rows.size()), static_cast<long>(cols.size()));
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

/// Sector-resolved fixed-point map rho -> T rho on concatenated block vectors.
class FockFixedPoint {
public:
    FockFixedPoint(const FockOperators& ops, const FockState& layout) : st_(layout) {
        const long nsec = static_cast<long>(st_.sectors.size());
        offset_.push_back(0);
        for (const auto& s : st_.sectors)
            offset_.push_back(offset_.back() + static_cast<long>(s.size() * s.size()));

        SparseC ldl_sum(ops.dim, ops.dim);
        double kappa_sum = 0.0;
        for (const SparseC& jump : ops.jumps) {
            ldl_sum += jump.adjoint() * jump;
            kappa_sum += jump.squaredNorm() / static_cast<double>(ops.dim);
        }
        shift_ = std::max(kappa_sum, 1e-12);
        const SparseC keff = ops.h - cplx(0.0, 0.5) * ldl_sum;

        for (long q = 0; q < nsec; ++q) {
            const auto& idx = st_.sectors[q];
            const Eigen::MatrixXcd kq = Eigen::MatrixXcd(restrict_operator(keff, idx, idx, st_, static_cast<int>(q)));
            keff_.push_back(kq);
            Eigen::ComplexSchur<Eigen::MatrixXcd> schur(cplx(0.0, 1.0) * kq);
            unitary_.push_back(schur.matrixU());
            Eigen::MatrixXcd r = schur.matrixT();
            r.diagonal().array() += 0.5 * shift_;
            tri_.push_back(r);
        }
        for (const SparseC& jump : ops.jumps) {
            for (long q = 0; q < nsec; ++q) {
                // every basis state of sector q is sent to the same target sector
                int target = -1;
                for (long col : st_.sectors[q]) {
                    SparseC::InnerIterator it(jump, col);
                    if (it) {
                        target = st_.sector_of[it.row()];
                        break;
                    }
                }
                if (target < 0) continue;
                jumps_.push_back({static_cast<int>(q), target,
                                  restrict_operator(jump, st_.sectors[target], st_.sectors[q], st_, target)});
            }
        }
    }

    long size() const { return offset_.back(); }
    double shift() const { return shift_; }

    Eigen::Map<const Eigen::MatrixXcd> block(const Eigen::VectorXcd& v, long q) const {
        const long m = static_cast<long>(st_.sectors[q].size());
        return {v.data() + offset_[q], m, m};
    }
    Eigen::Map<Eigen::MatrixXcd> block(Eigen::VectorXcd& v, long q) const {
        const long m = static_cast<long>(st_.sectors[q].size());
        return {v.data() + offset_[q], m, m};
    }

    /// J rho on the block vector.
    Eigen::VectorXcd jump_map(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(size());
        for (const auto& j : jumps_) block(out, j.dst) += j.op * block(v, j.src) * j.op.adjoint();
        return out;
    }

    /// S rho on the block vector.
    Eigen::VectorXcd coherent_map(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd out(size());
        const cplx i1(0.0, 1.0);
        for (long q = 0; q < static_cast<long>(keff_.size()); ++q)
            block(out, q) = i1 * (keff_[q] * block(v, q) - block(v, q) * keff_[q].adjoint());
        return out;
    }

    Eigen::VectorXcd apply_t(const Eigen::VectorXcd& v) const {
        Eigen::VectorXcd y = jump_map(v) + shift_ * v;
        for (long q = 0; q < static_cast<long>(tri_.size()); ++q) {
            const Eigen::MatrixXcd& u = unitary_[q];
            const Eigen::MatrixXcd& r = tri_[q];
            Eigen::MatrixXcd yt = u.adjoint() * block(y, q) * u;
            const long m = r.rows();
            // R X + X R^dag = Y, columns from last to first
            for (long j = m - 1; j >= 0; --j) {
                Eigen::VectorXcd rhs = yt.col(j);
                for (long k = j + 1; k < m; ++k) rhs -= std::conj(r(j, k)) * yt.col(k);
                Eigen::MatrixXcd lhs = r;
                lhs.diagonal().array() += std::conj(r(j, j));
                yt.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
            }
            block(y, q) = u * yt * u.adjoint();
        }
        return y;
    }

    cplx trace(const Eigen::VectorXcd& v) const {
        cplx t = 0.0;
        for (long q = 0; q < static_cast<long>(tri_.size()); ++q) t += block(v, q).trace();
        return t;
    }

    Eigen::VectorXcd identity_over_d() const {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size());
        for (long q = 0; q < static_cast<long>(tri_.size()); ++q)
            block(v, q).diagonal().setConstant(1.0 / static_cast<double>(st_.dim));
        return v;
    }

    /// (1 - T + P) v.
    Eigen::VectorXcd apply_system(const Eigen::VectorXcd& v) const {
        return v - apply_t(v) + trace(v) * identity_over_d();
    }

private:
    struct JumpBlock {
        int src;
        int dst;
        SparseC op;
    };
    const FockState& st_;
    std::vector<long> offset_;
    std::vector<Eigen::MatrixXcd> keff_, unitary_, tri_;
    std::vector<JumpBlock> jumps_;
    double shift_ = 0.0;
};

/// Matrix-free adaptor so Eigen's GMRES can drive FockFixedPoint.
class FockSystemOp;

}  // namespace detail
}  // namespace twinotto

namespace Eigen::internal {
template <>
struct traits<twinotto::detail::FockSystemOp> : public traits<Eigen::SparseMatrix<std::complex<double>>> {};
}  // namespace Eigen::internal

namespace twinotto::detail {

class FockSystemOp : public Eigen::EigenBase<FockSystemOp> {
public:
    using Scalar = cplx;
    using RealScalar = double;
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

    explicit FockSystemOp(const FockFixedPoint& fp) : fp_(&fp) {}
    Eigen::Index rows() const { return fp_->size(); }
    Eigen::Index cols() const { return fp_->size(); }

    template <class Rhs>
    Eigen::Product<FockSystemOp, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
        return Eigen::Product<FockSystemOp, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
    }

    const FockFixedPoint& fixed_point() const { return *fp_; }

private:
    const FockFixedPoint* fp_;
};

}  // namespace twinotto::detail

namespace Eigen::internal {
template <class Rhs>
struct generic_product_impl<twinotto::detail::FockSystemOp, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<twinotto::detail::FockSystemOp, Rhs,
                                generic_product_impl<twinotto::detail::FockSystemOp, Rhs>> {
    using Scalar = typename Product<twinotto::detail::FockSystemOp, Rhs>::Scalar;

    template <class Dest>
    static void scaleAndAddTo(Dest& dst, const twinotto::detail::FockSystemOp& lhs, const Rhs& rhs,
                              const Scalar& alpha) {
        dst.noalias() += alpha * lhs.fixed_point().apply_system(Eigen::VectorXcd(rhs));
    }
};
}  // namespace Eigen::internal

namespace twinotto {

namespace detail {

inline void finalize_state(FockState& st) {
    const cplx tr = st.trace();
    if (!(std::abs(tr) > 0.0)) throw NumericalError("steady state has zero trace");
    st.min_eigenvalue = 1.0;
    for (auto& b : st.blocks) {
        b = 0.5 * (b + b.adjoint()) / tr.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b, Eigen::EigenvaluesOnly);
        st.min_eigenvalue = std::min(st.min_eigenvalue, es.eigenvalues().minCoeff());
    }
    if (st.min_eigenvalue < -1e-9)
        throw PhysicalityError("Fock steady state has eigenvalue " + std::to_string(st.min_eigenvalue));
    double tail = 0.0;
    for (long i = 0; i < st.dim; ++i) {
        const auto n = fock_digits(st.config, i);
        bool top = false;
        for (int k = 0; k < kModes; ++k) top = top || (st.config.n_max[k] > 0 && n[k] == st.config.n_max[k]);
        if (top) tail += st.blocks[st.sector_of[i]](st.position[i], st.position[i]).real();
    }
    st.truncation_tail = tail;
    st.truncation_adequate = tail < kTruncationTailLimit;
}

}  // namespace detail

/// Unique steady state of the truncated master equation.
inline FockState fock_steady_state(const FockConfig& cfg) {
    const detail::FockOperators ops = detail::fock_operators(cfg);
    FockState st;
    st.config = cfg;
    detail::partition_sectors(cfg, st);
    const long d = ops.dim;

    if (d * d <= kDenseLiouvilleLimit) {
        const Eigen::MatrixXcd l = Eigen::MatrixXcd(build_liouvillian(cfg));
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(l);
        lu.setThreshold(1e-10);
        const long kernel = lu.dimensionOfKernel();
        if (kernel > 1)
            throw DegenerateNullspaceError("Liouvillian has a " + std::to_string(kernel) +
                                           "-dimensional null space; steady state is not unique");
        if (kernel == 0) throw NumericalError("Liouvillian has no numerical null vector");
        const Eigen::VectorXcd v = lu.kernel().col(0);
        const Eigen::Map<const Eigen::MatrixXcd> rho(v.data(), d, d);
        for (const auto& idx : st.sectors) {
            Eigen::MatrixXcd b(idx.size(), idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = rho(idx[i], idx[j]);
            st.blocks.push_back(b);
        }
        st.residual = (l * v).norm() / std::max(1e-300, v.norm());
        st.method = "dense";
        detail::finalize_state(st);
        return st;
    }

    const detail::FockFixedPoint fp(ops, st);
    const detail::FockSystemOp op(fp);
    Eigen::GMRES<detail::FockSystemOp, Eigen::IdentityPreconditioner> gmres;
    gmres.compute(op);
    gmres.set_restart(100);
    gmres.setTolerance(1e-12);
    gmres.setMaxIterations(4000);
    const Eigen::VectorXcd b = fp.identity_over_d();
    Eigen::VectorXcd x = gmres.solve(b);
    st.iterations = static_cast<int>(gmres.iterations());
    if (gmres.info() != Eigen::Success)
        throw DegenerateNullspaceError("GMRES did not converge (error " + std::to_string(gmres.error()) +
                                       "); the steady state may not be unique");
    x /= fp.trace(x);
    const Eigen::VectorXcd jx = fp.jump_map(x);
    st.residual = (jx - fp.coherent_map(x)).norm() / std::max(1e-300, jx.norm());
    for (long q = 0; q < static_cast<long>(st.sectors.size()); ++q) st.blocks.push_back(fp.block(x, q));
    st.method = "gmres";
    detail::finalize_state(st);
    if (st.residual > 1e-8)
        throw NumericalError("Fock steady state residual " + std::to_string(st.residual) + " is too large");
    return st;
}

enum class FockBasis { bare, rwa_polariton };

struct FockObservables {
    std::array<double, 3> n{};                    // (a, b, c) or (A, B, C)
    std::array<std::array<double, 3>, 3> cov{};   // Cov(n_j, n_k); diagonal = variances
};

/// Populations and number covariances by direct operator expectation.
/// The polariton basis uses the analytic RWA coefficients at config.xi.
inline FockObservables fock_observables(const FockState& st, FockBasis basis) {
    const detail::FockOperators ops = detail::fock_operators(st.config);
    std::array<SparseC, 3> modes = ops.lower;
    if (basis == FockBasis::rwa_polariton) {
        const double theta = mixing_angle(st.config.params, st.config.xi);
        const auto coeff = rwa_coefficients(theta, st.config.xi);
        for (int j = 0; j < 3; ++j)
            modes[j] = coeff[j][0] * ops.lower[0] + coeff[j][1] * ops.lower[1] + coeff[j][2] * ops.lower[2];
    }
    std::array<SparseC, 3> num;
    for (int j = 0; j < 3; ++j) num[j] = SparseC(modes[j].adjoint()) * modes[j];
    FockObservables out;
    for (int j = 0; j < 3; ++j) out.n[j] = st.expect(num[j]).real();
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k) {
            const SparseC sym = 0.5 * (SparseC(num[j] * num[k]) + SparseC(num[k] * num[j]));
            out.cov[j][k] = out.cov[k][j] = st.expect(sym).real() - out.n[j] * out.n[k];
        }
    return out;
}

/// Scales every kappa of a parameter set (used to match oracle runs).
inline EngineParams scaled_kappas(EngineParams p, double factor) {
    p.kappa_a *= factor;
    p.kappa_b *= factor;
    p.kappa_c *= factor;
    return p;
}

}  // namespace twinotto
