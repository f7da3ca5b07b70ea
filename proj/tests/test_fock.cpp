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

#include "twinotto/fock.hpp"
#include "twinotto/thermo.hpp"

using namespace twinotto;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double truncated_geometric_mean(double nbar, int n_max) {
    const double q = nbar / (nbar + 1.0);
    double z = 0.0, m = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        z += std::pow(q, n);
        m += n * std::pow(q, n);
    }
    return m / z;
}

FockConfig oracle_config(double xi, std::array<int, 3> n_max, double nbar_c = 0.4) {
    FockConfig cfg;
    cfg.params.nbar_c = nbar_c;
    cfg.xi = xi;
    cfg.n_max = n_max;
    cfg.kappa_scale = 100.0;
    return cfg;
}

Cov3 gaussian_reference(const FockConfig& cfg) {
    const DriftDiffusion dd = drift_diffusion(scaled_kappas(cfg.params, cfg.kappa_scale), cfg.xi);
    return lyapunov_steady_state<kModes>(dd.a, dd.d);
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

}  // namespace

TEST_CASE("single damped mode relaxes to a truncated thermal state", "[fock]") {
    FockConfig cfg;
    cfg.n_max = {8, 0, 0};
    cfg.params.nbar_a = 0.0;
    FockState vac = fock_steady_state(cfg);
    CHECK(vac.method == "dense");
    CHECK_THAT(vac.dense()(0, 0).real(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(fock_observables(vac, FockBasis::bare).n[kOptical], WithinAbs(0.0, 1e-12));

    cfg.params.nbar_a = 0.1;
    const FockState th = fock_steady_state(cfg);
    const Eigen::MatrixXcd rho = th.dense();
    for (int n = 0; n < 8; ++n) CHECK_THAT(rho(n + 1, n + 1).real() / rho(n, n).real(), WithinRel(0.1 / 1.1, 1e-9));
    CHECK_THAT(fock_observables(th, FockBasis::bare).n[kOptical], WithinRel(truncated_geometric_mean(0.1, 8), 1e-9));
    CHECK_THAT(th.trace().real(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("Liouvillian annihilates the trace", "[fock]") {
    for (bool rwa : {true, false}) {
        FockConfig cfg;
        cfg.params.rwa = rwa;
        cfg.params.nbar_a = 0.02;
        cfg.xi = 0.3;
        cfg.n_max = {2, 2, 2};
        const SparseC l = build_liouvillian(cfg);
        const long d = cfg.dimension();
        Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(d * d);
        for (long i = 0; i < d; ++i) tr(i * (d + 1)) = 1.0;
        CHECK((tr * l).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("Fock dimension cap and validation", "[fock]") {
    FockConfig cfg;
    cfg.n_max = {16, 16, 16};
    CHECK_THROWS_AS(fock_steady_state(cfg), DimensionCapError);
    cfg.n_max = {2, -1, 2};
    CHECK_THROWS_AS(fock_steady_state(cfg), ValidationError);
    cfg.n_max = {2, 2, 2};
    cfg.kappa_scale = 0.0;
    CHECK_THROWS_AS(fock_steady_state(cfg), ValidationError);
}

TEST_CASE("uncoupled modes give a product of truncated thermal states", "[fock]") {
    for (std::array<int, 3> nm : {std::array<int, 3>{2, 2, 2}, std::array<int, 3>{3, 3, 3}}) {
        FockConfig cfg;
        cfg.params.G = 0.0;
        cfg.params.nbar_a = 0.05;
        cfg.n_max = nm;
        const FockState st = fock_steady_state(cfg);
        INFO(st.method);
        const FockObservables o = fock_observables(st, FockBasis::bare);
        const auto nb = cfg.params.nbars();
        for (int m = 0; m < 3; ++m) CHECK_THAT(o.n[m], WithinRel(truncated_geometric_mean(nb[m], nm[m]), 1e-8));
        CHECK_THAT(o.cov[0][1], WithinAbs(0.0, 1e-10));
        CHECK_THAT(o.cov[1][2], WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("iterative steady state solves the full Liouvillian", "[fock]") {
    FockConfig cfg = oracle_config(-0.1, {3, 3, 3});
    const FockState st = fock_steady_state(cfg);
    CHECK(st.method == "gmres");
    const Eigen::VectorXcd v = vectorize(st.dense());
    const SparseC l = build_liouvillian(cfg);
    CHECK((l * v).norm() <= 1e-8 * cfg.kappa_scale * 1e-4 * v.norm() + 1e-14);
    CHECK_THAT(st.trace().real(), WithinAbs(1.0, 1e-12));
    CHECK(st.dense().isApprox(st.dense().adjoint(), 1e-12));
}

TEST_CASE("Fock and Gaussian steady states agree", "[fock][oracle]") {
    for (double xi : {-0.1, 1.0}) {
        const FockConfig cfg = oracle_config(xi, {6, 6, 6}, 0.1);
        const FockState st = fock_steady_state(cfg);
        CHECK(st.truncation_adequate);
        const FockObservables o = fock_observables(st, FockBasis::bare);
        const auto g = bare_populations(gaussian_reference(cfg));
        for (int m = 0; m < 3; ++m) {
            INFO("xi=" << xi << " mode " << m);
            CHECK_THAT(o.n[m], WithinRel(g[m], 1e-2));
        }
        CHECK(st.min_eigenvalue >= -1e-9);
    }
}

TEST_CASE("truncation error shrinks with the cutoff", "[fock][oracle]") {
    const FockState s4 = fock_steady_state(oracle_config(-0.1, {4, 4, 4}));
    const FockState s6 = fock_steady_state(oracle_config(-0.1, {6, 6, 6}));
    CHECK(s6.truncation_tail < s4.truncation_tail);
    const auto g = bare_populations(gaussian_reference(oracle_config(-0.1, {6, 6, 6})));
    const auto n4 = fock_observables(s4, FockBasis::bare).n;
    const auto n6 = fock_observables(s6, FockBasis::bare).n;
    for (int m = 0; m < 3; ++m) CHECK(std::abs(n6[m] - g[m]) <= std::abs(n4[m] - g[m]));
}

TEST_CASE("polariton number covariance matches the Gaussian prediction", "[fock][oracle][slow]") {
    const FockConfig c6 = oracle_config(-0.1, {6, 6, 6});
    const double gauss =
        steady_state_polariton(scaled_kappas(c6.params, c6.kappa_scale), c6.xi, SteadyMode::quantum).cov_AB;
    REQUIRE(gauss != 0.0);
    const FockObservables o6 = fock_observables(fock_steady_state(c6), FockBasis::rwa_polariton);
    CHECK(std::signbit(o6.cov[0][1]) == std::signbit(gauss));
    const FockObservables o10 =
        fock_observables(fock_steady_state(oracle_config(-0.1, {10, 10, 10})), FockBasis::rwa_polariton);
    CHECK_THAT(o10.cov[0][1], WithinRel(gauss, 5e-2));
}

TEST_CASE("vacuum has no polariton excitations", "[fock]") {
    FockConfig cfg;
    cfg.params.nbar_a = cfg.params.nbar_b = cfg.params.nbar_c = 0.0;
    cfg.xi = 0.0;
    cfg.n_max = {2, 2, 2};
    const FockObservables o = fock_observables(fock_steady_state(cfg), FockBasis::rwa_polariton);
    for (double n : o.n) CHECK_THAT(n, WithinAbs(0.0, 1e-12));
}

TEST_CASE("exact-model steady state respects parity", "[fock]") {
    FockConfig cfg = oracle_config(0.2, {2, 2, 2}, 0.1);
    cfg.params.rwa = false;
    const FockState st = fock_steady_state(cfg);
    CHECK(st.sectors.size() == 2u);
    CHECK(st.min_eigenvalue >= -1e-9);
    CHECK_THAT(st.trace().real(), WithinAbs(1.0, 1e-12));
    cfg.params.rwa = true;
    CHECK(fock_steady_state(cfg).sectors.size() == 7u);
}

TEST_CASE("master-equation evolution preserves trace and hermiticity", "[fock][property]") {
    FockConfig cfg = oracle_config(0.2, {2, 2, 2}, 0.2);
    const long d = cfg.dimension();
    const SparseC l = build_liouvillian(cfg);
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(d, d);
    rho0(d - 1, d - 1) = 0.5;  // |2,2,2>
    rho0(1, 1) = 0.5;          // |0,0,1>
    rho0(1, d - 1) = rho0(d - 1, 1) = 0.25;
    Eigen::VectorXcd v = vectorize(rho0);
    const double h = 0.05;
    for (int i = 0; i < 400; ++i) {
        const Eigen::VectorXcd k1 = l * v;
        const Eigen::VectorXcd k2 = l * (v + 0.5 * h * k1);
        const Eigen::VectorXcd k3 = l * (v + 0.5 * h * k2);
        const Eigen::VectorXcd k4 = l * (v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const Eigen::Map<const Eigen::MatrixXcd> rho(v.data(), d, d);
    CHECK_THAT(rho.trace().real(), WithinAbs(1.0, 1e-12));
    CHECK(std::abs(rho.trace().imag()) <= 1e-12);
    CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}
