// Copyright 2026 The qtem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <doctest.h>
#include <numbers>
#include <random>

#include "qtem/cavity.hpp"
#include "qtem/circuits/flux_solver.hpp"
#include "qtem/circuits/hamiltonian.hpp"
#include "qtem/circuits/netlist.hpp"
#include "qtem/circuits/potential.hpp"
#include "qtem/cli.hpp"
#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

using namespace qtem;
using namespace qtem::cavity;

namespace {

const auto &K = physcore::constants();

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd &h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return v;
}

/// Spectrum of the truncated RWA Hamiltonian from its 2x2 excitation blocks.
std::vector<double> jch_closed_form(const JchSystem &s) {
    const double wr = K.hbar * s.omega_r, wq = K.hbar * s.omega_q;
    std::vector<double> e{0.0};
    for (int n = 0; n < s.n_max; ++n) {
        const double a = wr * (n + 1), b = wr * n + wq;
        const double r = std::sqrt(0.25 * (a - b) * (a - b) + s.g * s.g * (n + 1));
        e.push_back(0.5 * (a + b) - r);
        e.push_back(0.5 * (a + b) + r);
    }
    e.push_back(wr * s.n_max + wq);
    std::sort(e.begin(), e.end());
    return e;
}

JchSystem scaled(double lambda, int n_max) {
    // hbar omega_r = 1 J, hbar omega_q = 1.2 J.
    return JchSystem::from_lambda(1 / K.hbar, 1.2 / K.hbar, lambda, n_max);
}

}  // namespace

TEST_CASE("operators") {
    const auto a = annihilation(4);
    CHECK(a.rows() == 5);
    for (int n = 1; n <= 4; ++n) CHECK(a(n - 1, n) == doctest::Approx(std::sqrt(n)));
    const auto s = sigma_lowering();
    CHECK(s(0, 1) == 1);
    CHECK(s.sum() == 1);
    CHECK(basis_index(3, 1) == 7);
}

TEST_CASE("RWA Hamiltonian matches the block closed form") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> wq(0.5, 2.0), g(0.0, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
        JchSystem s;
        s.omega_r = 1 / K.hbar;
        s.omega_q = wq(gen) / K.hbar;
        s.g = g(gen);
        s.n_max = 12;
        const auto num = sorted_eigenvalues(build_jch(s, true));
        const auto ref = jch_closed_form(s);
        REQUIRE(num.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(num[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("RWA conserves the excitation number, the full model does not") {
    JchSystem s = scaled(0.05, 6);
    const auto n = excitation_number(s.n_max);
    const Eigen::MatrixXd rwa = build_jch(s, true), full = build_jch(s, false);
    CHECK((rwa * n - n * rwa).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((full * n - n * full).cwiseAbs().maxCoeff() > 1e-3);
    CHECK((full - full.transpose()).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("effective Hamiltonian is diagonal with the dispersive shifts") {
    const JchSystem s = scaled(0.01, 10);
    const auto h = build_effective(s);
    CHECK((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0);
    const double l2d = 0.01 * 0.01 * s.delta();
    // |n, 1> sits at n + 1.2 + lambda^2 Delta (n + 1).
    for (int n = 0; n < 10; ++n) {
        CHECK(h(basis_index(n, 1), basis_index(n, 1)) == doctest::Approx(n + 1.2 + l2d * (n + 1)).epsilon(1e-14));
    }
}

TEST_CASE("shift per photon") {
    for (double lambda : {1e-3, 1e-2, 5e-2}) {
        const auto r = dispersive_transform(scaled(lambda, 8));
        const double expect = 2 * lambda * lambda * r.delta;
        CHECK(r.qubit_shift_per_photon == doctest::Approx(expect).epsilon(1e-14));
        // Read off as a difference of level energies near 2.2 J.
        const double roundoff = 8 * std::numeric_limits<double>::epsilon() * 2.2 / expect;
        CHECK(std::abs(r.measured_shift_per_photon / expect - 1) < roundoff);
        CHECK(r.resonator_pull == doctest::Approx(expect).epsilon(1e-14));
        CHECK(r.lamb_shift == doctest::Approx(expect / 2).epsilon(1e-14));
    }
}

TEST_CASE("residual scaling") {
    const std::vector<double> lambdas{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    const auto pts = dispersive_sweep(scaled(0, 8), lambdas);
    std::vector<double> eig, op;
    for (const auto &p : pts) {
        eig.push_back(p.max_residual);
        op.push_back(p.max_transform_residual);
    }
    // Eigenvalue residual is fourth order; the operator residual is third order.
    CHECK(loglog_slope(lambdas, eig) == doctest::Approx(4).epsilon(0.05));
    CHECK(loglog_slope(lambdas, op) == doctest::Approx(3).epsilon(0.05));
}

TEST_CASE("leading eigenvalue residual") {
    const double lambda = 1e-3;
    const auto r = dispersive_transform(scaled(lambda, 8));
    for (const auto &b : r.blocks) {
        const double lead = std::pow(lambda, 4) * r.delta * (b.n + 1) * (b.n + 1);
        CHECK(b.residual == doctest::Approx(lead).epsilon(1e-2));
    }
}

TEST_CASE("loglog slope") {
    CHECK(loglog_slope({1, 10, 100}, {2, 2000, 2e6}) == doctest::Approx(3).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), ValidationError);
}

TEST_CASE("dispersive guard and resonance") {
    CHECK_THROWS_AS(dispersive_transform(scaled(0.2, 20)), ValidationError);
    CHECK_NOTHROW(dispersive_transform(scaled(0.1, 8)));
    JchSystem s;
    s.omega_r = s.omega_q = 1e10;
    s.g = 1e-25;
    CHECK_THROWS_AS(s.lambda(), ValidationError);
    CHECK_THROWS_AS(JchSystem::from_lambda(1e10, 1e10, 0.01, 10), ValidationError);
}

TEST_CASE("resonator parameters") {
    const auto r = ResonatorParams::from_frequency(5e9, 50);
    CHECK(r.omega() == doctest::Approx(2 * std::numbers::pi * 5e9).epsilon(1e-14));
    CHECK(r.impedance() == doctest::Approx(50).epsilon(1e-14));
    CHECK(r.phi_zpf() == doctest::Approx(std::sqrt(K.hbar * 50 / 2)).epsilon(1e-14));
    auto e = r;
    e.effective_inductance = 4 * r.inductance;
    CHECK(e.phi_zpf() == doctest::Approx(2 * r.phi_zpf()).epsilon(1e-14));
    CHECK_THROWS_AS(ResonatorParams::from_frequency(-1, 50), ValidationError);
}

TEST_CASE("coupling extraction") {
    using namespace circuits;
    const double ej = josephson_energy_for_bistability(1e-9, 3);
    const std::string net = "L Lq 1 0 1nH\nJJ J1 1 0 " + cli::format_double(ej) + " 2e-15\nL Lb 2 0 1nH\nK M Lq Lb 10nH\nFB F Lb 5phi0\n";
    const auto spec = reduce_flux_bias(build_hamiltonian(parse_netlist(net)));
    SolverOptions o;
    o.n_levels = 2;
    const auto sp = solve_flux_spectrum(spec, o);
    const auto res = ResonatorParams::from_frequency(5e9, 50);
    const auto s = extract_jch_params(res, sp, 50e-9, 10);
    CHECK(s.omega_q == doctest::Approx((sp.energies[1] - sp.energies[0]) / K.hbar).epsilon(1e-14));
    CHECK(s.g == doctest::Approx(res.phi_zpf() * flux_matrix_element(sp).off_diagonal / 50e-9).epsilon(1e-14));
    CHECK(s.n_max == 10);
}

TEST_CASE("conditional cavity state") {
    const auto vac = conditional_cavity_state(0, 20);
    CHECK(vac.amplitudes(basis_index(0, 0)) == doctest::Approx(M_SQRT1_2));
    CHECK(vac.amplitudes(basis_index(0, 1)) == doctest::Approx(M_SQRT1_2));
    for (double n_bar : {0.5, 4.0, 25.0, 100.0}) {
        const auto s = conditional_cavity_state(n_bar, default_fock_cutoff(n_bar));
        CHECK(std::abs(s.norm() - 1) < 1e-12);
        CHECK(s.branch_mean() == doctest::Approx(n_bar).epsilon(1e-8));
        CHECK(s.branch_variance() == doctest::Approx(n_bar).epsilon(1e-6));
        CHECK(s.truncated_mass <= 1e-8);
    }
    CHECK_THROWS_AS(conditional_cavity_state(100, 20), ValidationError);
    CHECK(default_fock_cutoff(0) == 20);
    CHECK(default_fock_cutoff(100) == 201);
}

TEST_CASE("operating regime") {
    const auto r = regime_check(0.02, 2 * std::numbers::pi * 5e9);
    CHECK(r.thermal_uev == doctest::Approx(1.7235).epsilon(1e-4));
    CHECK(r.photon_uev == doctest::Approx(20.678).epsilon(1e-4));
    CHECK(r.gap_uev == doctest::Approx(170));
    CHECK(r.kt_ok);
    CHECK(r.gap_ok);
    CHECK_FALSE(regime_check(1.0, 2 * std::numbers::pi * 5e9).kt_ok);
    CHECK_FALSE(regime_check(0.02, 2 * std::numbers::pi * 50e9).gap_ok);
}
