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
#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>

#include "qtem/circuits/flux_solver.hpp"
#include "qtem/circuits/hamiltonian.hpp"
#include "qtem/circuits/netlist.hpp"
#include "qtem/circuits/potential.hpp"
#include "qtem/cli.hpp"
#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

using namespace qtem;
using namespace qtem::circuits;

namespace {

const auto &K = physcore::constants();

HamiltonianSpec spec_from(const std::string &text) {
    return build_hamiltonian(parse_netlist(text));
}

std::string lc_netlist(double l, double c) {
    return "L Lr 1 0 " + cli::format_double(l) + "\nC Cr 1 0 " + cli::format_double(c) + "\n";
}

/// rf-SQUID held at half flux by a coupled persistent-current loop.
std::string flux_qubit_netlist(double beta, double c) {
    const double l = 1e-9;
    const double ej = josephson_energy_for_bistability(l, beta);
    return "L Lq 1 0 1nH\nJJ J1 1 0 " + cli::format_double(ej) + " " + cli::format_double(c) +
           "\nL Lb 2 0 1nH\nK M Lq Lb 10nH\nFB F Lb 5phi0\n";
}

HamiltonianSpec half_flux_spec(double beta, double c) {
    FluxBiasReduction r;
    r.require_half_flux = true;
    return reduce_flux_bias(spec_from(flux_qubit_netlist(beta, c)), r);
}

/// Lowest eigenvalues of the 2nd-order hard-wall discretization, dense tridiagonal.
Eigen::VectorXd tridiagonal_levels(const HamiltonianSpec &spec, double lo, double hi, int n) {
    const double h = (hi - lo) / (n - 1);
    const int m = n - 2;  // interior points
    const double es = K.hbar * K.hbar / (2 * spec.capacitance() * h * h);
    Eigen::VectorXd diag(m), sub(m - 1);
    for (int i = 0; i < m; ++i) diag(i) = 2 * es + spec.potential(lo + (i + 1) * h);
    sub.setConstant(-es);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

TEST_CASE("netlist parsing") {
    const auto net = parse_netlist("# comment\nL  Lr 1 0 1nH   # inline\n\nC Cr 1 gnd 1e-12\n");
    REQUIRE(net.elements.size() == 2);
    CHECK(net.elements[0].kind == ElementKind::Inductor);
    CHECK(net.elements[0].value == doctest::Approx(1e-9).epsilon(1e-15));
    CHECK(net.elements[1].value == 1e-12);
    CHECK(net.topology.loops.size() == 1);
}

TEST_CASE("netlist errors carry the line") {
    auto line_of = [](const std::string &text) {
        try {
            parse_netlist(text);
        } catch (const NetlistError &e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("L Lr 1 0 1nH\nR R1 1 0 50\n") == 2);
    CHECK(line_of("L Lr 1 0 1nH\nC Cr 1 0\n") == 2);
    CHECK(line_of("L Lr 1 0 1nF\nC Cr 1 0 1pF\n") == 1);
    CHECK(line_of("L Lr 1 0 1nH\nC Lr 1 0 1pF\n") == 2);
    CHECK(line_of("C Cr 1 0 -1pF\nL Lr 1 0 1nH\n") == 1);
    CHECK_THROWS_AS(parse_netlist(""), NetlistError);
}

TEST_CASE("LC Hamiltonian terms") {
    const auto spec = spec_from(lc_netlist(1e-9, 1e-12));
    CHECK(spec.num_variables() == 1);
    CHECK(spec.capacitance() == 1e-12);
    REQUIRE(spec.inductance());
    CHECK(*spec.inductance() == 1e-9);
    CHECK(spec.josephson_energy() == 0);
    CHECK(spec.potential(2e-15) == doctest::Approx(4e-30 / 2e-9));
    CHECK(spec.describe() == spec_from(lc_netlist(1e-9, 1e-12)).describe());
}

TEST_CASE("harmonic oscillator levels") {
    const double l = 1e-9, c = 1e-12;
    const double hw = K.hbar / std::sqrt(l * c);
    SolverOptions o;
    o.n_levels = 5;
    o.check_refinement = true;
    const auto sp = solve_flux_spectrum(spec_from(lc_netlist(l, c)), o);
    for (int n = 0; n < 5; ++n) {
        CHECK(std::abs(sp.energies[n] / (hw * (n + 0.5)) - 1) < 1e-6);
        CHECK(sp.parities[n] == (n % 2 == 0 ? Parity::Even : Parity::Odd));
    }
    CHECK(sp.refinement_checked);
    CHECK(sp.refinement_change < 1e-8);
    CHECK(sp.boundary_mass < 1e-6);
}

TEST_CASE("harmonic oscillator levels, random L and C") {
    std::mt19937_64 gen(2026);
    std::uniform_real_distribution<double> logl(-10, -8), logc(-15, -12);
    for (int trial = 0; trial < 6; ++trial) {
        const double l = std::pow(10.0, logl(gen)), c = std::pow(10.0, logc(gen));
        const double hw = K.hbar / std::sqrt(l * c);
        SolverOptions o;
        o.n_levels = 5;
        const auto sp = solve_flux_spectrum(spec_from(lc_netlist(l, c)), o);
        for (int n = 0; n < 5; ++n) CHECK(std::abs(sp.energies[n] / (hw * (n + 0.5)) - 1) < 1e-6);
    }
}

TEST_CASE("flux matrix element of the oscillator") {
    const double l = 2e-9, c = 0.5e-12;
    const auto sp = solve_flux_spectrum(spec_from(lc_netlist(l, c)), {});
    const auto m = flux_matrix_element(sp);
    CHECK(m.off_diagonal == doctest::Approx(std::sqrt(K.hbar * std::sqrt(l / c) / 2)).epsilon(1e-7));
    CHECK(std::abs(m.diagonal_0) < 1e-6 * m.off_diagonal);
}

TEST_CASE("wavefunctions are normalized and orthogonal") {
    const auto sp = solve_flux_spectrum(half_flux_spec(3, 2e-15), {});
    const double h = sp.grid.spacing();
    for (std::size_t a = 0; a < sp.wavefunctions.size(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < sp.wavefunctions[a].size(); ++i) s += sp.wavefunctions[a][i] * sp.wavefunctions[b][i];
            CHECK(s * h == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("half-flux reduction") {
    const auto spec = half_flux_spec(3, 2e-15);
    bool found = false;
    for (const auto &t : spec.terms) {
        if (t.kind == TermKind::Josephson) {
            CHECK(t.offset == doctest::Approx(0.5 * K.phi0).epsilon(1e-12));
            found = true;
        }
        CHECK(t.kind != TermKind::Linear);
    }
    CHECK(found);
    CHECK(spec.potential(0.3 * K.phi0) == doctest::Approx(spec.potential(-0.3 * K.phi0)).epsilon(1e-12));

    const std::string off = "L Lq 1 0 1nH\nJJ J1 1 0 3e-22 2fF\nL Lb 2 0 1nH\nK M Lq Lb 10nH\nFB F Lb 4phi0\n";
    FluxBiasReduction r;
    r.require_half_flux = true;
    CHECK_THROWS_AS(reduce_flux_bias(spec_from(off), r), ValidationError);
}

TEST_CASE("double well against an independent tridiagonal solver") {
    const auto spec = half_flux_spec(3, 2e-15);
    const auto sp = solve_flux_spectrum(spec, {});
    const double lo = sp.grid.phi_min, hi = sp.grid.phi_max;
    const auto coarse = tridiagonal_levels(spec, lo, hi, 8001);
    const auto fine = tridiagonal_levels(spec, lo, hi, 16001);
    for (int n = 0; n < 4; ++n) {
        const double extrapolated = (4 * fine(n) - coarse(n)) / 3;
        CHECK(sp.energies[n] == doctest::Approx(extrapolated).epsilon(1e-8));
    }
    const double split_ref = ((4 * fine(1) - coarse(1)) - (4 * fine(0) - coarse(0))) / 3;
    CHECK(sp.energies[1] - sp.energies[0] == doctest::Approx(split_ref).epsilon(1e-4));
}

TEST_CASE("double-well geometry") {
    const auto spec = half_flux_spec(3, 2e-15);
    const auto sp = solve_flux_spectrum(spec, {});
    const auto dw = double_well_report(spec, sp);
    CHECK(dw.phi_a == doctest::Approx(-dw.phi_b).epsilon(1e-10));
    const double force_scale = spec.josephson_energy() * 2 * std::numbers::pi / K.phi0;
    CHECK(std::abs(spec.potential_derivative(dw.phi_b)) < 1e-12 * force_scale);
    CHECK(spec.potential_curvature(dw.phi_b) > 0);
    CHECK(dw.barrier_height == doctest::Approx(spec.potential(0) - spec.potential(dw.phi_b)).epsilon(1e-12));
    CHECK(sp.parities[0] == Parity::Even);
    CHECK(sp.parities[1] == Parity::Odd);
    CHECK(dw.splitting > 0);

    // x = 2 pi phi / phi0 satisfies x = beta sin x at the minima.
    const double x = 2 * std::numbers::pi * dw.phi_b / K.phi0;
    CHECK(x == doctest::Approx(3 * std::sin(x)).epsilon(1e-10));
}

TEST_CASE("monostable potential has no double well") {
    const auto spec = half_flux_spec(0.5, 2e-15);
    const auto sp = solve_flux_spectrum(spec, {});
    CHECK_THROWS_AS(double_well_report(spec, sp), ValidationError);
}

TEST_CASE("bistability parameter round trip") {
    for (double beta : {0.5, 1.0, 3.0, 100.0}) {
        CHECK(bistability_parameter(1e-9, josephson_energy_for_bistability(1e-9, beta)) ==
              doctest::Approx(beta).epsilon(1e-14));
    }
    CHECK(critical_current(josephson_energy_from_critical_current(1e-6)) == doctest::Approx(1e-6).epsilon(1e-14));
    CHECK_THROWS_AS(critical_current(-1), ValidationError);
}

TEST_CASE("washboard barrier") {
    const double ej = 1e-22, c = 1e-15;
    const double ic = critical_current(ej);
    CHECK(washboard_analysis(ej, c, 0).barrier_height == doctest::Approx(2 * ej).epsilon(1e-14));
    CHECK(washboard_analysis(ej, c, ic).barrier_height <= 1e-9 * 2 * ej);
    CHECK(washboard_analysis(ej, c, -ic).barrier_height <= 1e-9 * 2 * ej);
    CHECK_FALSE(washboard_analysis(ej, c, 1.5 * ic).has_minimum);

    // Dense scan of U(x) = s x - cos x over one period around the minimum.
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-0.95, 0.95);
    for (int i = 0; i < 8; ++i) {
        const double s = dist(gen);
        const auto w = washboard_analysis(ej, c, s * ic);
        const double xm = -std::asin(s);
        double top = -1e300;
        const int n = 400001;
        for (int j = 0; j < n; ++j) {
            const double x = xm + (s >= 0 ? -1 : 1) * 2 * std::numbers::pi * j / (n - 1);
            top = std::max(top, s * x - std::cos(x));
        }
        const double scan = ej * (top - (s * xm - std::cos(xm)));
        CHECK(w.barrier_height == doctest::Approx(scan).epsilon(1e-8));
        CHECK(w.barrier_height > 0);
    }
}

TEST_CASE("washboard barrier decreases with bias") {
    const double ej = 1e-22, c = 1e-15, ic = critical_current(ej);
    double prev = washboard_analysis(ej, c, 0).barrier_height;
    for (int i = 1; i <= 20; ++i) {
        const double b = washboard_analysis(ej, c, ic * i / 20.0).barrier_height;
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("potential extrema by root finding") {
    const auto spec = half_flux_spec(3, 2e-15);
    const auto minima = find_potential_minima(spec, -K.phi0, K.phi0);
    const auto maxima = find_potential_maxima(spec, -K.phi0, K.phi0);
    REQUIRE(minima.size() == 2);
    REQUIRE(maxima.size() == 1);
    CHECK(std::abs(maxima[0]) < 1e-12 * K.phi0);
}

TEST_CASE("solver input validation") {
    const auto spec = spec_from(lc_netlist(1e-9, 1e-12));
    SolverOptions o;
    o.stencil_order = 3;
    CHECK_THROWS_AS(solve_flux_spectrum(spec, o), ValidationError);

    o = {};
    o.n_levels = 600;
    CHECK_THROWS_AS(solve_flux_spectrum(spec, o), ValidationError);

    o = {};
    GridConfig narrow;
    narrow.phi_min = -1e-17;
    narrow.phi_max = 1e-17;
    o.grid = narrow;
    CHECK_THROWS_AS(solve_flux_spectrum(spec, o), ValidationError);

    GridConfig even;
    even.phi_min = -1;
    even.phi_max = 1;
    even.n_points = 2000;
    CHECK_THROWS_AS(even.validate(), ValidationError);
}

TEST_CASE("every stencil order approximates the oscillator") {
    const double l = 1e-9, c = 1e-12;
    const double hw = K.hbar / std::sqrt(l * c);
    const auto spec = spec_from(lc_netlist(l, c));
    for (int order : {2, 4, 6, 8}) {
        SolverOptions o;
        o.stencil_order = order;
        o.grid = auto_grid(spec);
        const auto sp = solve_flux_spectrum(spec, o);
        CHECK(std::abs(sp.energies[0] / (0.5 * hw) - 1) < 1e-4);
        CHECK(sp.stencil_order == order);
    }
}
