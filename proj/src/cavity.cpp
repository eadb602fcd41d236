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

#include "qtem/cavity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtem/circuits/potential.hpp"
#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

namespace qtem::cavity {

namespace {

double hbar() {
    return physcore::constants().hbar;
}

double to_uev(double joules) {
    return joules / physcore::constants().e * 1e6;
}

}  // namespace

ResonatorParams ResonatorParams::from_frequency(double frequency_hz, double impedance_ohm) {
    if (!(frequency_hz > 0) || !(impedance_ohm > 0)) {
        throw ValidationError("resonator frequency and impedance must be positive");
    }
    const double w = 2 * std::numbers::pi * frequency_hz;
    ResonatorParams r;
    r.inductance = impedance_ohm / w;
    r.capacitance = 1.0 / (impedance_ohm * w);
    return r;
}

double ResonatorParams::omega() const {
    return 1.0 / std::sqrt(inductance * capacitance);
}

double ResonatorParams::impedance() const {
    return std::sqrt(inductance / capacitance);
}

double ResonatorParams::phi_zpf() const {
    const double l = effective_inductance.value_or(inductance);
    return std::sqrt(l * hbar() * omega() / 2);
}

void ResonatorParams::validate() const {
    if (!(inductance > 0) || !(capacitance > 0)) throw ValidationError("resonator L and C must be positive");
    if (effective_inductance && !(*effective_inductance > 0)) {
        throw ValidationError("effective inductance must be positive");
    }
}

JchSystem JchSystem::from_lambda(double omega_r, double omega_q, double lambda, int n_max) {
    JchSystem s;
    s.omega_r = omega_r;
    s.omega_q = omega_q;
    s.n_max = n_max;
    if (s.delta() == 0) {
        throw ValidationError("lambda is undefined on resonance (Delta = 0); specify g instead");
    }
    s.g = lambda * s.delta();
    return s;
}

double JchSystem::delta() const {
    return hbar() * (omega_q - omega_r);
}

double JchSystem::lambda() const {
    const double d = delta();
    if (d == 0) throw ValidationError("lambda is undefined on resonance (Delta = 0); g = " + std::to_string(g) + " J");
    return g / d;
}

void JchSystem::validate() const {
    if (n_max < 1) throw ValidationError("Fock cutoff n_max must be at least 1");
    if (!(omega_r > 0) || !(omega_q > 0)) throw ValidationError("frequencies must be positive");
    if (!std::isfinite(g)) throw ValidationError("coupling must be finite");
}

Eigen::MatrixXd annihilation(int n_max) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::Matrix2d sigma_lowering() {
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    s(0, 1) = 1;
    return s;
}

namespace {

/// A (x) B in the |n, m> = 2n + m ordering.
Eigen::MatrixXd kron(const Eigen::MatrixXd &cav, const Eigen::Matrix2d &qubit) {
    const auto n = cav.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (cav(i, j) != 0) out.block<2, 2>(2 * i, 2 * j) = cav(i, j) * qubit;
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd build_jch(const JchSystem &sys, bool rwa) {
    sys.validate();
    const Eigen::MatrixXd a = annihilation(sys.n_max);
    const Eigen::MatrixXd ad = a.transpose();
    const Eigen::Matrix2d s = sigma_lowering();
    const Eigen::Matrix2d sd = s.transpose();
    const Eigen::MatrixXd id_c = Eigen::MatrixXd::Identity(sys.n_max + 1, sys.n_max + 1);

    Eigen::MatrixXd h = hbar() * sys.omega_r * kron(ad * a, Eigen::Matrix2d::Identity()) +
                        hbar() * sys.omega_q * kron(id_c, sd * s);
    if (rwa) {
        h += sys.g * (kron(ad, s) + kron(a, sd));
    } else {
        h += sys.g * kron(a + ad, s + sd);
    }
    return h;
}

Eigen::MatrixXd build_effective(const JchSystem &sys) {
    sys.validate();
    const double lam = sys.lambda();
    const double d = sys.delta();
    const Eigen::MatrixXd a = annihilation(sys.n_max);
    const Eigen::MatrixXd num = a.transpose() * a;
    const Eigen::Matrix2d s = sigma_lowering();
    const Eigen::Matrix2d proj = s.transpose() * s;
    const Eigen::MatrixXd id_c = Eigen::MatrixXd::Identity(sys.n_max + 1, sys.n_max + 1);
    return (hbar() * sys.omega_r - lam * lam * d) * kron(num, Eigen::Matrix2d::Identity()) +
           kron(hbar() * sys.omega_q * id_c + 2 * lam * lam * d * (num + 0.5 * id_c), proj);
}

Eigen::MatrixXd excitation_number(int n_max) {
    const Eigen::MatrixXd a = annihilation(n_max);
    const Eigen::Matrix2d s = sigma_lowering();
    const Eigen::MatrixXd id_c = Eigen::MatrixXd::Identity(n_max + 1, n_max + 1);
    return kron(a.transpose() * a, Eigen::Matrix2d::Identity()) + kron(id_c, s.transpose() * s);
}

DispersiveReport dispersive_transform(const JchSystem &sys) {
    sys.validate();
    const double lam = sys.lambda();
    const double d = sys.delta();
    if (std::abs(lam) * std::sqrt(sys.n_max + 1.0) > kDispersiveGuard * (1 + 1e-12)) {
        throw ValidationError("dispersive guard violated: |lambda| sqrt(n_max + 1) = " +
                              std::to_string(std::abs(lam) * std::sqrt(sys.n_max + 1.0)) + " > 0.3");
    }
    DispersiveReport r;
    r.lambda = lam;
    r.delta = d;
    r.qubit_shift_per_photon = 2 * lam * lam * d;
    r.resonator_pull = 2 * lam * lam * d;
    r.lamb_shift = lam * lam * d;

    const Eigen::MatrixXd h = build_jch(sys, true);
    const Eigen::MatrixXd heff = build_effective(sys);
    for (int n = 0; n <= sys.n_max - 2; ++n) {
        const int lo = basis_index(n + 1, 0);
        const int hi = basis_index(n, 1);
        Eigen::Matrix2d block;
        block << h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block, Eigen::EigenvaluesOnly);
        const Eigen::Vector2d exact = es.eigenvalues();

        BlockResidual b;
        b.n = n;
        b.exact_low = exact(0);
        b.exact_high = exact(1);
        b.eff_low = std::min(heff(lo, lo), heff(hi, hi));
        b.eff_high = std::max(heff(lo, lo), heff(hi, hi));
        b.residual = std::max(std::abs(b.exact_low - b.eff_low), std::abs(b.exact_high - b.eff_high));

        // U = exp(lambda I_-) restricted to the block is a rotation by lambda sqrt(n + 1).
        const double theta = lam * std::sqrt(n + 1.0);
        Eigen::Matrix2d u;
        u << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
        Eigen::Matrix2d eff;
        eff << heff(lo, lo), 0, 0, heff(hi, hi);
        b.transform_residual = (u.transpose() * block * u - eff).cwiseAbs().maxCoeff();

        r.max_residual = std::max(r.max_residual, b.residual);
        r.max_transform_residual = std::max(r.max_transform_residual, b.transform_residual);
        r.blocks.push_back(b);
    }

    // Qubit transition energy at zero and one photon, from the effective matrix.
    auto transition = [&](int n) { return heff(basis_index(n, 1), basis_index(n, 1)) - heff(basis_index(n, 0), basis_index(n, 0)); };
    r.measured_shift_per_photon = transition(1) - transition(0);
    return r;
}

std::vector<SweepPoint> dispersive_sweep(const JchSystem &base, const std::vector<double> &lambdas) {
    std::vector<SweepPoint> out;
    for (double lam : lambdas) {
        JchSystem s = JchSystem::from_lambda(base.omega_r, base.omega_q, lam, base.n_max);
        const auto r = dispersive_transform(s);
        out.push_back({lam, r.max_residual, r.max_transform_residual});
    }
    return out;
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw ValidationError("slope fit needs positive data");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

JchSystem extract_jch_params(const ResonatorParams &res, const circuits::FluxSpectrum &squid,
                             double coupling_inductance, int n_max) {
    res.validate();
    if (!(coupling_inductance > 0)) throw ValidationError("coupling inductance must be positive");
    if (squid.energies.size() < 2) throw ValidationError("qubit spectrum needs at least two levels");
    const auto m = circuits::flux_matrix_element(squid);
    JchSystem s;
    s.omega_r = res.omega();
    s.omega_q = (squid.energies[1] - squid.energies[0]) / hbar();
    s.g = res.phi_zpf() * m.off_diagonal / coupling_inductance;
    s.n_max = n_max;
    return s;
}

int default_fock_cutoff(double n_bar) {
    return std::max(20, static_cast<int>(std::ceil(n_bar + 10 * std::sqrt(n_bar + 1))));
}

double ConditionalState::norm() const {
    return amplitudes.norm();
}

double ConditionalState::branch_mean() const {
    double w = 0, s = 0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = amplitudes(basis_index(n, 0)) * amplitudes(basis_index(n, 0));
        w += p;
        s += n * p;
    }
    return s / w;
}

double ConditionalState::branch_variance() const {
    const double mean = branch_mean();
    double w = 0, s = 0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = amplitudes(basis_index(n, 0)) * amplitudes(basis_index(n, 0));
        w += p;
        s += (n - mean) * (n - mean) * p;
    }
    return s / w;
}

ConditionalState conditional_cavity_state(double n_bar, int n_max) {
    if (!(n_bar >= 0) || !std::isfinite(n_bar)) throw ValidationError("mean photon number must be non-negative");
    if (n_max < 1) throw ValidationError("Fock cutoff n_max must be at least 1");
    ConditionalState st;
    st.n_bar = n_bar;
    st.n_max = n_max;

    // Poisson amplitudes in log space: ln c_n = -n_bar/2 + n ln(alpha) - lgamma(n+1)/2.
    std::vector<double> c(n_max + 1);
    double kept = 0;
    for (int n = 0; n <= n_max; ++n) {
        if (n_bar == 0) {
            c[n] = n == 0 ? 1.0 : 0.0;
        } else {
            c[n] = std::exp(-0.5 * n_bar + 0.5 * n * std::log(n_bar) - 0.5 * std::lgamma(n + 1.0));
        }
        kept += c[n] * c[n];
    }
    st.truncated_mass = std::max(0.0, 1.0 - kept);
    if (st.truncated_mass > 1e-8) {
        throw ValidationError("Fock cutoff too small: Poisson mass " + std::to_string(st.truncated_mass) +
                              " beyond n_max = " + std::to_string(n_max));
    }
    const double renorm = 1.0 / std::sqrt(kept);
    st.amplitudes = Eigen::VectorXd::Zero(2 * (n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
        st.amplitudes(basis_index(n, 0)) = c[n] * renorm / std::sqrt(2.0);
    }
    st.amplitudes(basis_index(0, 1)) = 1.0 / std::sqrt(2.0);
    return st;
}

RegimeReport regime_check(double temperature, double omega) {
    if (!(temperature >= 0)) throw ValidationError("temperature must be non-negative");
    if (!(omega > 0)) throw ValidationError("angular frequency must be positive");
    const auto &k = physcore::constants();
    RegimeReport r;
    r.temperature = temperature;
    r.omega = omega;
    r.thermal_uev = to_uev(k.k_B * temperature);
    r.photon_uev = to_uev(k.hbar * omega);
    r.gap_uev = to_uev(k.Delta_Al);
    r.kt_ok = k.k_B * temperature < k.hbar * omega;
    r.gap_ok = k.hbar * omega < k.Delta_Al;
    r.kt_margin_uev = r.photon_uev - r.thermal_uev;
    r.gap_margin_uev = r.gap_uev - r.photon_uev;
    return r;
}

}  // namespace qtem::cavity
