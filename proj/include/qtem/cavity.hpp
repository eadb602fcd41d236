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

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qtem/circuits/flux_solver.hpp"

namespace qtem::cavity {

/// Lumped LC resonator.
struct ResonatorParams {
    double inductance = 0;   // L_r [H]
    double capacitance = 0;  // C_r [F]
    /// L~_r used for the zero-point flux; defaults to L_r.
    std::optional<double> effective_inductance;

    static ResonatorParams from_frequency(double frequency_hz, double impedance_ohm);

    double omega() const;      // 1/sqrt(LC) [rad/s]
    double impedance() const;  // sqrt(L/C) [Ohm]
    double phi_zpf() const;    // sqrt(L~ hbar omega / 2) [Wb]
    void validate() const;
};

/// Jaynes-Cummings parameters. The coupling energy g = lambda Delta is the
/// primitive; lambda is derived and undefined on resonance.
struct JchSystem {
    double omega_r = 0;  // rad/s
    double omega_q = 0;  // rad/s
    double g = 0;        // J
    int n_max = 20;      // Fock cutoff

    static JchSystem from_lambda(double omega_r, double omega_q, double lambda, int n_max);

    double delta() const;   // hbar (omega_q - omega_r) [J]
    double lambda() const;  // g / Delta; throws ValidationError at Delta = 0
    int dim() const {
        return 2 * (n_max + 1);
    }
    void validate() const;
};

/// Basis index of |n, m> (n photons, qubit m in {0, 1}).
inline int basis_index(int n, int m) {
    return 2 * n + m;
}

/// Truncated ladder operator a on n_max + 1 Fock states.
Eigen::MatrixXd annihilation(int n_max);
/// sigma with sigma |1> = |0>, in the {|0>, |1>} ordering.
Eigen::Matrix2d sigma_lowering();

/// H = hbar w_r a^+a + hbar w sigma^+ sigma + g (a + a^+)(sigma + sigma^+), or
/// with rwa the counter-rotating terms dropped (g I_+, I_+ = a^+ sigma + a sigma^+).
Eigen::MatrixXd build_jch(const JchSystem &sys, bool rwa);

/// (hbar w_r - lambda^2 Delta) a^+a + [hbar w + 2 lambda^2 Delta (a^+a + 1/2)] sigma^+ sigma.
Eigen::MatrixXd build_effective(const JchSystem &sys);

/// Total excitation number a^+a + sigma^+ sigma.
Eigen::MatrixXd excitation_number(int n_max);

struct BlockResidual {
    int n = 0;  // block {|n+1, 0>, |n, 1>}
    double exact_low = 0;
    double exact_high = 0;
    double eff_low = 0;
    double eff_high = 0;
    double residual = 0;  // max |E_exact - E_eff| over the two levels [J]
    double transform_residual = 0;  // max |(U^+ H U - H_eff)_ij| in the block [J]
};

struct DispersiveReport {
    double lambda = 0;
    double delta = 0;                   // J
    double qubit_shift_per_photon = 0;  // 2 lambda^2 Delta [J]
    double resonator_pull = 0;          // 2 lambda^2 Delta [J]
    double lamb_shift = 0;              // lambda^2 Delta [J]
    std::vector<BlockResidual> blocks;  // n = 0 .. n_max - 2
    double max_residual = 0;
    double max_transform_residual = 0;
    /// Qubit transition shift per added photon read off build_effective [J].
    double measured_shift_per_photon = 0;
};

/// Largest |lambda| sqrt(n_max + 1) accepted by dispersive_transform.
inline constexpr double kDispersiveGuard = 0.3;

/// H_eff coefficients plus per-block comparison against exact RWA eigenvalues.
DispersiveReport dispersive_transform(const JchSystem &sys);

struct SweepPoint {
    double lambda = 0;
    double max_residual = 0;
    double max_transform_residual = 0;
};

std::vector<SweepPoint> dispersive_sweep(const JchSystem &base, const std::vector<double> &lambdas);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

/// omega_q = (E1 - E0)/hbar, g = phi_zpf <0|phi|1> / L_c.
JchSystem extract_jch_params(const ResonatorParams &res, const circuits::FluxSpectrum &squid, double coupling_inductance,
                             int n_max = 20);

/// max(20, ceil(n_bar + 10 sqrt(n_bar + 1))).
int default_fock_cutoff(double n_bar);

/// (|alpha> (x) |0> + |0_cav> (x) |1>) / sqrt 2 with |alpha|^2 = n_bar.
struct ConditionalState {
    double n_bar = 0;
    int n_max = 0;
    Eigen::VectorXd amplitudes;  // indexed by basis_index
    double truncated_mass = 0;   // Poisson weight beyond n_max before renormalisation

    double norm() const;
    /// Photon statistics of the qubit-|0> branch.
    double branch_mean() const;
    double branch_variance() const;
};

/// Throws ValidationError when the Poisson tail beyond n_max exceeds 1e-8.
ConditionalState conditional_cavity_state(double n_bar, int n_max);

struct RegimeReport {
    double temperature = 0;  // K
    double omega = 0;        // rad/s
    double thermal_uev = 0;  // k_B T
    double photon_uev = 0;   // hbar omega
    double gap_uev = 0;      // Delta_Al
    bool kt_ok = false;      // k_B T < hbar omega
    bool gap_ok = false;     // hbar omega < Delta_Al
    double kt_margin_uev = 0;   // hbar omega - k_B T
    double gap_margin_uev = 0;  // Delta_Al - hbar omega
};

RegimeReport regime_check(double temperature, double omega);

}  // namespace qtem::cavity
