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

#include <vector>

#include "qtem/circuits/flux_solver.hpp"
#include "qtem/circuits/hamiltonian.hpp"

namespace qtem::circuits {

/// Local minima of V in [lo, hi]: sign changes of V' found on `samples`
/// equally spaced points, refined by bracketed root finding. Ascending.
std::vector<double> find_potential_minima(const HamiltonianSpec &spec, double lo, double hi, int samples = 20001);
std::vector<double> find_potential_maxima(const HamiltonianSpec &spec, double lo, double hi, int samples = 20001);

/// beta_L = L E_J (2 pi / phi0)^2. Double well at half flux iff beta_L > 1.
double bistability_parameter(double inductance, double josephson_energy);
double josephson_energy_for_bistability(double inductance, double beta_l);

/// i_c = 2 pi E_J / phi0, and its inverse. Both require a positive argument.
double critical_current(double josephson_energy);
double josephson_energy_from_critical_current(double critical_current);

struct DoubleWellReport {
    double phi_a = 0;          // left minimum [Wb]
    double phi_b = 0;          // right minimum [Wb]
    double delta_phi = 0;      // phi_b - phi_a [Wb]
    double splitting = 0;      // E_1 - E_0 [J]
    double barrier_height = 0;  // top of the central barrier above the higher minimum [J]
};

/// Locates the two minima of a bistable potential inside the spectrum's grid
/// window. Throws ValidationError if the potential is monostable or has more
/// than two minima there, or if fewer than two levels were solved.
DoubleWellReport double_well_report(const HamiltonianSpec &spec, const FluxSpectrum &spectrum);

struct WashboardReport {
    double bias_current = 0;      // A
    double critical_current = 0;  // A
    double barrier_height = 0;    // J, zero when |I_b| >= I_c
    bool has_minimum = false;
    double phi_min = 0;  // local minimum [Wb] (NaN without one)
    double phi_max = 0;  // adjacent downhill maximum [Wb] (NaN without one)
    double plasma_frequency = 0;  // small-oscillation angular frequency in the well [rad/s]
};

/// Tilted-cosine potential V(phi) = I_b phi - E_J cos(2 pi phi / phi0).
WashboardReport washboard_analysis(double josephson_energy, double capacitance, double bias_current);

struct FluxMatrixElement {
    double off_diagonal = 0;  // |<0|phi|1>| [Wb]
    double diagonal_0 = 0;    // <0|phi|0> [Wb]
    double diagonal_1 = 0;    // <1|phi|1> [Wb]
};

/// <0|phi|1> by grid quadrature, sign-normalised positive. Throws
/// ValidationError with fewer than two levels or when a diagonal element
/// exceeds 1e-6 |<0|phi|1>| (asymmetric potential).
FluxMatrixElement flux_matrix_element(const FluxSpectrum &spectrum);

}  // namespace qtem::circuits
