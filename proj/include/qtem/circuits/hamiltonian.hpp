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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtem/circuits/netlist.hpp"

namespace qtem::circuits {

enum class TermKind {
    Kinetic,    // q^2 / 2C           value = C [F]
    Quadratic,  // phi^2 / 2L         value = L [H]
    Bilinear,   // phi_a phi_b / L_c  value = L_c [H]
    Josephson,  // -E_J cos(2 pi (phi + offset) / phi0)   value = E_J [J]
    Linear,     // b phi              value = b [J/Wb = A]
};

std::string_view term_kind_name(TermKind kind);

/// Where a linear term came from; decides how reduce_flux_bias treats it.
enum class LinearSource {
    None,
    CoupledFluxBias,  // flux trapped in a secondary inductor, seen through K
    TrappedFlux,      // flux trapped in the loop's own inductor
    BiasCurrent,      // explicit current source
};

struct Term {
    TermKind kind;
    int var = 0;
    int var2 = -1;  // Bilinear only
    double value = 0;
    double offset = 0;  // Josephson only [Wb]
    LinearSource source = LinearSource::None;
    std::string origin;  // netlist element names the term came from
};

/// Term list of a circuit Hamiltonian in traversed-flux variables. The
/// superconducting phase 2 pi phi / phi0 is never stored.
struct HamiltonianSpec {
    std::vector<std::string> variables;
    std::vector<Term> terms;
    /// Additive constants dropped from the term list [J].
    double dropped_constant = 0;
    std::vector<std::string> notes;

    std::size_t num_variables() const {
        return variables.size();
    }

    /// Total capacitance of the kinetic term of `var`.
    double capacitance(int var = 0) const;
    /// Inductance of the quadratic term of `var`, if any.
    std::optional<double> inductance(int var = 0) const;
    /// Sum of the Josephson energies acting on `var`.
    double josephson_energy(int var = 0) const;
    /// Sum of the linear coefficients acting on `var` [A].
    double linear_coefficient(int var = 0) const;

    /// Potential energy V(phi) and its first two derivatives for a
    /// single-variable spec.
    double potential(double phi) const;
    double potential_derivative(double phi) const;
    double potential_curvature(double phi) const;

    /// Human-readable "H = ..." form.
    std::string describe() const;

    /// Checks exactly one kinetic term per variable and at least one potential
    /// term per variable. Throws ValidationError.
    void validate() const;
};

/// Applies the quantization rules: one traversed-flux variable per loop with a
/// junction or capacitor, a kinetic term C phidot^2/2 per junction/capacitor,
/// phi^2/2L per inductor, phi_1 phi_2 / L_c per coupling and
/// -E_J cos(2 pi phi / phi0) per junction. Deterministic in the netlist.
HamiltonianSpec build_hamiltonian(const CircuitNetlist &net);

struct FluxBiasReduction {
    enum class Mode {
        Auto,           // trapped flux in the loop inductor -> CurrentSource, otherwise Offset
        Offset,         // complete the square, absorb the bias into the junction offset
        CurrentSource,  // large-inductor limit: drop phi^2/2L, keep the linear term
    };
    Mode mode = Mode::Auto;
    /// Effective inductance replacing L (defaults to L; the weak-coupling
    /// correction is not modelled).
    std::optional<double> effective_inductance;
    /// Fail unless the resulting junction offset is phi0/2.
    bool require_half_flux = false;
};

/// Reduces a biased single-loop spec to one variable with no linear term
/// (Offset mode) or to a washboard spec (CurrentSource mode). Additive
/// constants are dropped. A spec without linear terms is returned unchanged
/// apart from L -> effective inductance.
HamiltonianSpec reduce_flux_bias(const HamiltonianSpec &spec, const FluxBiasReduction &options = {});

}  // namespace qtem::circuits
