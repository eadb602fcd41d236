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

#include "qtem/optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

namespace qtem::optics {

namespace {

const physcore::PhysConstants &K() {
    return physcore::constants();
}

}  // namespace

BeamParameters electron_kinematics(double kinetic_energy, std::optional<double> pulse_width) {
    if (!(kinetic_energy > 0) || !std::isfinite(kinetic_energy)) {
        throw ValidationError("kinetic energy must be positive");
    }
    if (pulse_width && !(*pulse_width > 0)) throw ValidationError("pulse width must be positive");
    const auto &k = K();
    BeamParameters b;
    b.kinetic_energy = kinetic_energy;
    b.pc = std::sqrt(kinetic_energy * (kinetic_energy + 2 * k.m_e_c2));
    b.momentum = b.pc / k.c;
    b.gamma = 1 + kinetic_energy / k.m_e_c2;
    b.beta = b.pc / (kinetic_energy + k.m_e_c2);
    b.velocity = b.beta * k.c;
    b.wavelength = k.h / b.momentum;
    b.pulse_width = pulse_width;
    return b;
}

void InteractionGeometry::validate() const {
    if (!(d > 0)) throw ValidationError("width d must be positive");
    if (!(l > 0)) throw ValidationError("length l must be positive");
    if (drift && !(*drift > 0)) throw ValidationError("drift distance must be positive");
}

std::string_view threshold_name(FluxThreshold t) {
    return t == FluxThreshold::Diffraction ? "2phi0" : "phi0";
}

FluxThreshold parse_threshold(std::string_view name) {
    if (name == "2phi0" || name == "diffraction") return FluxThreshold::Diffraction;
    if (name == "phi0" || name == "aharonov-bohm") return FluxThreshold::AharonovBohm;
    throw ValidationError("unknown flux threshold '" + std::string(name) + "' (expected 2phi0 or phi0)");
}

double threshold_flux(FluxThreshold t) {
    return t == FluxThreshold::Diffraction ? 2 * K().phi0 : K().phi0;
}

DeflectionReport magnetic_deflection(const BeamParameters &beam, const InteractionGeometry &geom, double flux,
                                     FluxThreshold threshold) {
    geom.validate();
    if (!(flux >= 0)) throw ValidationError("flux must be non-negative");
    const double phi0 = K().phi0;
    DeflectionReport r;
    r.diffraction_spread = beam.wavelength / geom.d;
    r.theta = beam.wavelength / (2 * geom.d) * (flux / phi0);
    r.ratio = flux / (2 * phi0);
    if (geom.drift) r.beam_shift = *geom.drift * r.theta;
    r.interaction_time = geom.l / beam.velocity;
    r.flux_over_threshold = flux / threshold_flux(threshold);
    r.distinguishable = *r.flux_over_threshold >= 1;
    return r;
}

DeflectionReport electric_deflection(const BeamParameters &beam, const InteractionGeometry &geom, double charge) {
    geom.validate();
    if (!(charge >= 0)) throw ValidationError("plate charge must be non-negative");
    const auto &k = K();
    DeflectionReport r;
    r.diffraction_spread = beam.wavelength / geom.d;
    r.theta = k.e * charge / (beam.momentum * k.eps0 * geom.d * beam.velocity);
    r.ratio = r.theta / r.diffraction_spread;
    if (geom.drift) r.beam_shift = *geom.drift * r.theta;
    r.interaction_time = geom.l / beam.velocity;
    const double impulse_energy = k.e * charge / (k.eps0 * geom.d);
    r.work = impulse_energy * impulse_energy / (2 * beam.beta * beam.beta * k.m_e_c2);
    r.distinguishable = r.ratio >= 1;
    return r;
}

WorkEstimate work_estimate(double beta, double d) {
    if (!(beta > 0 && beta < 1)) throw ValidationError("beta must lie in (0, 1)");
    if (!(d > 0)) throw ValidationError("width d must be positive");
    const auto &k = K();
    WorkEstimate w;
    w.prefactor = std::numbers::pi * std::numbers::pi * beta * beta / (8 * k.alpha * k.alpha);
    w.coulomb_energy = k.e * k.e / (k.eps0 * d);
    w.work = w.prefactor * w.coulomb_energy * w.coulomb_energy / k.m_e_c2;
    return w;
}

double photons_for_magnetic(double impedance, FluxThreshold threshold) {
    if (!(impedance > 0)) throw ValidationError("resonator impedance must be positive");
    const auto &k = K();
    const double n = std::numbers::pi * k.R_K / impedance;
    if (threshold == FluxThreshold::Diffraction) return n;
    return n / 4;  // (phi0 / 2 phi0)^2
}

double electrons_for_deflection(double beta) {
    if (!(beta > 0 && beta < 1)) throw ValidationError("beta must lie in (0, 1)");
    return beta * K().R_K / K().Z0;
}

ElectricPhotonCount photons_for_electric(double impedance, double beta) {
    if (!(impedance > 0)) throw ValidationError("resonator impedance must be positive");
    if (!(beta > 0 && beta <= 1)) throw ValidationError("beta must lie in (0, 1]");
    const auto &k = K();
    ElectricPhotonCount c;
    c.photons = std::numbers::pi * beta * beta * k.R_K * impedance / (k.Z0 * k.Z0);
    const double z = impedance / k.Z0;
    c.ratio_to_magnetic = beta * beta * z * z;
    return c;
}

WhichWayReport which_way_report(double pulse_width, double omega_r, double work) {
    if (!(pulse_width > 0)) throw ValidationError("pulse width must be positive");
    if (!(omega_r > 0)) throw ValidationError("resonator frequency must be positive");
    if (!(work >= 0)) throw ValidationError("work must be non-negative");
    const double hbar = K().hbar;
    WhichWayReport r;
    r.energy_uncertainty = hbar / pulse_width;
    r.photon_energy = hbar * omega_r;
    r.work = work;
    r.energy_ratio = r.energy_uncertainty / r.photon_energy;
    r.work_ratio = work / r.photon_energy;
    r.energy_ok = r.energy_ratio >= kWhichWayMargin;
    r.work_ok = r.work_ratio <= kWhichWayMargin;
    r.hides_which_way = r.energy_ok && r.work_ok;
    return r;
}

RadiationBudget radiation_budget(double t_hot, double t_shield, double aperture_area) {
    if (!(t_shield >= 0)) throw ValidationError("shield temperature must be non-negative");
    if (!(t_hot > t_shield)) throw ValidationError("hot temperature must exceed the shield temperature");
    if (!(aperture_area > 0)) throw ValidationError("aperture area must be positive");
    const auto &k = K();
    RadiationBudget b;
    b.hole_flux = k.sigma_SB * std::pow(t_hot, 4) * aperture_area;
    if (t_shield > 0) b.shield_factor = std::pow(t_hot / t_shield, 4);
    b.wien_peak = k.wien_b / t_hot;
    return b;
}

}  // namespace qtem::optics
