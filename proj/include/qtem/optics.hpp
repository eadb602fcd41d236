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
#include <string_view>

namespace qtem::optics {

/// Relativistic free-electron beam.
struct BeamParameters {
    double kinetic_energy = 0;  // J
    double pc = 0;              // J
    double momentum = 0;        // kg m/s
    double gamma = 1;
    double beta = 0;
    double velocity = 0;    // m/s
    double wavelength = 0;  // h/p [m]
    std::optional<double> pulse_width;  // s
};

BeamParameters electron_kinematics(double kinetic_energy, std::optional<double> pulse_width = std::nullopt);

struct InteractionGeometry {
    double d = 0;  // transverse width [m]
    double l = 0;  // length along the beam [m]
    std::optional<double> drift;  // flight distance to the observation plane [m]

    void validate() const;
};

/// Flux needed for a distinguishable deflection.
enum class FluxThreshold {
    Diffraction,    // phi = 2 phi0: theta equals the diffraction spread lambda/d
    AharonovBohm,   // phi = phi0
};

std::string_view threshold_name(FluxThreshold t);
FluxThreshold parse_threshold(std::string_view name);
double threshold_flux(FluxThreshold t);

struct DeflectionReport {
    double theta = 0;              // rad
    double diffraction_spread = 0;  // lambda/d [rad]
    double ratio = 0;              // theta / (lambda/d)
    std::optional<double> beam_shift;  // drift * theta [m]
    double interaction_time = 0;   // l / v [s]
    std::optional<double> work;    // electric case [J]
    /// Magnetic case: the flux relative to the selected threshold.
    std::optional<double> flux_over_threshold;
    bool distinguishable = false;  // ratio (or flux) reaches the threshold
};

/// theta = (lambda / 2d)(phi / phi0) = e phi / (p d), uniform B = phi / (l d).
DeflectionReport magnetic_deflection(const BeamParameters &beam, const InteractionGeometry &geom, double flux,
                                     FluxThreshold threshold = FluxThreshold::Diffraction);

/// theta = e q / (p eps0 d v) and W = (e q / eps0 d)^2 / (2 beta^2 m c^2) for a
/// parallel-plate field E = q / (eps0 d l).
DeflectionReport electric_deflection(const BeamParameters &beam, const InteractionGeometry &geom, double charge);

/// Closed-form which-way work for a plate charged by the electric photon
/// count: pi^2 beta^2 / (8 alpha^2) (e^2 / eps0 d)^2 / (m c^2).
struct WorkEstimate {
    double prefactor = 0;          // pi^2 beta^2 / (8 alpha^2)
    double coulomb_energy = 0;     // e^2 / (eps0 d) [J]
    double work = 0;               // J
};

WorkEstimate work_estimate(double beta, double d);

/// n = phi^2 / (2 hbar Z_r); at phi = 2 phi0 this is pi R_K / Z_r.
double photons_for_magnetic(double impedance, FluxThreshold threshold = FluxThreshold::Diffraction);

/// Plate electrons for a lambda/d deflection: n_e = beta R_K / Z0.
double electrons_for_deflection(double beta);

struct ElectricPhotonCount {
    double photons = 0;               // pi beta^2 R_K Z_r / Z0^2
    double ratio_to_magnetic = 0;     // beta^2 (Z_r / Z0)^2
};

ElectricPhotonCount photons_for_electric(double impedance, double beta);

struct WhichWayReport {
    double energy_uncertainty = 0;  // hbar / tau [J]
    double photon_energy = 0;       // hbar omega_r [J]
    double work = 0;                // J
    double energy_ratio = 0;        // Delta E / (hbar omega_r)
    double work_ratio = 0;          // W / (hbar omega_r)
    bool energy_ok = false;         // Delta E >= 10 hbar omega_r
    bool work_ok = false;           // W <= 10 hbar omega_r
    bool hides_which_way = false;
};

/// Factor-10 operationalisation of Delta E >> hbar omega_r and W ~ hbar omega_r.
inline constexpr double kWhichWayMargin = 10.0;

WhichWayReport which_way_report(double pulse_width, double omega_r, double work);

struct RadiationBudget {
    double hole_flux = 0;                // W
    std::optional<double> shield_factor;  // (T_hot / T_shield)^4, absent at T_shield = 0
    double wien_peak = 0;                // m
};

RadiationBudget radiation_budget(double t_hot, double t_shield, double aperture_area);

}  // namespace qtem::optics
