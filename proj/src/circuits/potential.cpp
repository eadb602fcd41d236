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

#include "qtem/circuits/potential.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

namespace qtem::circuits {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double refine_root(const HamiltonianSpec &spec, double a, double b, double fa, double fb) {
    if (fa == 0) return a;
    if (fb == 0) return b;
    std::uintmax_t max_iter = 200;
    auto f = [&](double x) { return spec.potential_derivative(x); };
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                               max_iter);
    return 0.5 * (r.first + r.second);
}

/// Stationary points where V' crosses zero in the given direction.
std::vector<double> stationary_points(const HamiltonianSpec &spec, double lo, double hi, int samples, bool minima) {
    if (spec.num_variables() != 1) throw ValidationError("potential analysis needs a single-variable spec");
    if (!(hi > lo) || samples < 3) throw ValidationError("invalid search window");
    std::vector<double> out;
    const double step = (hi - lo) / (samples - 1);
    double x0 = lo;
    double d0 = spec.potential_derivative(x0);
    for (int i = 1; i < samples; ++i) {
        const double x1 = lo + i * step;
        const double d1 = spec.potential_derivative(x1);
        const bool crossing = minima ? (d0 < 0 && d1 >= 0) : (d0 > 0 && d1 <= 0);
        if (crossing) {
            const double r = refine_root(spec, x0, x1, d0, d1);
            if (out.empty() || std::abs(r - out.back()) > 0.5 * step) out.push_back(r);
        }
        x0 = x1;
        d0 = d1;
    }
    return out;
}

}  // namespace

std::vector<double> find_potential_minima(const HamiltonianSpec &spec, double lo, double hi, int samples) {
    return stationary_points(spec, lo, hi, samples, true);
}

std::vector<double> find_potential_maxima(const HamiltonianSpec &spec, double lo, double hi, int samples) {
    return stationary_points(spec, lo, hi, samples, false);
}

double bistability_parameter(double inductance, double josephson_energy) {
    const double k = kTwoPi / physcore::constants().phi0;
    return inductance * josephson_energy * k * k;
}

double josephson_energy_for_bistability(double inductance, double beta_l) {
    if (!(inductance > 0)) throw ValidationError("inductance must be positive");
    const double k = kTwoPi / physcore::constants().phi0;
    return beta_l / (inductance * k * k);
}

double critical_current(double josephson_energy) {
    if (!(josephson_energy > 0)) throw ValidationError("Josephson energy must be positive");
    return kTwoPi * josephson_energy / physcore::constants().phi0;
}

double josephson_energy_from_critical_current(double critical_current) {
    if (!(critical_current > 0)) throw ValidationError("critical current must be positive");
    return critical_current * physcore::constants().phi0 / kTwoPi;
}

DoubleWellReport double_well_report(const HamiltonianSpec &spec, const FluxSpectrum &spectrum) {
    if (spectrum.energies.size() < 2) throw ValidationError("double-well report needs at least two levels");
    const auto &g = spectrum.grid;
    const int samples = std::max(20001, g.n_points * 4 + 1);
    const auto minima = find_potential_minima(spec, g.phi_min, g.phi_max, samples);
    if (minima.size() < 2) {
        throw ValidationError("monostable potential: " + std::to_string(minima.size()) +
                              " minimum in the grid window");
    }
    if (minima.size() > 2) {
        throw ValidationError("more than two minima in the grid window (" + std::to_string(minima.size()) + ")");
    }
    DoubleWellReport r;
    r.phi_a = minima[0];
    r.phi_b = minima[1];
    r.delta_phi = r.phi_b - r.phi_a;
    r.splitting = spectrum.energies[1] - spectrum.energies[0];
    const auto maxima = find_potential_maxima(spec, r.phi_a, r.phi_b, samples);
    double top = std::max(spec.potential(r.phi_a), spec.potential(r.phi_b));
    for (double m : maxima) top = std::max(top, spec.potential(m));
    r.barrier_height = top - std::max(spec.potential(r.phi_a), spec.potential(r.phi_b));
    return r;
}

WashboardReport washboard_analysis(double josephson_energy, double capacitance, double bias_current) {
    if (!(josephson_energy > 0)) throw ValidationError("Josephson energy must be positive");
    if (!(capacitance > 0)) throw ValidationError("capacitance must be positive");
    const double phi0 = physcore::constants().phi0;
    const double to_flux = phi0 / kTwoPi;
    WashboardReport r;
    r.bias_current = bias_current;
    r.critical_current = critical_current(josephson_energy);
    const double s = bias_current / r.critical_current;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(s) >= 1) {
        r.has_minimum = false;
        r.barrier_height = 0;
        if (std::abs(s) == 1) {
            r.phi_min = r.phi_max = -std::asin(s) * to_flux;
        } else {
            r.phi_min = r.phi_max = nan;
        }
        r.plasma_frequency = 0;
        return r;
    }
    // In units of the phase x = 2 pi phi / phi0: V = E_J (s x - cos x).
    const double a = std::asin(s);
    const double x_min = -a;
    const double x_max = s >= 0 ? -std::numbers::pi + a : std::numbers::pi + a;
    const double root = std::sqrt(1 - s * s);
    r.has_minimum = true;
    r.phi_min = x_min * to_flux;
    r.phi_max = x_max * to_flux;
    r.barrier_height =
        std::max(0.0, josephson_energy * (2 * root - std::abs(s) * (std::numbers::pi - 2 * std::asin(std::abs(s)))));
    const double k = kTwoPi / phi0;
    r.plasma_frequency = std::sqrt(josephson_energy * k * k * root / capacitance);
    return r;
}

FluxMatrixElement flux_matrix_element(const FluxSpectrum &spectrum) {
    if (spectrum.wavefunctions.size() < 2) throw ValidationError("flux matrix element needs at least two levels");
    const auto &g = spectrum.grid;
    const double h = g.spacing();
    const auto &p0 = spectrum.wavefunctions[0];
    const auto &p1 = spectrum.wavefunctions[1];
    FluxMatrixElement m;
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.point(i);
        m.off_diagonal += p0[i] * x * p1[i] * h;
        m.diagonal_0 += p0[i] * x * p0[i] * h;
        m.diagonal_1 += p1[i] * x * p1[i] * h;
    }
    m.off_diagonal = std::abs(m.off_diagonal);
    const double limit = 1e-6 * m.off_diagonal;
    if (std::abs(m.diagonal_0) > limit || std::abs(m.diagonal_1) > limit) {
        throw ValidationError("asymmetric potential: diagonal flux elements exceed 1e-6 of <0|phi|1>");
    }
    return m;
}

}  // namespace qtem::circuits
