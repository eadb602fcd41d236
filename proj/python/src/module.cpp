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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

#include "qtem/cavity.hpp"
#include "qtem/circuits/flux_solver.hpp"
#include "qtem/circuits/hamiltonian.hpp"
#include "qtem/circuits/netlist.hpp"
#include "qtem/circuits/potential.hpp"
#include "qtem/cli.hpp"
#include "qtem/error.hpp"
#include "qtem/optics.hpp"
#include "qtem/physcore.hpp"
#include "qtem/protocol.hpp"
#include "qtem/units.hpp"
#include "qtem/version.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using namespace qtem;

circuits::HamiltonianSpec circuit_spec(const std::string &netlist, std::optional<double> leff, bool half_flux,
                                       const std::string &bias_mode) {
    auto raw = circuits::build_hamiltonian(circuits::parse_netlist(netlist));
    bool has_linear = false;
    for (const auto &t : raw.terms) has_linear = has_linear || t.kind == circuits::TermKind::Linear;
    if (!has_linear && !leff && !half_flux) return raw;
    circuits::FluxBiasReduction r;
    if (bias_mode == "offset") {
        r.mode = circuits::FluxBiasReduction::Mode::Offset;
    } else if (bias_mode == "current") {
        r.mode = circuits::FluxBiasReduction::Mode::CurrentSource;
    } else if (bias_mode != "auto") {
        throw ValidationError("bias_mode must be auto, offset or current");
    }
    r.effective_inductance = leff;
    r.require_half_flux = half_flux;
    return circuits::reduce_flux_bias(raw, r);
}

py::dict spectrum(const std::string &netlist, int levels, int stencil, std::optional<double> leff, bool half_flux,
                  const std::string &bias_mode, bool check_refinement) {
    const auto spec = circuit_spec(netlist, leff, half_flux, bias_mode);
    circuits::SolverOptions o;
    o.n_levels = levels;
    o.stencil_order = stencil;
    o.check_refinement = check_refinement;
    const auto sp = [&] {
        py::gil_scoped_release release;
        return circuits::solve_flux_spectrum(spec, o);
    }();
    std::vector<std::string> parities;
    for (auto p : sp.parities) parities.emplace_back(circuits::parity_name(p));
    py::dict d("energies"_a = sp.energies, "parities"_a = parities, "phi"_a = sp.grid_points(),
               "wavefunctions"_a = sp.wavefunctions, "stencil_order"_a = sp.stencil_order,
               "refinement_change"_a = sp.refinement_change, "boundary_mass"_a = sp.boundary_mass,
               "hamiltonian"_a = spec.describe());
    try {
        const auto dw = circuits::double_well_report(spec, sp);
        d["double_well"] = py::dict("phi_a"_a = dw.phi_a, "phi_b"_a = dw.phi_b, "delta_phi"_a = dw.delta_phi,
                                    "splitting"_a = dw.splitting, "barrier_height"_a = dw.barrier_height);
    } catch (const ValidationError &) {
        d["double_well"] = py::none();
    }
    return d;
}

py::dict washboard(double ej, double c, double ib) {
    const auto w = circuits::washboard_analysis(ej, c, ib);
    return py::dict("bias_current"_a = w.bias_current, "critical_current"_a = w.critical_current,
                    "barrier_height"_a = w.barrier_height, "has_minimum"_a = w.has_minimum, "phi_min"_a = w.phi_min,
                    "phi_max"_a = w.phi_max, "plasma_frequency"_a = w.plasma_frequency);
}

py::dict dispersive(double fr, double fq, double lambda, int n_max) {
    const double two_pi = 2 * std::numbers::pi;
    const auto sys = cavity::JchSystem::from_lambda(two_pi * fr, two_pi * fq, lambda, n_max);
    const auto r = cavity::dispersive_transform(sys);
    return py::dict("lambda"_a = r.lambda, "delta"_a = r.delta, "g"_a = sys.g,
                    "qubit_shift_per_photon"_a = r.qubit_shift_per_photon, "resonator_pull"_a = r.resonator_pull,
                    "lamb_shift"_a = r.lamb_shift, "measured_shift_per_photon"_a = r.measured_shift_per_photon,
                    "max_residual"_a = r.max_residual, "max_transform_residual"_a = r.max_transform_residual);
}

py::dict dispersive_sweep(double fr, double fq, const std::vector<double> &lambdas, int n_max) {
    const double two_pi = 2 * std::numbers::pi;
    const auto base = cavity::JchSystem::from_lambda(two_pi * fr, two_pi * fq, 0, n_max);
    const auto pts = cavity::dispersive_sweep(base, lambdas);
    std::vector<double> res, op;
    for (const auto &p : pts) {
        res.push_back(p.max_residual);
        op.push_back(p.max_transform_residual);
    }
    return py::dict("lambda"_a = lambdas, "max_residual"_a = res, "max_transform_residual"_a = op,
                    "slope"_a = cavity::loglog_slope(lambdas, res), "transform_slope"_a = cavity::loglog_slope(lambdas, op));
}

py::dict beam(double kinetic_energy) {
    const auto b = optics::electron_kinematics(kinetic_energy);
    return py::dict("kinetic_energy"_a = b.kinetic_energy, "momentum"_a = b.momentum, "gamma"_a = b.gamma,
                    "beta"_a = b.beta, "velocity"_a = b.velocity, "wavelength"_a = b.wavelength);
}

optics::InteractionGeometry geometry(double d, std::optional<double> l, std::optional<double> drift) {
    optics::InteractionGeometry g;
    g.d = d;
    g.l = l.value_or(d);
    g.drift = drift;
    return g;
}

py::dict deflection_dict(const optics::DeflectionReport &r) {
    py::dict d("theta"_a = r.theta, "diffraction_spread"_a = r.diffraction_spread, "ratio"_a = r.ratio,
               "beam_shift"_a = r.beam_shift, "interaction_time"_a = r.interaction_time,
               "distinguishable"_a = r.distinguishable);
    if (r.work) d["work"] = *r.work;
    return d;
}

py::dict monte_carlo(int k, double delta, double eta, std::uint64_t trials, std::uint64_t seed, int workers,
                     std::uint64_t range_size, bool defer) {
    protocol::MonteCarloConfig c;
    c.k = k;
    c.delta = delta;
    c.eta = eta;
    c.trials = trials;
    c.seed = seed;
    c.workers = workers;
    c.range_size = range_size;
    c.defer_correction = defer;
    const auto r = [&] {
        py::gil_scoped_release release;
        return protocol::monte_carlo(c);
    }();
    return py::dict("k"_a = r.k, "delta"_a = r.delta, "eta"_a = r.eta, "trials"_a = r.trials,
                    "completed"_a = r.completed, "detections"_a = r.detections, "failures"_a = r.failures,
                    "detect_freq"_a = r.detect_freq, "detect_ci"_a = py::make_tuple(r.detect_ci.low, r.detect_ci.high),
                    "run_failure_freq"_a = r.run_failure_freq,
                    "failure_ci"_a = py::make_tuple(r.failure_ci.low, r.failure_ci.high), "analytic_p"_a = r.analytic_p,
                    "classical_p"_a = r.classical_p, "expected_failure"_a = r.expected_failure,
                    "rng_algorithm"_a = r.rng.algorithm, "seed"_a = r.rng.master_seed, "ranges"_a = r.ranges);
}

py::tuple run_cli(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        code = cli::run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_qtem, m) {
    m.doc() = "Circuit quantization, cavity, electron-optics and qubit-assisted TEM toolkit.";
    m.attr("__version__") = std::string(qtem::kVersion);

    static py::exception<qtem::Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<qtem::ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const qtem::ValidationError &e) {
            py::set_error(validation, e.what());
        } catch (const qtem::Error &e) {
            py::set_error(error, e.what());
        }
    });

    m.def("constants_json", [] { return qtem::physcore::constants_json(); });
    m.def("parse_as", &qtem::physcore::parse_as, "text"_a, "unit"_a, "allow_bare"_a = false,
          "Parses '<number><unit>' into the given unit.");

    m.def("spectrum", &spectrum, "netlist"_a, "levels"_a = 4, "stencil"_a = 8, "leff"_a = py::none(),
          "half_flux"_a = false, "bias_mode"_a = "auto", "check_refinement"_a = false,
          "Flux-space levels of a one-variable circuit given as netlist text.");
    m.def("bistability_parameter", &qtem::circuits::bistability_parameter, "inductance"_a, "josephson_energy"_a);
    m.def("josephson_energy_for_bistability", &qtem::circuits::josephson_energy_for_bistability, "inductance"_a,
          "beta_l"_a);
    m.def("critical_current", &qtem::circuits::critical_current, "josephson_energy"_a);
    m.def("washboard", &washboard, "josephson_energy"_a, "capacitance"_a, "bias_current"_a);

    m.def("dispersive", &dispersive, "fr"_a, "fq"_a, "lam"_a, "n_max"_a = 20,
          "Dispersive shifts and residuals; frequencies in Hz.");
    m.def("dispersive_sweep", &dispersive_sweep, "fr"_a, "fq"_a, "lambdas"_a, "n_max"_a = 8);
    m.def("regime_check", [](double t, double omega) {
        const auto r = qtem::cavity::regime_check(t, omega);
        return py::dict("thermal_uev"_a = r.thermal_uev, "photon_uev"_a = r.photon_uev, "gap_uev"_a = r.gap_uev,
                        "kt_ok"_a = r.kt_ok, "gap_ok"_a = r.gap_ok);
    }, "temperature"_a, "omega"_a);

    m.def("electron_kinematics", &beam, "kinetic_energy"_a);
    m.def("magnetic_deflection", [](double energy, double d, double flux, std::optional<double> l,
                                    std::optional<double> drift, const std::string &threshold) {
        return deflection_dict(qtem::optics::magnetic_deflection(qtem::optics::electron_kinematics(energy),
                                                                 geometry(d, l, drift), flux,
                                                                 qtem::optics::parse_threshold(threshold)));
    }, "energy"_a, "d"_a, "flux"_a, "l"_a = py::none(), "drift"_a = py::none(), "threshold"_a = "2phi0");
    m.def("electric_deflection", [](double energy, double d, double charge, std::optional<double> l,
                                    std::optional<double> drift) {
        return deflection_dict(qtem::optics::electric_deflection(qtem::optics::electron_kinematics(energy),
                                                                 geometry(d, l, drift), charge));
    }, "energy"_a, "d"_a, "charge"_a, "l"_a = py::none(), "drift"_a = py::none());
    m.def("work_estimate", [](double beta, double d) {
        const auto w = qtem::optics::work_estimate(beta, d);
        return py::dict("prefactor"_a = w.prefactor, "coulomb_energy"_a = w.coulomb_energy, "work"_a = w.work);
    }, "beta"_a, "d"_a);
    m.def("photons_for_magnetic", [](double z, const std::string &threshold) {
        return qtem::optics::photons_for_magnetic(z, qtem::optics::parse_threshold(threshold));
    }, "impedance"_a, "threshold"_a = "2phi0");
    m.def("electrons_for_deflection", &qtem::optics::electrons_for_deflection, "beta"_a);
    m.def("photons_for_electric", [](double z, double beta) {
        const auto e = qtem::optics::photons_for_electric(z, beta);
        return py::dict("photons"_a = e.photons, "ratio_to_magnetic"_a = e.ratio_to_magnetic);
    }, "impedance"_a, "beta"_a);
    m.def("radiation_budget", [](double t_hot, double t_shield, double area) {
        const auto r = qtem::optics::radiation_budget(t_hot, t_shield, area);
        return py::dict("hole_flux"_a = r.hole_flux, "shield_factor"_a = r.shield_factor, "wien_peak"_a = r.wien_peak);
    }, "t_hot"_a, "t_shield"_a, "aperture_area"_a);

    m.def("detection_probability", &qtem::protocol::detection_probability, "k"_a, "delta"_a);
    m.def("classical_detection_probability", &qtem::protocol::classical_detection_probability, "k"_a, "delta"_a);
    m.def("enumerate_outcomes", [](int k, double delta, bool defer) {
        const auto e = qtem::protocol::enumerate_outcomes(k, delta, {defer});
        return py::dict("p_one"_a = e.p_one, "total_probability"_a = e.total_probability,
                        "max_phase_error"_a = e.max_phase_error, "max_marginal_error"_a = e.max_marginal_error,
                        "branches"_a = e.branches);
    }, "k"_a, "delta"_a, "defer_correction"_a = false);
    m.def("monte_carlo", &monte_carlo, "k"_a, "delta"_a, "eta"_a = 1.0, "trials"_a = 100000, "seed"_a = 0,
          "workers"_a = 0, "range_size"_a = 65536, "defer_correction"_a = false);
    m.def("cnot_role_reversal_error", [] { return qtem::protocol::cnot_role_reversal_check().max_elementwise_error; });

    m.def("run_cli", &run_cli, "args"_a, "Runs the command line; returns (exit_code, stdout, stderr).");
}
