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

#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
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

namespace qtem::cli {

namespace {

using json = nlohmann::ordered_json;
namespace pc = physcore;

const pc::PhysConstants &K() {
    return pc::constants();
}

double to_ghz(double joules) {
    return joules / K().h / 1e9;
}

double to_uev(double joules) {
    return joules / K().e * 1e6;
}

json energy_json(double joules) {
    return {{"J", joules}, {"GHz", to_ghz(joules)}, {"ueV", to_uev(joules)}};
}

/// Parses a unit-suffixed value into SI, expressed in `unit`.
double qty(const std::string &text, std::string_view unit, bool allow_bare = false) {
    return pc::parse_as(text, unit, allow_bare);
}

std::optional<double> opt_qty(const std::string &text, std::string_view unit, bool allow_bare = false) {
    if (text.empty()) return std::nullopt;
    return qty(text, unit, allow_bare);
}

std::string resolve_format(const GlobalOptions &g, const char *fallback) {
    return g.format.empty() ? fallback : g.format;
}

/// Comma-separated rows; numbers are written with round-trip precision.
class Csv {
   public:
    explicit Csv(std::initializer_list<const char *> header) {
        bool first = true;
        for (const char *h : header) {
            if (!first) os_ << ',';
            os_ << h;
            first = false;
        }
        os_ << '\n';
        columns_ = header.size();
    }

    Csv &num(double v) {
        sep();
        os_ << format_double(v);
        return *this;
    }
    Csv &integer(long long v) {
        sep();
        os_ << v;
        return *this;
    }
    Csv &text(std::string_view v) {
        sep();
        os_ << v;
        return *this;
    }
    Csv &empty() {
        sep();
        return *this;
    }
    void end() {
        if (cell_ != columns_) throw Error("internal: CSV row has " + std::to_string(cell_) + " cells");
        os_ << '\n';
        cell_ = 0;
    }
    std::string str() const {
        return os_.str();
    }

   private:
    void sep() {
        if (cell_++ > 0) os_ << ',';
    }

    std::ostringstream os_;
    std::size_t columns_ = 0;
    std::size_t cell_ = 0;
};

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string dump(const json &j) {
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Shared circuit options (spectrum, couple).

struct CircuitOptions {
    std::string netlist;
    int levels = 4;
    std::string grid = "auto";
    int stencil = 8;
    std::string leff;
    std::string bias_mode = "auto";
    bool exact_half_flux = false;
    bool check_refinement = false;
    int max_points = 64001;

    void add(CLI::App *sub, int default_levels) {
        levels = default_levels;
        sub->add_option("netlist", netlist, "Circuit netlist file")->required();
        sub->add_option("--levels", levels, "Number of levels")->capture_default_str();
        sub->add_option("--grid", grid, "auto, or phi_min,phi_max,n (e.g. -1.5phi0,1.5phi0,4001)")
            ->capture_default_str();
        sub->add_option("--stencil", stencil, "Finite-difference order")
            ->check(CLI::IsMember({2, 4, 6, 8}))
            ->capture_default_str();
        sub->add_option("--leff", leff, "Effective inductance replacing L (e.g. 1nH)");
        sub->add_option("--bias-mode", bias_mode, "Flux-bias reduction")
            ->check(CLI::IsMember({"auto", "offset", "current"}))
            ->capture_default_str();
        sub->add_flag("--exact-half-flux", exact_half_flux, "Fail unless the bias sits at half a flux quantum");
        sub->add_flag("--check-refinement", check_refinement, "Grid-doubling check for an explicit grid");
        sub->add_option("--max-points", max_points, "Refinement limit")->capture_default_str();
    }

    json params() const {
        json p;
        p["netlist"] = netlist;
        p["levels"] = levels;
        p["grid"] = grid;
        p["stencil"] = stencil;
        p["leff_H"] = leff.empty() ? json(nullptr) : json(qty(leff, "H"));
        p["bias_mode"] = bias_mode;
        p["exact_half_flux"] = exact_half_flux;
        p["check_refinement"] = check_refinement;
        p["max_points"] = max_points;
        return p;
    }
};

std::optional<circuits::GridConfig> parse_grid(const std::string &text) {
    if (text == "auto") return std::nullopt;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 3) throw ValidationError("--grid expects auto or phi_min,phi_max,n");
    circuits::GridConfig g;
    g.phi_min = qty(parts[0], "Wb");
    g.phi_max = qty(parts[1], "Wb");
    try {
        std::size_t used = 0;
        g.n_points = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
        throw ValidationError("grid point count '" + parts[2] + "' is not an integer");
    }
    g.validate();
    return g;
}

struct SolvedCircuit {
    circuits::CircuitNetlist net;
    circuits::HamiltonianSpec raw;
    circuits::HamiltonianSpec spec;
    circuits::FluxSpectrum spectrum;
};

SolvedCircuit solve_circuit(const CircuitOptions &o) {
    SolvedCircuit s;
    s.net = circuits::parse_netlist(read_file(o.netlist));
    s.raw = circuits::build_hamiltonian(s.net);
    if (s.raw.num_variables() != 1) {
        throw ValidationError("this command needs a single dynamical variable; the netlist has " +
                              std::to_string(s.raw.num_variables()));
    }
    bool has_linear = false;
    for (const auto &t : s.raw.terms) has_linear = has_linear || t.kind == circuits::TermKind::Linear;
    s.spec = s.raw;
    if (has_linear || !o.leff.empty() || o.exact_half_flux) {
        circuits::FluxBiasReduction r;
        if (o.bias_mode == "offset") r.mode = circuits::FluxBiasReduction::Mode::Offset;
        if (o.bias_mode == "current") r.mode = circuits::FluxBiasReduction::Mode::CurrentSource;
        if (!o.leff.empty()) r.effective_inductance = qty(o.leff, "H");
        r.require_half_flux = o.exact_half_flux;
        s.spec = circuits::reduce_flux_bias(s.raw, r);
    }
    circuits::SolverOptions so;
    so.n_levels = o.levels;
    so.grid = parse_grid(o.grid);
    so.stencil_order = o.stencil;
    so.check_refinement = o.check_refinement;
    so.max_points = o.max_points;
    s.spectrum = circuits::solve_flux_spectrum(s.spec, so);
    return s;
}

json terms_json(const circuits::HamiltonianSpec &spec) {
    json arr = json::array();
    for (const auto &t : spec.terms) {
        json j;
        j["kind"] = std::string(circuits::term_kind_name(t.kind));
        j["var"] = spec.variables.at(t.var);
        if (t.var2 >= 0) j["var2"] = spec.variables.at(t.var2);
        j["value"] = t.value;
        if (t.kind == circuits::TermKind::Josephson) j["offset_Wb"] = t.offset;
        j["origin"] = t.origin;
        arr.push_back(j);
    }
    return arr;
}

// ---------------------------------------------------------------------------

void add_spectrum(CLI::App &app, Registry &reg) {
    auto o = std::make_shared<CircuitOptions>();
    auto wavefunctions = std::make_shared<bool>(false);
    auto *sub = app.add_subcommand("spectrum", "Flux-space energy levels of a one-variable circuit");
    o->add(sub, 4);
    sub->add_flag("--wavefunctions", *wavefunctions, "Include grid wavefunctions in JSON output");

    reg["spectrum"] = [o, wavefunctions](const GlobalOptions &g) {
        const SolvedCircuit s = solve_circuit(*o);
        const auto &sp = s.spectrum;
        const std::string format = resolve_format(g, "csv");
        CommandResult r;
        r.command = "spectrum";
        r.parameters = o->params();
        r.parameters["wavefunctions"] = *wavefunctions;
        r.parameters["format"] = format;

        if (format == "csv") {
            Csv csv{"level", "energy_J", "energy_GHz", "parity"};
            for (std::size_t i = 0; i < sp.energies.size(); ++i) {
                csv.integer(static_cast<long long>(i))
                    .num(sp.energies[i])
                    .num(to_ghz(sp.energies[i]))
                    .text(circuits::parity_name(sp.parities[i]))
                    .end();
            }
            r.body = csv.str();
            return r;
        }
        json j;
        j["hamiltonian"] = s.spec.describe();
        j["terms"] = terms_json(s.spec);
        j["notes"] = s.spec.notes;
        j["dropped_constant_J"] = s.spec.dropped_constant;
        json levels = json::array();
        for (std::size_t i = 0; i < sp.energies.size(); ++i) {
            levels.push_back({{"level", i},
                              {"energy_J", sp.energies[i]},
                              {"energy_GHz", to_ghz(sp.energies[i])},
                              {"parity", std::string(circuits::parity_name(sp.parities[i]))}});
        }
        j["levels"] = levels;
        j["grid"] = {{"phi_min_Wb", sp.grid.phi_min}, {"phi_max_Wb", sp.grid.phi_max}, {"n_points", sp.grid.n_points}};
        j["stencil_order"] = sp.stencil_order;
        j["refinement"] = {{"checked", sp.refinement_checked}, {"max_relative_change", sp.refinement_change}};
        j["boundary_mass"] = sp.boundary_mass;
        try {
            const auto dw = circuits::double_well_report(s.spec, sp);
            j["double_well"] = {{"phi_A_Wb", dw.phi_a},
                                {"phi_B_Wb", dw.phi_b},
                                {"delta_phi_Wb", dw.delta_phi},
                                {"delta_phi_over_phi0", dw.delta_phi / K().phi0},
                                {"splitting", energy_json(dw.splitting)},
                                {"barrier", energy_json(dw.barrier_height)}};
        } catch (const ValidationError &e) {
            j["double_well"] = nullptr;
            j["double_well_note"] = e.what();
        }
        if (sp.energies.size() >= 2 && circuits::is_symmetric(s.spec, sp.grid)) {
            try {
                const auto m = circuits::flux_matrix_element(sp);
                j["flux_matrix_element"] = {
                    {"off_diagonal_Wb", m.off_diagonal}, {"diagonal_0_Wb", m.diagonal_0}, {"diagonal_1_Wb", m.diagonal_1}};
            } catch (const ValidationError &e) {
                j["flux_matrix_element"] = nullptr;
            }
        } else {
            j["flux_matrix_element"] = nullptr;
        }
        if (*wavefunctions) {
            j["phi_Wb"] = sp.grid_points();
            j["psi"] = sp.wavefunctions;
        }
        r.body = dump(j);
        return r;
    };
}

// ---------------------------------------------------------------------------

std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(qty(item, "", true));
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

json dispersive_json(const cavity::JchSystem &sys, const cavity::DispersiveReport &d) {
    json j;
    j["omega_r_rad_s"] = sys.omega_r;
    j["omega_q_rad_s"] = sys.omega_q;
    j["n_max"] = sys.n_max;
    j["lambda"] = d.lambda;
    j["g"] = energy_json(sys.g);
    j["delta"] = energy_json(d.delta);
    j["qubit_shift_per_photon"] = energy_json(d.qubit_shift_per_photon);
    j["resonator_pull"] = energy_json(d.resonator_pull);
    j["lamb_shift"] = energy_json(d.lamb_shift);
    j["measured_shift_per_photon"] = energy_json(d.measured_shift_per_photon);
    j["max_residual"] = energy_json(d.max_residual);
    j["max_transform_residual"] = energy_json(d.max_transform_residual);
    json blocks = json::array();
    for (const auto &b : d.blocks) {
        blocks.push_back({{"n", b.n},
                          {"exact_low_J", b.exact_low},
                          {"exact_high_J", b.exact_high},
                          {"eff_low_J", b.eff_low},
                          {"eff_high_J", b.eff_high},
                          {"residual_J", b.residual},
                          {"transform_residual_J", b.transform_residual}});
    }
    j["blocks"] = blocks;
    return j;
}

void add_dispersive(CLI::App &app, Registry &reg) {
    struct Opts {
        std::string fr, fq, lambda, g, sweep;
        int nmax = 20;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("dispersive", "Jaynes-Cummings dispersive shifts and residuals");
    sub->add_option("--fr", o->fr, "Resonator frequency (e.g. 5GHz)")->required();
    sub->add_option("--fq", o->fq, "Qubit frequency (e.g. 6GHz)")->required();
    auto *lam = sub->add_option("--lambda", o->lambda, "Dimensionless coupling lambda");
    auto *gopt = sub->add_option("--g", o->g, "Coupling energy g = lambda Delta (e.g. 10MHz)");
    auto *sweep = sub->add_option("--sweep", o->sweep, "Comma-separated lambda values (CSV residual table)");
    lam->excludes(gopt);
    sweep->excludes(gopt);
    sub->add_option("--nmax", o->nmax, "Fock cutoff")->capture_default_str();

    reg["dispersive"] = [o](const GlobalOptions &g) {
        cavity::JchSystem base;
        base.omega_r = 2 * std::numbers::pi * qty(o->fr, "Hz");
        base.omega_q = 2 * std::numbers::pi * qty(o->fq, "Hz");
        base.n_max = o->nmax;
        CommandResult r;
        r.command = "dispersive";
        r.parameters = {{"fr_Hz", base.omega_r / (2 * std::numbers::pi)},
                        {"fq_Hz", base.omega_q / (2 * std::numbers::pi)},
                        {"nmax", o->nmax}};

        if (!o->sweep.empty()) {
            const auto lambdas = parse_list(o->sweep);
            const std::string format = resolve_format(g, "csv");
            r.parameters["sweep"] = lambdas;
            r.parameters["format"] = format;
            const auto pts = cavity::dispersive_sweep(base, lambdas);
            std::vector<double> res, tres;
            for (const auto &p : pts) {
                res.push_back(p.max_residual);
                tres.push_back(p.max_transform_residual);
            }
            const bool fit = lambdas.size() >= 2;
            const double slope = fit ? cavity::loglog_slope(lambdas, res) : std::nan("");
            const double tslope = fit ? cavity::loglog_slope(lambdas, tres) : std::nan("");
            if (format == "csv") {
                Csv csv{"lambda", "max_residual_J", "max_transform_residual_J", "fitted_slope", "transform_slope"};
                for (const auto &p : pts) {
                    csv.num(p.lambda).num(p.max_residual).num(p.max_transform_residual).num(slope).num(tslope).end();
                }
                r.body = csv.str();
            } else {
                json arr = json::array();
                for (const auto &p : pts) {
                    arr.push_back({{"lambda", p.lambda},
                                   {"max_residual_J", p.max_residual},
                                   {"max_transform_residual_J", p.max_transform_residual}});
                }
                r.body = dump({{"points", arr}, {"fitted_slope", slope}, {"transform_slope", tslope}});
            }
            return r;
        }

        cavity::JchSystem sys = base;
        if (!o->g.empty()) {
            sys.g = qty(o->g, "J");
            r.parameters["g_J"] = sys.g;
        } else {
            const double lam = o->lambda.empty() ? 0.0 : qty(o->lambda, "", true);
            sys = cavity::JchSystem::from_lambda(base.omega_r, base.omega_q, lam, base.n_max);
            r.parameters["lambda"] = lam;
        }
        const auto d = cavity::dispersive_transform(sys);
        const std::string format = resolve_format(g, "json");
        r.parameters["format"] = format;
        if (format == "csv") {
            Csv csv{"n", "level_exact_J", "level_eff_J", "residual_J"};
            for (const auto &b : d.blocks) {
                csv.integer(b.n).num(b.exact_low).num(b.eff_low).num(std::abs(b.exact_low - b.eff_low)).end();
                csv.integer(b.n).num(b.exact_high).num(b.eff_high).num(std::abs(b.exact_high - b.eff_high)).end();
            }
            r.body = csv.str();
        } else {
            r.body = dump(dispersive_json(sys, d));
        }
        return r;
    };
}

// ---------------------------------------------------------------------------

void add_couple(CLI::App &app, Registry &reg) {
    struct Opts {
        CircuitOptions circuit;
        std::string fr, zr, lc, leff_r;
        int nmax = 20;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("couple", "Jaynes-Cummings parameters of a resonator coupled to a qubit circuit");
    o->circuit.add(sub, 2);
    sub->add_option("--fr", o->fr, "Resonator frequency (e.g. 5GHz)")->required();
    sub->add_option("--zr", o->zr, "Resonator impedance (e.g. 377ohm)")->required();
    sub->add_option("--lc", o->lc, "Coupling inductance L_c (e.g. 50nH)")->required();
    sub->add_option("--leff-r", o->leff_r, "Effective resonator inductance (default L_r)");
    sub->add_option("--nmax", o->nmax, "Fock cutoff")->capture_default_str();

    reg["couple"] = [o](const GlobalOptions &g) {
        if (o->circuit.levels < 2) throw ValidationError("couple needs at least two qubit levels");
        const SolvedCircuit s = solve_circuit(o->circuit);
        auto res = cavity::ResonatorParams::from_frequency(qty(o->fr, "Hz"), qty(o->zr, "ohm"));
        res.effective_inductance = opt_qty(o->leff_r, "H");
        const double lc = qty(o->lc, "H");
        const auto sys = cavity::extract_jch_params(res, s.spectrum, lc, o->nmax);
        const auto m = circuits::flux_matrix_element(s.spectrum);

        CommandResult r;
        r.command = "couple";
        r.parameters = o->circuit.params();
        r.parameters["fr_Hz"] = res.omega() / (2 * std::numbers::pi);
        r.parameters["zr_ohm"] = res.impedance();
        r.parameters["lc_H"] = lc;
        r.parameters["leff_r_H"] = res.effective_inductance ? json(*res.effective_inductance) : json(nullptr);
        r.parameters["nmax"] = o->nmax;
        r.parameters["format"] = "json";
        if (resolve_format(g, "json") != "json") throw ValidationError("couple only writes JSON");

        json j;
        j["resonator"] = {{"L_r_H", res.inductance},
                          {"C_r_F", res.capacitance},
                          {"omega_r_rad_s", res.omega()},
                          {"Z_r_ohm", res.impedance()},
                          {"phi_zpf_Wb", res.phi_zpf()}};
        j["qubit"] = {{"omega_q_rad_s", sys.omega_q},
                      {"f_q_GHz", sys.omega_q / (2 * std::numbers::pi) / 1e9},
                      {"flux_matrix_element_Wb", m.off_diagonal},
                      {"two_level_truncation", "qubit restricted to its lowest two flux eigenstates"}};
        j["g"] = energy_json(sys.g);
        j["delta"] = energy_json(sys.delta());
        if (sys.delta() == 0) {
            j["lambda"] = nullptr;
            j["lambda_note"] = "resonant: lambda undefined, g reported";
        } else {
            j["lambda"] = sys.lambda();
            try {
                j["dispersive"] = dispersive_json(sys, cavity::dispersive_transform(sys));
            } catch (const ValidationError &e) {
                j["dispersive"] = nullptr;
                j["dispersive_note"] = e.what();
            }
        }
        r.body = dump(j);
        return r;
    };
}

// ---------------------------------------------------------------------------

struct BeamOptions {
    std::string energy;
    std::string d = "1um";
    std::string l;
    std::string drift;
    std::string flux;
    std::string charge;
    std::string threshold = "2phi0";
    std::string tau;
    std::string fr;

    void add(CLI::App *sub, bool energy_required) {
        auto *e = sub->add_option("--energy", energy, "Electron kinetic energy (e.g. 100eV, 300keV)");
        if (energy_required) e->required();
        sub->add_option("--d", d, "Transverse width d")->capture_default_str();
        sub->add_option("--l", l, "Length along the beam (default d)");
        sub->add_option("--drift", drift, "Flight distance for the beam shift (e.g. 100mm)");
        sub->add_option("--flux", flux, "Loop flux (e.g. 1phi0)");
        sub->add_option("--charge", charge, "Plate charge (e.g. 53e), or 'ne' for the lambda/d count");
        sub->add_option("--threshold", threshold, "Flux threshold: 2phi0 or phi0")->capture_default_str();
        sub->add_option("--tau", tau, "Electron pulse width (which-way report)");
        sub->add_option("--fr", fr, "Resonator frequency (which-way report)");
    }

    optics::InteractionGeometry geometry() const {
        optics::InteractionGeometry g;
        g.d = qty(d, "m");
        g.l = l.empty() ? g.d : qty(l, "m");
        g.drift = opt_qty(drift, "m");
        g.validate();
        return g;
    }

    double charge_value(const optics::BeamParameters &beam) const {
        if (charge == "ne") return optics::electrons_for_deflection(beam.beta) * K().e;
        return qty(charge, "C");
    }
};

json beam_json(const optics::BeamParameters &b) {
    json j = {{"kinetic_energy_J", b.kinetic_energy},
              {"kinetic_energy_eV", b.kinetic_energy / K().e},
              {"momentum_kg_m_s", b.momentum},
              {"beta", b.beta},
              {"gamma", b.gamma},
              {"velocity_m_s", b.velocity},
              {"wavelength_m", b.wavelength},
              {"wavelength_A", b.wavelength * 1e10}};
    return j;
}

json deflection_json(const optics::DeflectionReport &d) {
    json j = {{"theta_rad", d.theta},
              {"diffraction_spread_rad", d.diffraction_spread},
              {"distinguishability_ratio", d.ratio},
              {"beam_shift_m", d.beam_shift ? json(*d.beam_shift) : json(nullptr)},
              {"beam_shift_um", d.beam_shift ? json(*d.beam_shift * 1e6) : json(nullptr)},
              {"interaction_time_s", d.interaction_time},
              {"distinguishable", d.distinguishable}};
    if (d.flux_over_threshold) j["flux_over_threshold"] = *d.flux_over_threshold;
    if (d.work) j["work"] = energy_json(*d.work);
    return j;
}

void add_deflect(CLI::App &app, Registry &reg) {
    auto o = std::make_shared<BeamOptions>();
    auto *sub = app.add_subcommand("deflect", "Magnetic or electric deflection of a passing electron");
    o->add(sub, true);

    reg["deflect"] = [o](const GlobalOptions &g) {
        if (o->flux.empty() == o->charge.empty()) throw ValidationError("give exactly one of --flux or --charge");
        if (resolve_format(g, "json") != "json") throw ValidationError("deflect only writes JSON");
        const auto beam = optics::electron_kinematics(qty(o->energy, "J"), opt_qty(o->tau, "s"));
        const auto geom = o->geometry();
        const auto threshold = optics::parse_threshold(o->threshold);

        CommandResult r;
        r.command = "deflect";
        r.parameters = {{"energy_J", beam.kinetic_energy},
                        {"d_m", geom.d},
                        {"l_m", geom.l},
                        {"drift_m", geom.drift ? json(*geom.drift) : json(nullptr)},
                        {"threshold", std::string(optics::threshold_name(threshold))},
                        {"tau_s", beam.pulse_width ? json(*beam.pulse_width) : json(nullptr)},
                        {"fr_Hz", o->fr.empty() ? json(nullptr) : json(qty(o->fr, "Hz"))},
                        {"format", "json"}};
        json j;
        j["beam"] = beam_json(beam);
        j["geometry"] = {{"d_m", geom.d}, {"l_m", geom.l}};
        double work = 0;
        if (!o->flux.empty()) {
            const double flux = qty(o->flux, "Wb");
            r.parameters["flux_Wb"] = flux;
            const auto d = optics::magnetic_deflection(beam, geom, flux, threshold);
            j["field"] = "magnetic";
            j["flux_Wb"] = flux;
            j["flux_over_phi0"] = flux / K().phi0;
            j["threshold"] = std::string(optics::threshold_name(threshold));
            j["deflection"] = deflection_json(d);
        } else {
            const double q = o->charge_value(beam);
            r.parameters["charge_C"] = q;
            const auto d = optics::electric_deflection(beam, geom, q);
            const auto w = optics::work_estimate(beam.beta, geom.d);
            work = *d.work;
            j["field"] = "electric";
            j["charge_C"] = q;
            j["charge_over_e"] = q / K().e;
            j["electrons_for_deflection"] = optics::electrons_for_deflection(beam.beta);
            j["deflection"] = deflection_json(d);
            j["work_estimate"] = {{"prefactor", w.prefactor},
                                  {"coulomb_energy", energy_json(w.coulomb_energy)},
                                  {"coulomb_energy_meV", w.coulomb_energy / K().e * 1e3},
                                  {"work", energy_json(w.work)}};
        }
        if (beam.pulse_width && !o->fr.empty()) {
            const auto ww = optics::which_way_report(*beam.pulse_width, 2 * std::numbers::pi * qty(o->fr, "Hz"), work);
            j["which_way"] = {{"energy_uncertainty", energy_json(ww.energy_uncertainty)},
                              {"photon_energy", energy_json(ww.photon_energy)},
                              {"work", energy_json(ww.work)},
                              {"energy_ratio", ww.energy_ratio},
                              {"work_ratio", ww.work_ratio},
                              {"margin", optics::kWhichWayMargin},
                              {"energy_ok", ww.energy_ok},
                              {"work_ok", ww.work_ok},
                              {"hides_which_way", ww.hides_which_way}};
        }
        r.body = dump(j);
        return r;
    };
}

// ---------------------------------------------------------------------------

void add_budget(CLI::App &app, Registry &reg) {
    struct Opts {
        std::string zr = "376.730313668ohm";
        std::string beta;
        std::string energy = "300keV";
        std::string threshold = "2phi0";
        std::string t_hot = "300K";
        std::string t_shield = "60K";
        std::string aperture = "10um";
        std::string temperature;
        std::string fr;
    };
    auto o = std::make_shared<Opts>();
    auto *sub = app.add_subcommand("budget", "Photon, plate-charge and radiation budgets");
    sub->add_option("--zr", o->zr, "Resonator impedance")->capture_default_str();
    auto *b = sub->add_option("--beta", o->beta, "Electron v/c (overrides --energy)");
    sub->add_option("--energy", o->energy, "Electron kinetic energy")->capture_default_str()->excludes(b);
    sub->add_option("--threshold", o->threshold, "Flux threshold: 2phi0 or phi0")->capture_default_str();
    sub->add_option("--thot", o->t_hot, "Hot-side temperature")->capture_default_str();
    sub->add_option("--tshield", o->t_shield, "Shield temperature (0K: no shield factor)")->capture_default_str();
    sub->add_option("--aperture", o->aperture, "Side of the square aperture")->capture_default_str();
    sub->add_option("--temperature", o->temperature, "Operating temperature for the regime check (e.g. 20mK)");
    sub->add_option("--fr", o->fr, "Resonator frequency for the regime check (e.g. 5GHz)");

    reg["budget"] = [o](const GlobalOptions &g) {
        if (resolve_format(g, "json") != "json") throw ValidationError("budget only writes JSON");
        const double zr = qty(o->zr, "ohm");
        const double beta =
            o->beta.empty() ? optics::electron_kinematics(qty(o->energy, "J")).beta : qty(o->beta, "", true);
        const auto threshold = optics::parse_threshold(o->threshold);
        const double t_hot = qty(o->t_hot, "K");
        const double t_shield = qty(o->t_shield, "K");
        const double side = qty(o->aperture, "m");

        CommandResult r;
        r.command = "budget";
        r.parameters = {{"zr_ohm", zr},
                        {"beta", beta},
                        {"threshold", std::string(optics::threshold_name(threshold))},
                        {"t_hot_K", t_hot},
                        {"t_shield_K", t_shield},
                        {"aperture_m", side},
                        {"format", "json"}};
        const double n_mag = optics::photons_for_magnetic(zr, threshold);
        const auto n_el = optics::photons_for_electric(zr, beta);
        json j;
        j["photons"] = {{"Z_r_ohm", zr},
                        {"beta", beta},
                        {"n_photons_magnetic", n_mag},
                        {"n_electrons_plate", optics::electrons_for_deflection(beta)},
                        {"n_photons_electric", n_el.photons},
                        {"electric_to_magnetic_ratio", n_el.ratio_to_magnetic},
                        {"two_R_K_over_Z0", 2 * K().R_K / K().Z0},
                        {"inverse_alpha", 1 / K().alpha}};
        const auto rad = optics::radiation_budget(t_hot, t_shield, side * side);
        j["radiation"] = {{"hole_flux_W", rad.hole_flux},
                          {"hole_flux_nW", rad.hole_flux * 1e9},
                          {"shield_factor", rad.shield_factor ? json(*rad.shield_factor) : json(nullptr)},
                          {"wien_peak_m", rad.wien_peak},
                          {"wien_peak_um", rad.wien_peak * 1e6}};
        if (!o->temperature.empty() || !o->fr.empty()) {
            if (o->temperature.empty() || o->fr.empty()) {
                throw ValidationError("the regime check needs both --temperature and --fr");
            }
            const double t = qty(o->temperature, "K");
            const double w = 2 * std::numbers::pi * qty(o->fr, "Hz");
            r.parameters["temperature_K"] = t;
            r.parameters["fr_Hz"] = w / (2 * std::numbers::pi);
            const auto rc = cavity::regime_check(t, w);
            j["regime"] = {{"thermal_ueV", rc.thermal_uev},
                           {"photon_ueV", rc.photon_uev},
                           {"gap_ueV", rc.gap_uev},
                           {"kT_ok", rc.kt_ok},
                           {"gap_ok", rc.gap_ok},
                           {"kT_margin_ueV", rc.kt_margin_uev},
                           {"gap_margin_ueV", rc.gap_margin_uev}};
        }
        r.body = dump(j);
        return r;
    };
}

// ---------------------------------------------------------------------------

struct ProtocolOpts {
    int k = 1;
    std::string delta = "0";
    double eta = 1;
    std::uint64_t trials = 0;
    int workers = 0;
    std::uint64_t range_size = 65536;
    bool defer = false;

    void add(CLI::App *sub, bool k_required) {
        auto *ko = sub->add_option("--k", k, "Electrons per measurement");
        if (k_required) ko->required();
        sub->add_option("--delta", delta, "Specimen phase per pass (rad)")->capture_default_str();
        sub->add_option("--eta", eta, "Detector efficiency")->capture_default_str();
        sub->add_option("--trials", trials, "Monte Carlo trials (0: analytic only)")->capture_default_str();
        sub->add_option("--workers", workers, "Worker threads (0: all cores)")->capture_default_str();
        sub->add_option("--range-size", range_size, "Trials per seeded range")->capture_default_str();
        sub->add_flag("--defer-correction", defer, "Apply the phase correction once before readout");
    }
};

const std::initializer_list<const char *> kProtocolHeader = {
    "k", "delta", "eta", "analytic_p", "classical_p", "mc_freq", "mc_ci_low", "mc_ci_high", "failure_freq", "trials",
    "seed"};

void protocol_row(Csv &csv, const protocol::MCReport &m, std::uint64_t seed, std::optional<double> ratio = {}) {
    csv.integer(m.k).num(m.delta).num(m.eta).num(m.analytic_p).num(m.classical_p);
    if (m.trials > 0 && m.completed > 0) {
        csv.num(m.detect_freq).num(m.detect_ci.low).num(m.detect_ci.high);
    } else {
        csv.empty().empty().empty();
    }
    if (m.trials > 0) {
        csv.num(m.run_failure_freq);
    } else {
        csv.empty();
    }
    csv.integer(static_cast<long long>(m.trials)).integer(static_cast<long long>(seed));
    if (ratio) csv.num(*ratio);
    csv.end();
}

protocol::MCReport protocol_point(const ProtocolOpts &o, int k, double delta, double eta, std::uint64_t seed) {
    protocol::MonteCarloConfig c;
    c.k = k;
    c.delta = delta;
    c.eta = eta;
    c.trials = o.trials;
    c.seed = seed;
    c.workers = o.workers;
    c.range_size = o.range_size;
    c.defer_correction = o.defer;
    return protocol::monte_carlo(c);
}

void add_protocol(CLI::App &app, Registry &reg) {
    auto o = std::make_shared<ProtocolOpts>();
    auto *sub = app.add_subcommand("protocol", "k-electron qubit-assisted measurement: analytic and Monte Carlo");
    o->add(sub, true);

    reg["protocol"] = [o](const GlobalOptions &g) {
        const double delta = qty(o->delta, "rad", true);
        const auto m = protocol_point(*o, o->k, delta, o->eta, g.seed);
        const std::string format = resolve_format(g, "csv");
        CommandResult r;
        r.command = "protocol";
        r.parameters = {{"k", o->k},
                        {"delta_rad", delta},
                        {"eta", o->eta},
                        {"trials", o->trials},
                        {"range_size", o->range_size},
                        {"defer_correction", o->defer},
                        {"seed", g.seed},
                        {"format", format}};
        if (format == "csv") {
            Csv csv(kProtocolHeader);
            protocol_row(csv, m, g.seed);
            r.body = csv.str();
            return r;
        }
        const auto ds = protocol::detection_summary(o->k, delta);
        json j;
        j["k"] = m.k;
        j["delta"] = m.delta;
        j["eta"] = m.eta;
        j["trials"] = m.trials;
        j["analytic_p"] = m.analytic_p;
        j["classical_p"] = m.classical_p;
        j["analytic_small_delta"] = ds.quantum_small;
        j["classical_small_delta"] = ds.classical_small;
        j["classical_linear"] = ds.classical_linear;
        j["quantum_classical_ratio"] = ds.ratio;
        if (m.trials > 0) {
            j["completed"] = m.completed;
            j["detections"] = m.detections;
            j["failures"] = m.failures;
            j["detect_freq"] = m.completed > 0 ? json(m.detect_freq) : json(nullptr);
            j["detect_ci"] = {m.detect_ci.low, m.detect_ci.high};
            j["run_failure_freq"] = m.run_failure_freq;
            j["failure_ci"] = {m.failure_ci.low, m.failure_ci.high};
            j["expected_failure"] = m.expected_failure;
            j["all_failed"] = m.all_failed;
            j["ranges"] = m.ranges;
        }
        j["rng"] = {{"algorithm", m.rng.algorithm},
                    {"master_seed", m.rng.master_seed},
                    {"stream_index", "range index"},
                    {"range_size", o->range_size}};
        j["empty_pulses"] = "not modeled";
        r.body = dump(j);
        return r;
    };
}

// ---------------------------------------------------------------------------

json matrix_json(const Eigen::Matrix4d &m) {
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int jj = 0; jj < 4; ++jj) row.push_back(m(i, jj));
        rows.push_back(row);
    }
    return rows;
}

void add_qnd(CLI::App &app, Registry &reg) {
    app.add_subcommand("qnd-check", "CNOT control/target reversal in the symmetric/antisymmetric basis");
    reg["qnd-check"] = [](const GlobalOptions &g) {
        if (resolve_format(g, "json") != "json") throw ValidationError("qnd-check only writes JSON");
        const auto c = protocol::cnot_role_reversal_check();
        CommandResult r;
        r.command = "qnd-check";
        r.parameters = {{"format", "json"}};
        json j;
        j["basis"] = "|electron, qubit>, index 2e + q; transformed basis s <-> 0, a <-> 1";
        j["max_elementwise_error"] = c.max_elementwise_error;
        j["cnot_qubit_control"] = matrix_json(c.cnot_qubit_control);
        j["transformed"] = matrix_json(c.transformed);
        j["cnot_electron_control"] = matrix_json(c.cnot_electron_control);
        r.body = dump(j);
        return r;
    };
}

// ---------------------------------------------------------------------------

void add_scan(CLI::App &app, Registry &reg) {
    struct Opts {
        std::string param;
        std::string from, to;
        int points = 0;
        bool log = false;
        ProtocolOpts proto;
        BeamOptions beam;
        std::string zr = "376.730313668ohm";
        std::string beta;
    };
    auto o = std::make_shared<Opts>();
    o->proto.delta = "0.01";
    o->beam.energy = "100eV";
    auto *sub = app.add_subcommand("scan", "Sweep one parameter and emit one CSV row per point");
    sub->add_option("--param", o->param, "k, delta, eta, phi, q or Z_r")->required();
    sub->add_option("--from", o->from, "Start value")->required();
    sub->add_option("--to", o->to, "End value")->required();
    sub->add_option("--points", o->points, "Number of points (default: every integer for k, 11 otherwise)");
    sub->add_flag("--log", o->log, "Logarithmic spacing");
    o->proto.add(sub, false);
    o->beam.add(sub, false);
    sub->add_option("--zr", o->zr, "Resonator impedance")->capture_default_str();
    sub->add_option("--beta", o->beta, "Electron v/c for Z_r scans (default from --energy)");

    reg["scan"] = [o](const GlobalOptions &g) {
        std::string param = o->param;
        if (param == "zr" || param == "Zr" || param == "z_r") param = "Z_r";
        if (param == "flux") param = "phi";
        if (param == "charge") param = "q";
        static const std::vector<std::string> known = {"k", "delta", "eta", "phi", "q", "Z_r"};
        if (std::find(known.begin(), known.end(), param) == known.end()) {
            throw ValidationError("unknown sweep parameter '" + o->param + "' (expected k, delta, eta, phi, q or Z_r)");
        }
        if (resolve_format(g, "csv") != "csv") throw ValidationError("scan only writes CSV");

        std::string unit;
        bool bare = false;
        if (param == "k" || param == "eta") bare = true;
        if (param == "delta") unit = "rad", bare = true;
        if (param == "phi") unit = "Wb";
        if (param == "q") unit = "C";
        if (param == "Z_r") unit = "ohm";

        std::vector<double> values;
        if (param == "k") {
            int lo = 0, hi = 0;
            try {
                lo = std::stoi(o->from);
                hi = std::stoi(o->to);
            } catch (const std::exception &) {
                throw ValidationError("k range must be integers");
            }
            if (lo < 1 || hi < lo) throw ValidationError("k range must satisfy 1 <= from <= to");
            if (o->log || o->points > 0) throw ValidationError("k scans step through every integer");
            for (int k = lo; k <= hi; ++k) values.push_back(k);
        } else {
            const double a = qty(o->from, unit, bare);
            const double b = qty(o->to, unit, bare);
            const int n = o->points > 0 ? o->points : 11;
            if (n < 1) throw ValidationError("--points must be positive");
            if (o->log && !(a > 0 && b > 0)) throw ValidationError("log scans need positive endpoints");
            for (int i = 0; i < n; ++i) {
                const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
                values.push_back(o->log ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a));
            }
        }

        CommandResult r;
        r.command = "scan";
        r.parameters = {{"param", param},
                        {"values", values},
                        {"log", o->log},
                        {"seed", g.seed},
                        {"format", "csv"}};

        if (param == "k" || param == "delta" || param == "eta") {
            const double delta = qty(o->proto.delta, "rad", true);
            r.parameters["k"] = o->proto.k;
            r.parameters["delta_rad"] = delta;
            r.parameters["eta"] = o->proto.eta;
            r.parameters["trials"] = o->proto.trials;
            r.parameters["range_size"] = o->proto.range_size;
            r.parameters["defer_correction"] = o->proto.defer;
            Csv csv{"k", "delta", "eta", "analytic_p", "classical_p", "mc_freq", "mc_ci_low", "mc_ci_high",
                    "failure_freq", "trials", "seed", "ratio"};
            for (double v : values) {
                const int k = param == "k" ? static_cast<int>(v) : o->proto.k;
                const double d = param == "delta" ? v : delta;
                const double eta = param == "eta" ? v : o->proto.eta;
                const auto m = protocol_point(o->proto, k, d, eta, g.seed);
                protocol_row(csv, m, g.seed, protocol::detection_summary(k, d).ratio);
            }
            r.body = csv.str();
            return r;
        }

        const auto beam = optics::electron_kinematics(qty(o->beam.energy, "J"));
        const auto geom = o->beam.geometry();
        r.parameters["energy_J"] = beam.kinetic_energy;
        r.parameters["d_m"] = geom.d;
        r.parameters["l_m"] = geom.l;
        r.parameters["drift_m"] = geom.drift ? json(*geom.drift) : json(nullptr);
        if (param == "phi") {
            Csv csv{"phi_Wb", "phi_over_phi0", "theta_rad", "ratio", "beam_shift_m"};
            for (double v : values) {
                const auto d = optics::magnetic_deflection(beam, geom, v);
                csv.num(v).num(v / K().phi0).num(d.theta).num(d.ratio);
                d.beam_shift ? csv.num(*d.beam_shift) : csv.empty();
                csv.end();
            }
            r.body = csv.str();
        } else if (param == "q") {
            Csv csv{"q_C", "q_over_e", "theta_rad", "ratio", "work_J"};
            for (double v : values) {
                const auto d = optics::electric_deflection(beam, geom, v);
                csv.num(v).num(v / K().e).num(d.theta).num(d.ratio).num(*d.work).end();
            }
            r.body = csv.str();
        } else {
            const double beta = o->beta.empty() ? beam.beta : qty(o->beta, "", true);
            r.parameters["beta"] = beta;
            Csv csv{"Z_r_ohm", "n_photons_magnetic", "n_photons_electric", "electric_to_magnetic_ratio"};
            for (double v : values) {
                const auto e = optics::photons_for_electric(v, beta);
                csv.num(v).num(optics::photons_for_magnetic(v)).num(e.photons).num(e.ratio_to_magnetic).end();
            }
            r.body = csv.str();
        }
        return r;
    };
}

}  // namespace

Registry register_commands(CLI::App &app) {
    Registry reg;
    add_spectrum(app, reg);
    add_dispersive(app, reg);
    add_couple(app, reg);
    add_deflect(app, reg);
    add_budget(app, reg);
    add_protocol(app, reg);
    add_qnd(app, reg);
    add_scan(app, reg);
    return reg;
}

}  // namespace qtem::cli
