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

#include "qtem/circuits/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

namespace qtem::circuits {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double wrap_offset(double offset) {
    // Into (-phi0/2, phi0/2]; the cosine is phi0-periodic in the offset.
    const double phi0 = physcore::constants().phi0;
    double x = std::remainder(offset, phi0);
    if (x <= -0.5 * phi0 * (1 - 1e-12)) {
        x += phi0;
    }
    if (std::abs(std::abs(x) - 0.5 * phi0) <= 1e-12 * phi0) {
        x = 0.5 * phi0;
    }
    return x;
}

}  // namespace

std::string_view term_kind_name(TermKind kind) {
    switch (kind) {
        case TermKind::Kinetic:
            return "kinetic";
        case TermKind::Quadratic:
            return "quadratic";
        case TermKind::Bilinear:
            return "bilinear";
        case TermKind::Josephson:
            return "josephson";
        case TermKind::Linear:
            return "linear";
    }
    return "?";
}

double HamiltonianSpec::capacitance(int var) const {
    for (const auto &t : terms) {
        if (t.kind == TermKind::Kinetic && t.var == var) {
            return t.value;
        }
    }
    throw ValidationError("variable " + std::to_string(var) + " has no kinetic term");
}

std::optional<double> HamiltonianSpec::inductance(int var) const {
    for (const auto &t : terms) {
        if (t.kind == TermKind::Quadratic && t.var == var) {
            return t.value;
        }
    }
    return std::nullopt;
}

double HamiltonianSpec::josephson_energy(int var) const {
    double sum = 0;
    for (const auto &t : terms) {
        if (t.kind == TermKind::Josephson && t.var == var) {
            sum += t.value;
        }
    }
    return sum;
}

double HamiltonianSpec::linear_coefficient(int var) const {
    double sum = 0;
    for (const auto &t : terms) {
        if (t.kind == TermKind::Linear && t.var == var) {
            sum += t.value;
        }
    }
    return sum;
}

double HamiltonianSpec::potential(double phi) const {
    const double phi0 = physcore::constants().phi0;
    double v = 0;
    for (const auto &t : terms) {
        switch (t.kind) {
            case TermKind::Quadratic:
                v += phi * phi / (2 * t.value);
                break;
            case TermKind::Josephson:
                v -= t.value * std::cos(kTwoPi * (phi + t.offset) / phi0);
                break;
            case TermKind::Linear:
                v += t.value * phi;
                break;
            case TermKind::Bilinear:
                throw ValidationError("potential(phi) needs a single-variable spec");
            case TermKind::Kinetic:
                break;
        }
    }
    return v;
}

double HamiltonianSpec::potential_derivative(double phi) const {
    const double phi0 = physcore::constants().phi0;
    double d = 0;
    for (const auto &t : terms) {
        switch (t.kind) {
            case TermKind::Quadratic:
                d += phi / t.value;
                break;
            case TermKind::Josephson:
                d += t.value * (kTwoPi / phi0) * std::sin(kTwoPi * (phi + t.offset) / phi0);
                break;
            case TermKind::Linear:
                d += t.value;
                break;
            case TermKind::Bilinear:
                throw ValidationError("potential_derivative(phi) needs a single-variable spec");
            case TermKind::Kinetic:
                break;
        }
    }
    return d;
}

double HamiltonianSpec::potential_curvature(double phi) const {
    const double phi0 = physcore::constants().phi0;
    double d2 = 0;
    for (const auto &t : terms) {
        switch (t.kind) {
            case TermKind::Quadratic:
                d2 += 1 / t.value;
                break;
            case TermKind::Josephson: {
                const double k = kTwoPi / phi0;
                d2 += t.value * k * k * std::cos(kTwoPi * (phi + t.offset) / phi0);
                break;
            }
            case TermKind::Bilinear:
                throw ValidationError("potential_curvature(phi) needs a single-variable spec");
            default:
                break;
        }
    }
    return d2;
}

std::string HamiltonianSpec::describe() const {
    std::ostringstream os;
    os << "H =";
    bool first = true;
    auto q_of = [&](int var) {
        std::string v = variables.at(static_cast<std::size_t>(var));
        return "q" + (v.size() > 3 ? v.substr(3) : std::string());
    };
    for (const auto &t : terms) {
        std::string piece;
        const std::string &x = variables.at(static_cast<std::size_t>(t.var));
        switch (t.kind) {
            case TermKind::Kinetic:
                piece = "+ " + q_of(t.var) + "^2/(2*" + fmt(t.value) + " F)";
                break;
            case TermKind::Quadratic:
                piece = "+ " + x + "^2/(2*" + fmt(t.value) + " H)";
                break;
            case TermKind::Bilinear:
                piece = "+ " + x + "*" + variables.at(static_cast<std::size_t>(t.var2)) + "/(" + fmt(t.value) + " H)";
                break;
            case TermKind::Josephson:
                if (t.offset == 0) {
                    piece = "- " + fmt(t.value) + " J*cos(2*pi*" + x + "/phi0)";
                } else {
                    piece = "- " + fmt(t.value) + " J*cos(2*pi*(" + x + " + " +
                            fmt(t.offset / physcore::constants().phi0) + "*phi0)/phi0)";
                }
                break;
            case TermKind::Linear:
                piece = "+ " + fmt(t.value) + " A*" + x;
                break;
        }
        if (first && piece.rfind("+ ", 0) == 0) {
            piece = piece.substr(2);
        }
        os << ' ' << piece;
        first = false;
    }
    return os.str();
}

void HamiltonianSpec::validate() const {
    for (int v = 0; v < static_cast<int>(variables.size()); ++v) {
        int kinetic = 0;
        int potential_terms = 0;
        for (const auto &t : terms) {
            bool touches = t.var == v || t.var2 == v;
            if (!touches) {
                continue;
            }
            if (t.kind == TermKind::Kinetic) {
                ++kinetic;
            } else {
                ++potential_terms;
            }
        }
        if (kinetic != 1) {
            throw ValidationError("variable " + variables[static_cast<std::size_t>(v)] + " has " +
                                  std::to_string(kinetic) + " kinetic terms (expected 1)");
        }
        if (potential_terms == 0) {
            throw ValidationError("variable " + variables[static_cast<std::size_t>(v)] + " has no potential term");
        }
    }
}

HamiltonianSpec build_hamiltonian(const CircuitNetlist &net) {
    const auto &els = net.elements;
    const auto &topo = net.topology;
    if (topo.dynamical_loops.empty()) {
        throw ValidationError("netlist has no dynamical loop");
    }
    HamiltonianSpec spec;
    std::vector<int> var_of_loop(topo.loops.size(), -1);

    for (std::size_t li : topo.dynamical_loops) {
        const Loop &loop = topo.loops[li];
        const int var = static_cast<int>(spec.variables.size());
        var_of_loop[li] = var;
        const Element &anchor = loop.junction ? els[*loop.junction] : els[loop.capacitors.front()];
        spec.variables.push_back("phi_" + anchor.name);

        double c_total = 0;
        std::string origin;
        for (std::size_t ci : loop.capacitors) {
            c_total += els[ci].value;
            origin += (origin.empty() ? "" : ",") + els[ci].name;
        }
        if (loop.junction) {
            c_total += els[*loop.junction].junction_capacitance;
            origin += (origin.empty() ? "" : ",") + els[*loop.junction].name;
        }
        spec.terms.push_back(Term{TermKind::Kinetic, var, -1, c_total, 0, LinearSource::None, origin});
        spec.notes.push_back("conjugate charge q" + spec.variables.back().substr(3) + " = dL/d(d" +
                             spec.variables.back() + "/dt) = C " + spec.variables.back() + "' with C = " +
                             fmt(c_total) + " F");
        if (loop.inductor) {
            const Element &l = els[*loop.inductor];
            spec.terms.push_back(Term{TermKind::Quadratic, var, -1, l.value, 0, LinearSource::None, l.name});
        }
        if (loop.junction) {
            const Element &j = els[*loop.junction];
            spec.terms.push_back(Term{TermKind::Josephson, var, -1, j.value, 0, LinearSource::None, j.name});
        }
    }

    auto var_of_element = [&](std::size_t element) -> int {
        auto li = net.loop_of(element);
        return li ? var_of_loop[*li] : -1;
    };

    if (topo.coupling) {
        const Element &k = els[*topo.coupling];
        std::size_t ia = net.index_of(k.targets[0]);
        std::size_t ib = net.index_of(k.targets[1]);
        int va = var_of_element(ia);
        int vb = var_of_element(ib);
        if (va >= 0 && vb >= 0) {
            spec.terms.push_back(Term{TermKind::Bilinear, va, vb, k.value, 0, LinearSource::None, k.name});
        } else {
            // One side is a persistent-current secondary: phi * Phi / L_c with
            // Phi constant is linear in phi, and Phi^2/2L' is a constant.
            int var = va >= 0 ? va : vb;
            std::size_t secondary = va >= 0 ? ib : ia;
            const Element *fb = nullptr;
            for (std::size_t bi : topo.biases) {
                if (els[bi].kind == ElementKind::FluxBias && els[bi].targets[0] == els[secondary].name) {
                    fb = &els[bi];
                }
            }
            if (!fb) {
                throw ValidationError("secondary inductor '" + els[secondary].name + "' has no flux bias");
            }
            spec.terms.push_back(Term{TermKind::Linear, var, -1, fb->value / k.value, 0,
                                      LinearSource::CoupledFluxBias, k.name + "," + fb->name});
            spec.dropped_constant += fb->value * fb->value / (2 * els[secondary].value);
        }
    }

    for (std::size_t bi : topo.biases) {
        const Element &b = els[bi];
        std::size_t target = net.index_of(b.targets[0]);
        int var = var_of_element(target);
        if (var < 0) {
            continue;  // flux bias on the secondary, handled with the coupling
        }
        if (b.kind == ElementKind::BiasCurrent) {
            spec.terms.push_back(Term{TermKind::Linear, var, -1, b.value, 0, LinearSource::BiasCurrent, b.name});
        } else {
            // (Phi + phi)^2 / 2L = Phi^2/2L + (Phi/L) phi + phi^2/2L
            const double l = els[target].value;
            spec.terms.push_back(
                Term{TermKind::Linear, var, -1, b.value / l, 0, LinearSource::TrappedFlux, b.name + "," + els[target].name});
            spec.dropped_constant += b.value * b.value / (2 * l);
        }
    }

    spec.validate();
    return spec;
}

HamiltonianSpec reduce_flux_bias(const HamiltonianSpec &spec, const FluxBiasReduction &options) {
    if (spec.num_variables() != 1) {
        throw ValidationError("flux-bias reduction needs a single-variable circuit, got " +
                              std::to_string(spec.num_variables()) + " variables");
    }
    const double phi0 = physcore::constants().phi0;
    auto l = spec.inductance(0);
    bool has_linear = false;
    bool has_trapped = false;
    for (const auto &t : spec.terms) {
        if (t.kind == TermKind::Linear) {
            has_linear = true;
            has_trapped = has_trapped || t.source == LinearSource::TrappedFlux;
        }
    }

    FluxBiasReduction::Mode mode = options.mode;
    if (mode == FluxBiasReduction::Mode::Auto) {
        mode = has_trapped ? FluxBiasReduction::Mode::CurrentSource : FluxBiasReduction::Mode::Offset;
    }

    HamiltonianSpec out;
    out.variables = spec.variables;
    out.dropped_constant = spec.dropped_constant;
    out.notes = spec.notes;

    if (mode == FluxBiasReduction::Mode::CurrentSource) {
        if (!has_linear) {
            throw ValidationError("current-source reduction needs a flux or current bias");
        }
        const double b = spec.linear_coefficient(0);
        for (const auto &t : spec.terms) {
            if (t.kind == TermKind::Quadratic || t.kind == TermKind::Linear) {
                continue;
            }
            out.terms.push_back(t);
        }
        out.terms.push_back(Term{TermKind::Linear, 0, -1, b, 0, LinearSource::BiasCurrent, "I_b"});
        out.notes.push_back("large-inductor limit: phi^2/2L dropped, trapped flux acts as bias current I_b = " +
                            fmt(b) + " A");
        if (options.require_half_flux) {
            throw ValidationError("half-flux validation does not apply to a current-biased junction");
        }
        out.validate();
        return out;
    }

    if (!l) {
        throw ValidationError("offset reduction needs a quadratic (inductor) term");
    }
    const double l_eff = options.effective_inductance.value_or(*l);
    if (!(l_eff > 0)) {
        throw ValidationError("effective inductance must be positive");
    }
    const double b = spec.linear_coefficient(0);
    // phi^2/2L + b phi = (phi + L b)^2 / 2L - L b^2 / 2; the shift phi -> phi - L b
    // moves the bias into every junction offset.
    const double shift = -l_eff * b;
    for (const auto &t : spec.terms) {
        switch (t.kind) {
            case TermKind::Linear:
                break;
            case TermKind::Quadratic: {
                Term q = t;
                q.value = l_eff;
                out.terms.push_back(q);
                break;
            }
            case TermKind::Josephson: {
                Term j = t;
                j.offset = has_linear ? wrap_offset(t.offset + shift) : t.offset;
                out.terms.push_back(j);
                break;
            }
            default:
                out.terms.push_back(t);
        }
    }
    if (has_linear) {
        out.dropped_constant += -0.5 * l_eff * b * b;
        out.notes.push_back("variable shifted by " + fmt(shift / phi0) + " phi0; constants dropped");
    }
    if (options.require_half_flux) {
        for (const auto &t : out.terms) {
            if (t.kind == TermKind::Josephson && std::abs(t.offset - 0.5 * phi0) > 1e-9 * phi0) {
                throw ValidationError("bias is not at the half-flux point: junction offset is " +
                                      fmt(t.offset / phi0) + " phi0");
            }
        }
    }
    out.validate();
    return out;
}

}  // namespace qtem::circuits
