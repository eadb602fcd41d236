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

#include "qtem/circuits/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "qtem/error.hpp"
#include "qtem/units.hpp"

namespace qtem::circuits {

std::size_t index_of_name(const std::vector<Element> &els, std::string_view name);

namespace {

struct Token {
    std::string_view text;
    int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
        }
    }
    return out;
}

std::string upper(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return r;
}

bool is_ground(std::string_view node) {
    return node == "0" || node == "gnd" || node == "GND";
}

std::string node_name(std::string_view node) {
    return is_ground(node) ? "0" : std::string(node);
}

double parse_value(const Token &tok, std::string_view si_unit, int line, std::string_view what) {
    try {
        double v = physcore::parse_as(tok.text, si_unit, /*allow_bare=*/true);
        if (!std::isfinite(v)) {
            throw NetlistError(std::string(what) + " must be finite", line, tok.column);
        }
        return v;
    } catch (const NetlistError &) {
        throw;
    } catch (const ValidationError &e) {
        throw NetlistError("bad " + std::string(what) + " '" + std::string(tok.text) + "': " + e.what(), line,
                           tok.column);
    }
}

void require_positive(double v, const Token &tok, int line, std::string_view what) {
    if (!(v > 0)) {
        throw NetlistError("non-positive " + std::string(what) + " '" + std::string(tok.text) + "'", line,
                           tok.column);
    }
}

Element parse_line(const std::vector<Token> &toks, int line) {
    const std::string kw = upper(toks[0].text);
    Element el{};
    el.line = line;
    std::size_t expected = 0;
    if (kw == "C") {
        el.kind = ElementKind::Capacitor;
        expected = 5;
    } else if (kw == "L") {
        el.kind = ElementKind::Inductor;
        expected = 5;
    } else if (kw == "JJ") {
        el.kind = ElementKind::JosephsonJunction;
        expected = 6;
    } else if (kw == "K") {
        el.kind = ElementKind::MutualCoupling;
        expected = 5;
    } else if (kw == "IB") {
        el.kind = ElementKind::BiasCurrent;
        expected = 4;
    } else if (kw == "FB") {
        el.kind = ElementKind::FluxBias;
        expected = 4;
    } else {
        throw NetlistError("unknown element keyword '" + std::string(toks[0].text) + "'", line, toks[0].column);
    }
    if (toks.size() != expected) {
        int col = toks.size() > expected ? toks[expected].column : 0;
        throw NetlistError(std::string(element_keyword(el.kind)) + " expects " + std::to_string(expected - 1) +
                               " fields, got " + std::to_string(toks.size() - 1),
                           line, col);
    }
    el.name = std::string(toks[1].text);

    switch (el.kind) {
        case ElementKind::Capacitor:
            el.node_a = node_name(toks[2].text);
            el.node_b = node_name(toks[3].text);
            el.value = parse_value(toks[4], "F", line, "capacitance");
            require_positive(el.value, toks[4], line, "capacitance");
            break;
        case ElementKind::Inductor:
            el.node_a = node_name(toks[2].text);
            el.node_b = node_name(toks[3].text);
            el.value = parse_value(toks[4], "H", line, "inductance");
            require_positive(el.value, toks[4], line, "inductance");
            break;
        case ElementKind::JosephsonJunction:
            el.node_a = node_name(toks[2].text);
            el.node_b = node_name(toks[3].text);
            el.value = parse_value(toks[4], "J", line, "Josephson energy");
            require_positive(el.value, toks[4], line, "Josephson energy");
            el.junction_capacitance = parse_value(toks[5], "F", line, "junction capacitance");
            require_positive(el.junction_capacitance, toks[5], line, "junction capacitance");
            break;
        case ElementKind::MutualCoupling:
            el.targets = {std::string(toks[2].text), std::string(toks[3].text)};
            el.value = parse_value(toks[4], "H", line, "coupling inductance");
            require_positive(el.value, toks[4], line, "coupling inductance");
            break;
        case ElementKind::BiasCurrent:
            el.targets = {std::string(toks[2].text)};
            el.value = parse_value(toks[3], "A", line, "bias current");
            break;
        case ElementKind::FluxBias:
            el.targets = {std::string(toks[2].text)};
            el.value = parse_value(toks[3], "Wb", line, "flux bias");
            break;
    }
    if (el.two_terminal() && el.node_a == el.node_b) {
        throw NetlistError(el.name + " connects node '" + el.node_a + "' to itself", line, toks[3].column);
    }
    return el;
}

[[noreturn]] void unsupported(const Element &el, const std::string &why) {
    throw NetlistError("unsupported topology at " + std::string(element_keyword(el.kind)) + " '" + el.name + "': " + why,
                       el.line);
}

Topology analyze(const std::vector<Element> &els) {
    Topology topo;
    std::map<std::pair<std::string, std::string>, std::size_t> by_pair;
    std::map<std::string, std::size_t> node_owner;  // non-ground node -> loop

    for (std::size_t i = 0; i < els.size(); ++i) {
        const Element &el = els[i];
        if (!el.two_terminal()) {
            continue;
        }
        auto key = std::minmax(el.node_a, el.node_b);
        auto [it, inserted] = by_pair.try_emplace({key.first, key.second}, topo.loops.size());
        if (inserted) {
            for (const auto &node : {el.node_a, el.node_b}) {
                if (is_ground(node)) {
                    continue;
                }
                if (node_owner.count(node)) {
                    unsupported(el, "node '" + node + "' is shared with another loop (series or multi-mesh circuits " +
                                        "are outside the catalog)");
                }
                node_owner[node] = it->second;
            }
            topo.loops.push_back(Loop{key.first, key.second, {}, std::nullopt, std::nullopt});
        }
        Loop &loop = topo.loops[it->second];
        switch (el.kind) {
            case ElementKind::Capacitor:
                loop.capacitors.push_back(i);
                break;
            case ElementKind::Inductor:
                if (loop.inductor) {
                    unsupported(el, "loop already has inductor '" + els[*loop.inductor].name + "'");
                }
                loop.inductor = i;
                break;
            case ElementKind::JosephsonJunction:
                if (loop.junction) {
                    unsupported(el, "loop already has junction '" + els[*loop.junction].name + "'");
                }
                loop.junction = i;
                break;
            default:
                break;
        }
    }

    auto find_index = [&](const std::string &name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < els.size(); ++i) {
            if (els[i].name == name) {
                return i;
            }
        }
        return std::nullopt;
    };
    auto loop_of = [&](std::size_t element) -> std::size_t {
        const Element &el = els[element];
        auto key = std::minmax(el.node_a, el.node_b);
        return by_pair.at({key.first, key.second});
    };

    // Bias and coupling references.
    std::set<std::size_t> flux_biased_inductors;
    std::set<std::size_t> current_biased_loops;
    for (std::size_t i = 0; i < els.size(); ++i) {
        const Element &el = els[i];
        if (el.kind == ElementKind::MutualCoupling) {
            if (topo.coupling) {
                unsupported(el, "only one mutual coupling is supported");
            }
            for (const auto &t : el.targets) {
                auto idx = find_index(t);
                if (!idx || els[*idx].kind != ElementKind::Inductor) {
                    unsupported(el, "target '" + t + "' is not an inductor");
                }
            }
            if (el.targets[0] == el.targets[1]) {
                unsupported(el, "couples inductor '" + el.targets[0] + "' to itself");
            }
            topo.coupling = i;
        } else if (el.kind == ElementKind::FluxBias) {
            auto idx = find_index(el.targets[0]);
            if (!idx || els[*idx].kind != ElementKind::Inductor) {
                unsupported(el, "target '" + el.targets[0] + "' is not an inductor");
            }
            if (!flux_biased_inductors.insert(*idx).second) {
                unsupported(el, "inductor '" + el.targets[0] + "' already carries a flux bias");
            }
            topo.biases.push_back(i);
        } else if (el.kind == ElementKind::BiasCurrent) {
            auto idx = find_index(el.targets[0]);
            if (!idx || (els[*idx].kind != ElementKind::JosephsonJunction && els[*idx].kind != ElementKind::Inductor)) {
                unsupported(el, "target '" + el.targets[0] + "' is not a junction or inductor");
            }
            if (!current_biased_loops.insert(loop_of(*idx)).second) {
                unsupported(el, "loop already has a bias current");
            }
            topo.biases.push_back(i);
        }
    }

    std::optional<std::size_t> secondary;
    for (std::size_t li = 0; li < topo.loops.size(); ++li) {
        const Loop &loop = topo.loops[li];
        if (loop.dynamical()) {
            if (!loop.inductor && !loop.junction) {
                unsupported(els[loop.capacitors.front()], "capacitor loop without inductor or junction has no "
                                                          "potential energy");
            }
            topo.dynamical_loops.push_back(li);
            continue;
        }
        // Inductor-only loop: a persistent-current flux-bias secondary.
        const Element &ind = els[*loop.inductor];
        bool coupled = topo.coupling && std::count(els[*topo.coupling].targets.begin(),
                                                   els[*topo.coupling].targets.end(), ind.name) > 0;
        if (!coupled || !flux_biased_inductors.count(*loop.inductor)) {
            unsupported(ind, "an inductor-only loop must be a flux-bias secondary (needs FB and K)");
        }
        if (secondary) {
            unsupported(ind, "only one flux-bias secondary loop is supported");
        }
        secondary = li;
    }

    if (topo.dynamical_loops.empty()) {
        if (!els.empty()) {
            unsupported(els.front(), "no loop with a junction or capacitor");
        }
        throw NetlistError("empty netlist", 1);
    }
    if (topo.dynamical_loops.size() > 2) {
        const Loop &third = topo.loops[topo.dynamical_loops[2]];
        std::size_t el = third.junction ? *third.junction : third.capacitors.front();
        unsupported(els[el], "at most two dynamical loops are supported");
    }
    if (topo.dynamical_loops.size() == 2) {
        if (!topo.coupling) {
            const Loop &second = topo.loops[topo.dynamical_loops[1]];
            std::size_t el = second.junction ? *second.junction : second.capacitors.front();
            unsupported(els[el], "two loops must be coupled through a mutual inductance");
        }
        if (secondary) {
            unsupported(els[*topo.loops[*secondary].inductor], "a flux-bias secondary cannot be added to a coupled "
                                                               "pair");
        }
        if (!topo.biases.empty()) {
            unsupported(els[topo.biases.front()], "bias sources are not supported on a coupled pair");
        }
    }
    if (topo.coupling) {
        const Element &k = els[*topo.coupling];
        std::size_t la = loop_of(index_of_name(els, k.targets[0]));
        std::size_t lb = loop_of(index_of_name(els, k.targets[1]));
        if (la == lb) {
            unsupported(k, "both inductors are in the same loop");
        }
        if (topo.dynamical_loops.size() == 1 && !secondary) {
            unsupported(k, "coupling target is not part of a supported loop");
        }
    }
    return topo;
}

}  // namespace

std::string_view element_keyword(ElementKind kind) {
    switch (kind) {
        case ElementKind::Capacitor:
            return "C";
        case ElementKind::Inductor:
            return "L";
        case ElementKind::JosephsonJunction:
            return "JJ";
        case ElementKind::MutualCoupling:
            return "K";
        case ElementKind::BiasCurrent:
            return "IB";
        case ElementKind::FluxBias:
            return "FB";
    }
    return "?";
}

const Element *CircuitNetlist::find(std::string_view name) const {
    for (const auto &el : elements) {
        if (el.name == name) {
            return &el;
        }
    }
    return nullptr;
}

std::size_t CircuitNetlist::index_of(std::string_view name) const {
    return index_of_name(elements, name);
}

std::optional<std::size_t> CircuitNetlist::loop_of(std::size_t element) const {
    for (std::size_t li = 0; li < topology.loops.size(); ++li) {
        const Loop &loop = topology.loops[li];
        if (loop.inductor == element || loop.junction == element ||
            std::find(loop.capacitors.begin(), loop.capacitors.end(), element) != loop.capacitors.end()) {
            return li;
        }
    }
    return std::nullopt;
}

std::size_t index_of_name(const std::vector<Element> &els, std::string_view name) {
    for (std::size_t i = 0; i < els.size(); ++i) {
        if (els[i].name == name) {
            return i;
        }
    }
    throw ValidationError("no element named '" + std::string(name) + "'");
}

CircuitNetlist parse_netlist(std::string_view text) {
    CircuitNetlist net;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        auto toks = tokenize(line);
        if (toks.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        Element el = parse_line(toks, line_no);
        auto [it, inserted] = seen.emplace(el.name, line_no);
        if (!inserted) {
            throw NetlistError("duplicate element name '" + el.name + "' (first defined on line " +
                                   std::to_string(it->second) + ")",
                               line_no, toks[1].column);
        }
        net.elements.push_back(std::move(el));
        if (end == text.size()) {
            break;
        }
    }
    net.topology = analyze(net.elements);
    return net;
}

}  // namespace qtem::circuits
