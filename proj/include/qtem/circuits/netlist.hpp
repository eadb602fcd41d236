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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qtem::circuits {

enum class ElementKind {
    Capacitor,
    Inductor,
    JosephsonJunction,
    MutualCoupling,
    BiasCurrent,
    FluxBias,
};

std::string_view element_keyword(ElementKind kind);

/// One netlist line. Two-terminal elements (C, L, JJ) use `node_a/node_b`;
/// K uses `targets` = {l1, l2}; IB and FB use `targets` = {element}.
struct Element {
    ElementKind kind;
    std::string name;
    int line = 0;
    std::string node_a;
    std::string node_b;
    std::vector<std::string> targets;
    /// C [F], L [H], E_J [J], L_c [H], I_b [A] or trapped flux [Wb].
    double value = 0;
    /// Junction capacitance [F], JJ only.
    double junction_capacitance = 0;

    bool two_terminal() const {
        return kind == ElementKind::Capacitor || kind == ElementKind::Inductor ||
               kind == ElementKind::JosephsonJunction;
    }
};

/// A set of branches connected in parallel between one node pair.
struct Loop {
    std::string node_a;
    std::string node_b;
    std::vector<std::size_t> capacitors;  // indices into CircuitNetlist::elements
    std::optional<std::size_t> inductor;
    std::optional<std::size_t> junction;

    /// Carries a traversed-flux variable: has a junction or a capacitor.
    bool dynamical() const {
        return junction.has_value() || !capacitors.empty();
    }
};

/// Loop structure of a netlist that passed the topology catalog.
struct Topology {
    std::vector<Loop> loops;
    std::vector<std::size_t> dynamical_loops;  // indices into loops
    std::optional<std::size_t> coupling;       // the K element
    std::vector<std::size_t> biases;           // IB and FB elements
};

struct CircuitNetlist {
    std::vector<Element> elements;
    Topology topology;

    const Element *find(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;

    /// Index of the loop containing two-terminal element `element`.
    std::optional<std::size_t> loop_of(std::size_t element) const;
};

/// Parses the line-oriented netlist format:
///
///   C  name n1 n2 farads
///   L  name n1 n2 henries
///   JJ name n1 n2 EJ_joules CJ_farads
///   K  name l1 l2 Lc_henries
///   IB name target amperes
///   FB name lname webers
///
/// '#' starts a comment. Numbers take scientific notation and optional unit
/// suffixes ("100fF", "20ueV", "0.5phi0"). The supported topologies are an LC
/// or rf-SQUID primary loop, optionally a second such loop coupled through K,
/// or a flux-bias secondary inductor coupled through K, plus bias sources.
/// Node "0" (or "gnd") is the only node loops may share.
///
/// Throws NetlistError naming the line (and column for syntax errors).
CircuitNetlist parse_netlist(std::string_view text);

}  // namespace qtem::circuits
