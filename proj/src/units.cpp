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

#include "qtem/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <utility>

#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

namespace qtem::physcore {

namespace {

struct BaseUnit {
    std::string_view symbol;
    Dimension dimension;
    double to_si;
    bool prefixable;
};

const std::array<BaseUnit, 22> &base_units() {
    const auto &k = constants();
    static const std::array<BaseUnit, 22> units = {{
        {"J", Dimension::Energy, 1.0, true},
        {"eV", Dimension::Energy, k.e, true},
        {"Hz", Dimension::Energy, k.h, true},
        {"K", Dimension::Energy, k.k_B, true},
        {"Wb", Dimension::Flux, 1.0, true},
        {"phi0", Dimension::Flux, k.phi0, false},
        {"φ₀", Dimension::Flux, k.phi0, false},
        {"Φ0", Dimension::Flux, k.phi0, false},
        {"m", Dimension::Length, 1.0, true},
        {"Å", Dimension::Length, 1e-10, false},
        {"angstrom", Dimension::Length, 1e-10, false},
        {"F", Dimension::Capacitance, 1.0, true},
        {"H", Dimension::Inductance, 1.0, true},
        {"Ω", Dimension::Resistance, 1.0, true},
        {"ohm", Dimension::Resistance, 1.0, true},
        {"A", Dimension::Current, 1.0, true},
        {"rad", Dimension::Angle, 1.0, true},
        {"s", Dimension::Time, 1.0, true},
        {"C", Dimension::Charge, 1.0, true},
        {"e", Dimension::Charge, k.e, false},
        {"", Dimension::Dimensionless, 1.0, false},
        {"1", Dimension::Dimensionless, 1.0, false},
    }};
    return units;
}

const std::array<std::pair<std::string_view, double>, 11> kPrefixes = {{
    {"f", 1e-15},
    {"p", 1e-12},
    {"n", 1e-9},
    {"u", 1e-6},
    {"μ", 1e-6},  // U+03BC
    {"µ", 1e-6},  // U+00B5 micro sign
    {"m", 1e-3},
    {"k", 1e3},
    {"M", 1e6},
    {"G", 1e9},
    {"T", 1e12},
}};

std::optional<BaseUnit> find_base(std::string_view symbol) {
    for (const auto &u : base_units()) {
        if (u.symbol == symbol) {
            return u;
        }
    }
    return std::nullopt;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Dimensionless:
            return "dimensionless";
        case Dimension::Energy:
            return "energy";
        case Dimension::Flux:
            return "magnetic flux";
        case Dimension::Length:
            return "length";
        case Dimension::Capacitance:
            return "capacitance";
        case Dimension::Inductance:
            return "inductance";
        case Dimension::Resistance:
            return "resistance";
        case Dimension::Current:
            return "current";
        case Dimension::Angle:
            return "angle";
        case Dimension::Time:
            return "time";
        case Dimension::Charge:
            return "charge";
    }
    return "unknown";
}

Unit parse_unit(std::string_view tag) {
    tag = trim(tag);
    if (auto base = find_base(tag)) {
        return Unit{std::string(tag), base->dimension, base->to_si};
    }
    for (const auto &[prefix, scale] : kPrefixes) {
        if (tag.size() > prefix.size() && tag.substr(0, prefix.size()) == prefix) {
            auto base = find_base(tag.substr(prefix.size()));
            if (base && base->prefixable) {
                return Unit{std::string(tag), base->dimension, scale * base->to_si};
            }
        }
    }
    throw UnitError("unknown unit tag '" + std::string(tag) + "'");
}

double unit_convert(double value, std::string_view from, std::string_view to) {
    Unit a = parse_unit(from);
    Unit b = parse_unit(to);
    if (a.dimension != b.dimension) {
        throw UnitError("cannot convert " + std::string(dimension_name(a.dimension)) + " ('" + a.tag + "') to " +
                        std::string(dimension_name(b.dimension)) + " ('" + b.tag + "')");
    }
    if (a.to_si == b.to_si) {
        return value;
    }
    return value * a.to_si / b.to_si;
}

Quantity parse_quantity(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) {
        throw ValidationError("empty quantity");
    }
    // from_chars rejects a leading '+'.
    std::string_view digits = s;
    if (digits.front() == '+') {
        digits.remove_prefix(1);
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc()) {
        throw ValidationError("cannot parse number in '" + std::string(text) + "'");
    }
    std::string_view tag = trim(std::string_view(ptr, static_cast<std::size_t>(digits.data() + digits.size() - ptr)));
    return Quantity{value, parse_unit(tag)};
}

double parse_as(std::string_view text, std::string_view target, bool allow_bare) {
    Quantity q = parse_quantity(text);
    Unit t = parse_unit(target);
    if (q.unit.dimension == Dimension::Dimensionless && t.dimension != Dimension::Dimensionless) {
        if (!allow_bare) {
            throw UnitError("'" + std::string(trim(text)) + "' needs a unit (expected " +
                            std::string(dimension_name(t.dimension)) + ", e.g. '" + std::string(target) + "')");
        }
        return q.value;
    }
    return unit_convert(q.value, q.unit.tag, t.tag);
}

}  // namespace qtem::physcore
