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

#include <string>
#include <string_view>

namespace qtem::physcore {

// Unit tags only exist at the CLI and file boundaries; everything inside the
// library is SI.
//
// Energy, frequency (E = h f) and temperature (E = k_B T) share one dimension,
// so "5GHz" converts to "ueV" and "20mK" to "J". Base symbols accept an SI
// prefix (f p n u μ m k M G T): J eV Hz K Wb m F H Ω/ohm A rad s C.
// Prefix-free symbols: phi0 (also φ₀, Φ0), Å (also angstrom), e (elementary
// charge). The empty tag is dimensionless.

enum class Dimension {
    Dimensionless,
    Energy,
    Flux,
    Length,
    Capacitance,
    Inductance,
    Resistance,
    Current,
    Angle,
    Time,
    Charge,
};

std::string_view dimension_name(Dimension d);

struct Unit {
    std::string tag;
    Dimension dimension;
    double to_si;  // SI value of one unit
};

/// Resolves a unit tag. Throws UnitError for unknown tags.
Unit parse_unit(std::string_view tag);

/// Converts `value` from one tag to another. Throws UnitError for unknown tags
/// or incompatible dimensions.
double unit_convert(double value, std::string_view from, std::string_view to);

struct Quantity {
    double value;
    Unit unit;

    double si() const {
        return value * unit.to_si;
    }
};

/// Parses "<number>[ ]<tag>", e.g. "1e-13", "100fF", "5 GHz", "1phi0".
Quantity parse_quantity(std::string_view text);

/// Parses a quantity and returns its value in `target` units. A bare number
/// is rejected unless `allow_bare` is set (it is then taken to be in `target`).
double parse_as(std::string_view text, std::string_view target, bool allow_bare = false);

}  // namespace qtem::physcore
