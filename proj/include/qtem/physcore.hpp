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

#include <numbers>
#include <string>
#include <string_view>

namespace qtem::physcore {

/// SI values of every physical constant used by the toolkit.
///
/// The exact SI-defining constants (h, e, c, k_B) and the measured ones are
/// CODATA 2018. phi0 and R_K are derived from h and e; Z0 and alpha are taken
/// from independent measured values so that the identity 2 R_K / Z0 = 1/alpha
/// is a genuine cross-check. The aluminium gap is a material parameter.
struct PhysConstants {
    std::string_view version;
    double h;         // J s
    double hbar;      // J s
    double e;         // C
    double c;         // m/s
    double eps0;      // F/m
    double mu0;       // H/m
    double k_B;       // J/K
    double sigma_SB;  // W m^-2 K^-4
    double wien_b;    // m K
    double m_e_c2;    // J
    double alpha;     // 1
    double Z0;        // Ohm
    double phi0;      // Wb
    double R_K;       // Ohm
    double Delta_Al;  // J
};

inline constexpr PhysConstants kCodata2018 = [] {
    PhysConstants k{};
    k.version = "CODATA-2018";
    k.h = 6.62607015e-34;
    k.hbar = k.h / (2.0 * std::numbers::pi);
    k.e = 1.602176634e-19;
    k.c = 299792458.0;
    k.eps0 = 8.8541878128e-12;
    k.mu0 = 1.25663706212e-6;
    k.k_B = 1.380649e-23;
    k.sigma_SB = 5.670374419e-8;
    k.wien_b = 2.897771955e-3;
    k.m_e_c2 = 8.1871057769e-14;
    k.alpha = 7.2973525693e-3;
    k.Z0 = 376.730313668;
    k.phi0 = k.h / (2.0 * k.e);
    k.R_K = k.h / (k.e * k.e);
    k.Delta_Al = 170e-6 * k.e;
    return k;
}();

/// The constants every module uses.
inline constexpr const PhysConstants &constants() {
    return kCodata2018;
}

/// Checks phi0 = h/2e, R_K = h/e^2 (1e-12 relative) and 2 R_K / Z0 = 1/alpha
/// (1e-3 relative). Throws qtem::Error on violation.
void verify_constants(const PhysConstants &k = constants());

/// Serializes the constant table as a JSON object (values in SI).
std::string constants_json(const PhysConstants &k = constants());

}  // namespace qtem::physcore
