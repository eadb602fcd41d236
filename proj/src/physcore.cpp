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

#include "qtem/physcore.hpp"

#include <cmath>
#include <json.hpp>

#include "qtem/error.hpp"

namespace qtem::physcore {

namespace {

void require_relative(double actual, double expected, double tol, const char *what) {
    if (!(std::abs(actual - expected) <= tol * std::abs(expected))) {
        throw Error(std::string("physical constant identity violated: ") + what);
    }
}

}  // namespace

void verify_constants(const PhysConstants &k) {
    require_relative(k.phi0, k.h / (2 * k.e), 1e-12, "phi0 = h/2e");
    require_relative(k.R_K, k.h / (k.e * k.e), 1e-12, "R_K = h/e^2");
    require_relative(2 * k.R_K / k.Z0, 1 / k.alpha, 1e-3, "2 R_K / Z0 = 1/alpha");
}

std::string constants_json(const PhysConstants &k) {
    nlohmann::ordered_json j;
    j["version"] = std::string(k.version);
    j["h"] = k.h;
    j["hbar"] = k.hbar;
    j["e"] = k.e;
    j["c"] = k.c;
    j["eps0"] = k.eps0;
    j["mu0"] = k.mu0;
    j["k_B"] = k.k_B;
    j["sigma_SB"] = k.sigma_SB;
    j["wien_b"] = k.wien_b;
    j["m_e_c2"] = k.m_e_c2;
    j["alpha"] = k.alpha;
    j["Z0"] = k.Z0;
    j["phi0"] = k.phi0;
    j["R_K"] = k.R_K;
    j["Delta_Al"] = k.Delta_Al;
    return j.dump(2);
}

}  // namespace qtem::physcore
