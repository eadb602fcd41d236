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

#include <optional>
#include <string_view>
#include <vector>

#include "qtem/circuits/hamiltonian.hpp"

namespace qtem::circuits {

/// Hard-wall flux grid. n_points is odd so the window centre is a grid point.
struct GridConfig {
    double phi_min = 0;  // Wb
    double phi_max = 0;  // Wb
    int n_points = 2001;

    double spacing() const {
        return (phi_max - phi_min) / (n_points - 1);
    }
    double center() const {
        return 0.5 * (phi_min + phi_max);
    }
    /// phi_i = center + (i - mid) * spacing, exactly mirror-symmetric about the centre.
    double point(int i) const {
        return center() + (i - (n_points - 1) / 2) * spacing();
    }
    void validate() const;
};

enum class Parity { Even, Odd, None };

std::string_view parity_name(Parity p);

struct FluxSpectrum {
    std::vector<double> energies;                   // J, ascending
    std::vector<std::vector<double>> wavefunctions;  // sum psi^2 * spacing = 1
    std::vector<Parity> parities;
    GridConfig grid;
    int stencil_order = 8;
    /// Largest relative eigenvalue change against the grid with 2n-1 points
    /// (0 when no refinement check ran).
    double refinement_change = 0;
    bool refinement_checked = false;
    /// Largest probability within 5 points of either wall over all levels.
    double boundary_mass = 0;

    std::vector<double> grid_points() const;
};

struct SolverOptions {
    int n_levels = 4;
    /// Explicit grid; when absent the window is chosen automatically and the
    /// grid-doubling check always runs.
    std::optional<GridConfig> grid;
    /// Order of the central-difference second derivative: 2, 4, 6 or 8.
    int stencil_order = 8;
    /// Run the grid-doubling check for an explicit grid as well.
    bool check_refinement = false;
    double refinement_tolerance = 1e-8;
    double boundary_mass_tolerance = 1e-6;
    int max_points = 64001;
};

/// Automatic window: [lowest minimum - 8 sigma, highest minimum + 8 sigma]
/// over the degenerate global minima of V, sigma = sqrt(2) (hbar^2 L / 4C)^(1/4),
/// 2001 points. Needs a quadratic (confining) term.
GridConfig auto_grid(const HamiltonianSpec &spec);

/// Lowest n_levels eigenpairs of -hbar^2/2C d^2/dphi^2 + V(phi) discretised by
/// central differences with hard walls.
///
/// In automatic mode the grid is refined (n -> 2n-1) until doubling changes
/// every eigenvalue by less than the refinement tolerance, relative to
/// max(|E_n|, hbar/sqrt(LC)); the coarser grid of the passing pair is returned.
/// Throws ValidationError when a level leaks more than the boundary tolerance
/// within 5 points of a wall, and Error when refinement fails to converge.
FluxSpectrum solve_flux_spectrum(const HamiltonianSpec &spec, const SolverOptions &options = {});

/// True when V(phi_i) = V(-phi_i) on the grid (relative 1e-12) and the grid
/// is centred on zero.
bool is_symmetric(const HamiltonianSpec &spec, const GridConfig &grid);

}  // namespace qtem::circuits
