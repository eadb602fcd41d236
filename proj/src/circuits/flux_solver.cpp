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

#include "qtem/circuits/flux_solver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qtem/circuits/potential.hpp"
#include "qtem/error.hpp"
#include "qtem/physcore.hpp"

namespace qtem::circuits {

namespace {

// Central-difference second-derivative weights c_0..c_{p/2}.
std::vector<double> stencil(int order) {
    switch (order) {
        case 2:
            return {-2.0, 1.0};
        case 4:
            return {-5.0 / 2, 4.0 / 3, -1.0 / 12};
        case 6:
            return {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
        case 8:
            return {-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
    }
    throw ValidationError("stencil order must be 2, 4, 6 or 8 (got " + std::to_string(order) + ")");
}

/// Banded H / E_s with E_s = hbar^2 / (2 C h^2): diagonal and off-diagonals.
struct BandedOperator {
    int n = 0;
    int kd = 0;
    std::vector<double> diag;     // n
    std::vector<double> offdiag;  // kd, constant along each band
    double scale = 0;             // E_s [J]

    double apply_row(const std::vector<double> &x, int i) const {
        double s = diag[i] * x[i];
        for (int k = 1; k <= kd; ++k) {
            if (i - k >= 0) s += offdiag[k - 1] * x[i - k];
            if (i + k < n) s += offdiag[k - 1] * x[i + k];
        }
        return s;
    }
};

BandedOperator discretize(const HamiltonianSpec &spec, const GridConfig &grid, int order) {
    const double hbar = physcore::constants().hbar;
    const auto c = stencil(order);
    BandedOperator op;
    op.n = grid.n_points;
    op.kd = static_cast<int>(c.size()) - 1;
    const double h = grid.spacing();
    op.scale = hbar * hbar / (2.0 * spec.capacitance(0) * h * h);
    op.diag.resize(op.n);
    for (int i = 0; i < op.n; ++i) {
        op.diag[i] = -c[0] + spec.potential(grid.point(i)) / op.scale;
    }
    for (int k = 1; k <= op.kd; ++k) {
        op.offdiag.push_back(-c[k]);
    }
    return op;
}

std::vector<double> lowest_eigenvalues(const BandedOperator &op, int count) {
    const int n = op.n;
    const int kd = op.kd;
    const int ldab = kd + 1;
    std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
    // Upper band storage: A(i, j), i <= j, at row kd + i - j of column j.
    for (int j = 0; j < n; ++j) {
        ab[kd + j * ldab] = op.diag[j];
        for (int k = 1; k <= kd && j - k >= 0; ++k) {
            ab[(kd - k) + j * ldab] = op.offdiag[k - 1];
        }
    }
    std::vector<double> w(n);
    std::vector<lapack_int> ifail(n);
    double q_dummy = 0;
    double z_dummy = 0;
    lapack_int found = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, ab.data(), ldab, &q_dummy, 1, 0.0,
                                           0.0, 1, count, abstol, &found, w.data(), &z_dummy, 1, ifail.data());
    if (info != 0 || found != count) {
        throw Error("banded eigensolver failed (info " + std::to_string(info) + ")");
    }
    w.resize(count);
    return w;
}

/// Deterministic, generic start vector for inverse iteration.
std::vector<double> start_vector(int n, int level) {
    std::vector<double> x(n);
    std::uint64_t s = 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(level);
    for (int i = 0; i < n; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        x[i] = 0.5 + static_cast<double>(s >> 11) * 0x1.0p-53;
    }
    return x;
}

double normalize(std::vector<double> &x) {
    double s = 0;
    for (double v : x) s += v * v;
    s = std::sqrt(s);
    for (double &v : x) v /= s;
    return s;
}

void orthogonalize(std::vector<double> &x, const std::vector<std::vector<double>> &basis) {
    for (const auto &b : basis) {
        double dot = 0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += b[i] * x[i];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dot * b[i];
    }
}

/// Inverse iteration on the shifted band matrix; unit 2-norm result.
std::vector<double> eigenvector(const BandedOperator &op, double lambda, int level,
                                const std::vector<std::vector<double>> &previous) {
    const int n = op.n;
    const int kl = op.kd;
    const int ku = op.kd;
    const int ldab = 2 * kl + ku + 1;
    double norm_bound = std::abs(*std::max_element(op.diag.begin(), op.diag.end(),
                                                   [](double a, double b) { return std::abs(a) < std::abs(b); }));
    for (double o : op.offdiag) norm_bound += 2 * std::abs(o);

    std::vector<double> ab;
    std::vector<lapack_int> ipiv(n);
    double shift = lambda;
    for (int attempt = 0;; ++attempt) {
        ab.assign(static_cast<std::size_t>(ldab) * n, 0.0);
        for (int j = 0; j < n; ++j) {
            ab[(kl + ku) + j * ldab] = op.diag[j] - shift;
            for (int k = 1; k <= op.kd; ++k) {
                if (j - k >= 0) ab[(kl + ku - k) + j * ldab] = op.offdiag[k - 1];  // A(j-k, j)
                if (j + k < n) ab[(kl + ku + k) + j * ldab] = op.offdiag[k - 1];  // A(j+k, j)
            }
        }
        const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
        if (info == 0) break;
        if (info < 0 || attempt > 4) throw Error("band LU factorisation failed");
        shift += 1e-14 * norm_bound * (attempt + 1);
    }

    std::vector<double> x = start_vector(n, level);
    orthogonalize(x, previous);
    normalize(x);
    std::vector<double> hx(n);
    for (int iter = 0; iter < 12; ++iter) {
        const lapack_int info =
            LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab, ipiv.data(), x.data(), n);
        if (info != 0) throw Error("band solve failed");
        orthogonalize(x, previous);
        normalize(x);
        if (iter < 2) continue;
        double residual = 0;
        for (int i = 0; i < n; ++i) {
            residual = std::max(residual, std::abs(op.apply_row(x, i) - lambda * x[i]));
        }
        if (residual <= 1e-11 * norm_bound) break;
    }
    return x;
}

void fix_sign(std::vector<double> &psi) {
    double peak = 0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    const int n = static_cast<int>(psi.size());
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(psi[i]);
        if (a <= 1e-3 * peak) continue;
        const bool left_ok = i == 0 || a >= std::abs(psi[i - 1]);
        const bool right_ok = i == n - 1 || a >= std::abs(psi[i + 1]);
        if (left_ok && right_ok) {
            if (psi[i] < 0) {
                for (double &v : psi) v = -v;
            }
            return;
        }
    }
}

Parity classify(const std::vector<double> &psi, double h) {
    const std::size_t n = psi.size();
    double overlap = 0;
    for (std::size_t i = 0; i < n; ++i) overlap += psi[i] * psi[n - 1 - i] * h;
    if (overlap >= 1 - 1e-6) return Parity::Even;
    if (overlap <= -(1 - 1e-6)) return Parity::Odd;
    return Parity::None;
}

/// Natural energy unit of the spec, used to make eigenvalue changes relative.
double energy_scale(const HamiltonianSpec &spec, const GridConfig &grid) {
    const double hbar = physcore::constants().hbar;
    const double c = spec.capacitance(0);
    if (auto l = spec.inductance(0)) return hbar / std::sqrt(*l * c);
    const double ej = spec.josephson_energy(0);
    if (ej > 0) {
        const double k = 2 * std::numbers::pi / physcore::constants().phi0;
        return hbar * std::sqrt(ej * k * k / c);
    }
    const double w = grid.phi_max - grid.phi_min;
    return hbar * hbar / (c * w * w);
}

FluxSpectrum solve_on(const HamiltonianSpec &spec, const GridConfig &grid, const SolverOptions &options) {
    grid.validate();
    if (options.n_levels > grid.n_points / 4) {
        throw ValidationError("too many levels requested for a " + std::to_string(grid.n_points) + "-point grid");
    }
    const BandedOperator op = discretize(spec, grid, options.stencil_order);
    const auto scaled = lowest_eigenvalues(op, options.n_levels);
    const double h = grid.spacing();
    const bool symmetric = is_symmetric(spec, grid);

    FluxSpectrum out;
    out.grid = grid;
    out.stencil_order = options.stencil_order;
    for (int level = 0; level < options.n_levels; ++level) {
        auto psi = eigenvector(op, scaled[level], level, out.wavefunctions);
        out.energies.push_back(scaled[level] * op.scale);
        out.wavefunctions.push_back(psi);
    }
    for (auto &psi : out.wavefunctions) {
        const double inv = 1.0 / std::sqrt(h);
        for (double &v : psi) v *= inv;
        // Grid-measure normalisation, sum psi^2 h = 1.
        double norm = 0;
        for (double v : psi) norm += v * v * h;
        const double fix = 1.0 / std::sqrt(norm);
        for (double &v : psi) v *= fix;
        fix_sign(psi);
        out.parities.push_back(symmetric ? classify(psi, h) : Parity::None);

        const int n = grid.n_points;
        const int edge = std::min(5, n / 2);
        double left = 0;
        double right = 0;
        for (int i = 0; i < edge; ++i) {
            left += psi[i] * psi[i] * h;
            right += psi[n - 1 - i] * psi[n - 1 - i] * h;
        }
        out.boundary_mass = std::max({out.boundary_mass, left, right});
    }
    for (std::size_t i = 1; i < out.energies.size(); ++i) {
        if (!(out.energies[i] > out.energies[i - 1])) {
            throw Error("eigenvalues not strictly ascending (numerical degeneracy)");
        }
    }
    if (out.boundary_mass > options.boundary_mass_tolerance) {
        std::ostringstream os;
        os << "grid too small: probability " << out.boundary_mass << " within 5 points of a wall exceeds "
           << options.boundary_mass_tolerance << " (widen the window or request fewer levels)";
        throw ValidationError(os.str());
    }
    return out;
}

}  // namespace

void GridConfig::validate() const {
    if (n_points < 3 || n_points % 2 == 0) {
        throw ValidationError("grid n_points must be odd and at least 3 (got " + std::to_string(n_points) + ")");
    }
    if (!(phi_max > phi_min) || !std::isfinite(phi_min) || !std::isfinite(phi_max)) {
        throw ValidationError("grid requires phi_max > phi_min");
    }
}

std::string_view parity_name(Parity p) {
    switch (p) {
        case Parity::Even:
            return "even";
        case Parity::Odd:
            return "odd";
        case Parity::None:
            return "none";
    }
    return "none";
}

std::vector<double> FluxSpectrum::grid_points() const {
    std::vector<double> pts(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) pts[i] = grid.point(i);
    return pts;
}

bool is_symmetric(const HamiltonianSpec &spec, const GridConfig &grid) {
    const double width = grid.phi_max - grid.phi_min;
    if (std::abs(grid.center()) > 1e-12 * width) return false;
    std::vector<double> v(grid.n_points);
    double vmax = 0;
    for (int i = 0; i < grid.n_points; ++i) {
        v[i] = spec.potential(grid.point(i));
        vmax = std::max(vmax, std::abs(v[i]));
    }
    for (int i = 0; i < grid.n_points / 2; ++i) {
        if (std::abs(v[i] - v[grid.n_points - 1 - i]) > 1e-12 * vmax) return false;
    }
    return true;
}

GridConfig auto_grid(const HamiltonianSpec &spec) {
    if (spec.num_variables() != 1) throw ValidationError("flux solver needs exactly one variable");
    const auto l = spec.inductance(0);
    if (!l) throw ValidationError("automatic grid needs a confining phi^2/2L term; pass an explicit grid");
    const auto &k = physcore::constants();
    const double c = spec.capacitance(0);
    const double sigma = std::sqrt(2.0) * std::pow(k.hbar * k.hbar * *l / (4.0 * c), 0.25);

    // All minima lie where |phi/L| <= |b| + I_c.
    const double ic = 2 * std::numbers::pi * spec.josephson_energy(0) / k.phi0;
    const double reach = *l * (std::abs(spec.linear_coefficient(0)) + ic) + 0.5 * k.phi0;
    const double step = std::min(k.phi0 / 400, sigma / 20);
    const int samples = static_cast<int>(std::min(2.0e6, std::ceil(2 * reach / step))) + 1;
    auto minima = find_potential_minima(spec, -reach, reach, samples);
    if (minima.empty()) throw Error("no potential minimum found");

    double vmin = spec.potential(minima.front());
    for (double m : minima) vmin = std::min(vmin, spec.potential(m));
    const double tol = 1e-9 * std::max({std::abs(vmin), spec.josephson_energy(0), k.hbar / std::sqrt(*l * c)});
    double lo = 0;
    double hi = 0;
    bool first = true;
    for (double m : minima) {
        if (spec.potential(m) > vmin + tol) continue;
        if (first) lo = hi = m;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        first = false;
    }
    GridConfig g;
    g.phi_min = lo - 8 * sigma;
    g.phi_max = hi + 8 * sigma;
    // Symmetric potentials give a window centred on zero up to root-finder noise.
    if (std::abs(lo + hi) <= 1e-9 * (g.phi_max - g.phi_min)) {
        const double half = 0.5 * (g.phi_max - g.phi_min);
        g.phi_min = -half;
        g.phi_max = half;
    }
    g.n_points = 2001;
    return g;
}

FluxSpectrum solve_flux_spectrum(const HamiltonianSpec &spec, const SolverOptions &options) {
    spec.validate();
    if (spec.num_variables() != 1) {
        throw ValidationError("flux solver needs exactly one dynamical variable (got " +
                              std::to_string(spec.num_variables()) + ")");
    }
    if (options.n_levels < 1) throw ValidationError("n_levels must be at least 1");
    stencil(options.stencil_order);

    const bool automatic = !options.grid.has_value();
    GridConfig grid = automatic ? auto_grid(spec) : *options.grid;
    FluxSpectrum current = solve_on(spec, grid, options);
    if (!automatic && !options.check_refinement) return current;

    const double scale = energy_scale(spec, grid);
    for (;;) {
        GridConfig fine = grid;
        fine.n_points = 2 * grid.n_points - 1;
        if (fine.n_points > options.max_points) {
            throw Error("grid refinement did not converge below " + std::to_string(options.max_points) + " points");
        }
        FluxSpectrum refined = solve_on(spec, fine, options);
        double change = 0;
        for (std::size_t i = 0; i < current.energies.size(); ++i) {
            const double denom = std::max(std::abs(current.energies[i]), scale);
            change = std::max(change, std::abs(refined.energies[i] - current.energies[i]) / denom);
        }
        if (change < options.refinement_tolerance) {
            current.refinement_change = change;
            current.refinement_checked = true;
            return current;
        }
        grid = fine;
        current = std::move(refined);
    }
}

}  // namespace qtem::circuits
