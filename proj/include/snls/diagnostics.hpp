#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "snls/grid.hpp"
#include "snls/scheme.hpp"

namespace snls {

/// Squared discrete L2 norm — the conserved "mass" of the equation.
double mass(const ComplexField& u, const TriDiagMatrix& M);

/// H(u) = 1/2 |u|_{H1}^2 - (lambda/4) ||u||_{L4}^4.
double hamiltonian(const ComplexField& u, const TriDiagMatrix& A, const Grid1D& grid, int lambda);

/// Discrete H2 surrogate: ||u||^2 + |u|_{H1}^2 + ||L_h u||^2 where
/// L_h = -D^{-1} A is the lumped-mass discrete Laplacian (D = h I) and the
/// last norm is the lumped one, h * sum |.|^2.
double h2_proxy_sq(const ComplexField& u, const TriDiagMatrix& M, const TriDiagMatrix& A,
                   const Grid1D& grid);

/// Ensemble reduction of per-step diagnostics over the successful
/// realizations of a run.
struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> mean_mass;
    std::vector<double> mean_hamiltonian;
    std::vector<double> mean_h1_semi_sq;
    std::vector<double> mean_h2_proxy_sq;
    std::vector<double> mean_newton_iters;
    std::vector<double> mass_drift; // mean_mass[n] - mean_mass[0]
    double max_mean_hamiltonian = 0.0;
    double max_abs_mass_drift = 0.0;
    /// Quantiles {0.25, 0.5, 0.75} of max_n sqrt(h1_semi_sq) over realizations.
    std::array<double, 3> h1_max_quantiles{};
    std::size_t n_realizations = 0;
    std::size_t n_failures = 0;
};

/// Means are taken in realization index order (deterministic reduction).
/// All trajectories must share step count and times. Throws
/// std::invalid_argument on an empty ensemble.
EnsembleStats ensemble_reduce(const std::vector<std::vector<StepDiagnostics>>& trajectories,
                              std::size_t n_failures = 0);

/// CSV emission. Trajectory mode: one row per step with the column set
/// step,time,mass,hamiltonian,h1_semi_sq,h2_proxy_sq,newton_iters.
void write_trajectory_csv(const std::vector<StepDiagnostics>& steps, std::ostream& os);

/// Ensemble mode: per-step means under the same header plus a trailing
/// summary block of comment lines.
void write_ensemble_csv(const EnsembleStats& stats, std::ostream& os);

} // namespace snls
