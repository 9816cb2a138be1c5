#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "snls/grid.hpp"

namespace snls {

enum class CoeffRule { OneOverEll, Custom };

/// Spectral description of the driving Q-Wiener process:
/// W(t) = nu * sum_l q_l e_l(x) beta_l(t), with sine modes e_l respecting
/// the Dirichlet boundary. mode_values caches e_l at the interior nodes.
class NoiseModel {
public:
    NoiseModel(int n_modes, double nu, CoeffRule rule, std::vector<double> custom_coeffs,
               const Grid1D& grid);

    int n_modes() const { return n_modes_; }
    double nu() const { return nu_; }
    const std::vector<double>& coeffs() const { return q_; }
    std::uint64_t grid_id() const { return grid_id_; }
    std::size_t n_nodes() const { return n_nodes_; }

    /// e_l evaluated at interior node i (l is 0-based here).
    double mode_value(int l, std::size_t i) const {
        return mode_values_[static_cast<std::size_t>(l) * n_nodes_ + i];
    }

private:
    int n_modes_;
    double nu_;
    std::vector<double> q_;
    std::vector<double> mode_values_; // n_modes x n_nodes, mode-major
    std::uint64_t grid_id_;
    std::size_t n_nodes_;
};

NoiseModel make_noise_model(int n_modes, double nu, CoeffRule rule, const Grid1D& grid,
                            std::vector<double> custom_coeffs = {});

/// Realized per-mode Brownian increments, step-major. Increments live in
/// mode space; nodal fields are expanded on demand so coarsening stays
/// exact and storage scales with the mode count.
struct WienerPath {
    double tau = 0.0;
    std::size_t n_steps = 0;
    std::size_t n_modes = 0;
    std::vector<double> increments; // n_steps x n_modes

    double increment(std::size_t step, std::size_t mode) const {
        return increments[step * n_modes + mode];
    }
};

/// Samples a path of i.i.d. Normal(0, tau) increments per (mode, step).
/// The tuple (seed, tau, n_steps, model) fully determines the result.
WienerPath sample_path(const NoiseModel& model, std::uint64_t seed, double tau,
                       std::size_t n_steps);

/// Nodal field of the increment at one step:
/// dW_n(x_i) = nu * sum_l q_l e_l(x_i) dbeta_{l,n}.
std::vector<double> expand_increment(const NoiseModel& model, const WienerPath& path,
                                     std::size_t step);

/// Sums groups of k consecutive fine increments per mode; tau' = k*tau.
/// k must divide n_steps.
WienerPath coarsen(const WienerPath& path, std::size_t factor);

/// F_Q(x_i) = sum_l (nu q_l e_l(x_i))^2 — the pointwise increment variance
/// per unit time (Ito correction field).
std::vector<double> f_q(const NoiseModel& model, const Grid1D& grid);

/// Debug dump/restore of the increment table as CSV (step-major rows,
/// mode-minor columns). Round-trips bit-exactly.
void dump_path(const WienerPath& path, std::ostream& os);
WienerPath load_path(std::istream& is);

} // namespace snls
