#include "snls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace snls {

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double quantile_linear(std::vector<double> sorted, double p) {
    // sorted must be nonempty and ascending; linear interpolation between
    // order statistics (the numpy default).
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

} // namespace

double mass(const ComplexField& u, const TriDiagMatrix& M) {
    return l2_norm_sq(u, M);
}

double hamiltonian(const ComplexField& u, const TriDiagMatrix& A, const Grid1D& grid, int lambda) {
    return 0.5 * h1_seminorm_sq(u, A) - (static_cast<double>(lambda) / 4.0) * l4_norm4(u, grid);
}

double h2_proxy_sq(const ComplexField& u, const TriDiagMatrix& M, const TriDiagMatrix& A,
                   const Grid1D& grid) {
    const std::size_t n = grid.n_interior();
    if (u.size() != n || M.size() != n || A.size() != n) {
        throw std::invalid_argument("h2_proxy_sq: dimension mismatch");
    }
    const double l2 = l2_norm_sq(u, M);
    const double h1 = h1_seminorm_sq(u, A);
    // Lumped-mass discrete Laplacian L_h u = -(1/h) A u, squared in the
    // lumped norm h * sum |.|^2 = (1/h) * sum |(A u)_i|^2.
    std::vector<cplx> au = A.apply(u.values);
    double lap = 0.0;
    for (const cplx& v : au) lap += std::norm(v);
    lap /= grid.h();
    return l2 + h1 + lap;
}

EnsembleStats ensemble_reduce(const std::vector<std::vector<StepDiagnostics>>& trajectories,
                              std::size_t n_failures) {
    if (trajectories.empty()) {
        throw std::invalid_argument("ensemble_reduce: empty ensemble");
    }
    const std::size_t n_steps = trajectories.front().size();
    for (const auto& t : trajectories) {
        if (t.size() != n_steps) {
            throw std::invalid_argument("ensemble_reduce: trajectories disagree on step count");
        }
    }

    EnsembleStats s;
    s.n_realizations = trajectories.size();
    s.n_failures = n_failures;
    s.times.resize(n_steps);
    s.mean_mass.assign(n_steps, 0.0);
    s.mean_hamiltonian.assign(n_steps, 0.0);
    s.mean_h1_semi_sq.assign(n_steps, 0.0);
    s.mean_h2_proxy_sq.assign(n_steps, 0.0);
    s.mean_newton_iters.assign(n_steps, 0.0);

    for (std::size_t k = 0; k < n_steps; ++k) s.times[k] = trajectories.front()[k].time;

    // Accumulate in realization index order for bit reproducibility.
    for (const auto& t : trajectories) {
        for (std::size_t k = 0; k < n_steps; ++k) {
            s.mean_mass[k] += t[k].mass;
            s.mean_hamiltonian[k] += t[k].hamiltonian;
            s.mean_h1_semi_sq[k] += t[k].h1_semi_sq;
            s.mean_h2_proxy_sq[k] += t[k].h2_proxy_sq;
            s.mean_newton_iters[k] += static_cast<double>(t[k].newton_iters);
        }
    }
    const double inv_r = 1.0 / static_cast<double>(s.n_realizations);
    for (std::size_t k = 0; k < n_steps; ++k) {
        s.mean_mass[k] *= inv_r;
        s.mean_hamiltonian[k] *= inv_r;
        s.mean_h1_semi_sq[k] *= inv_r;
        s.mean_h2_proxy_sq[k] *= inv_r;
        s.mean_newton_iters[k] *= inv_r;
    }

    s.mass_drift.resize(n_steps);
    s.max_abs_mass_drift = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        s.mass_drift[k] = s.mean_mass[k] - s.mean_mass[0];
        s.max_abs_mass_drift = std::max(s.max_abs_mass_drift, std::abs(s.mass_drift[k]));
    }
    s.max_mean_hamiltonian = *std::max_element(s.mean_hamiltonian.begin(), s.mean_hamiltonian.end());

    std::vector<double> h1_max(trajectories.size());
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        double m = 0.0;
        for (const auto& d : trajectories[r]) m = std::max(m, d.h1_semi_sq);
        h1_max[r] = std::sqrt(m);
    }
    std::sort(h1_max.begin(), h1_max.end());
    s.h1_max_quantiles = {quantile_linear(h1_max, 0.25), quantile_linear(h1_max, 0.5),
                          quantile_linear(h1_max, 0.75)};
    return s;
}

void write_trajectory_csv(const std::vector<StepDiagnostics>& steps, std::ostream& os) {
    os << "step,time,mass,hamiltonian,h1_semi_sq,h2_proxy_sq,newton_iters\n";
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto& d = steps[k];
        os << k << ',' << g17(d.time) << ',' << g17(d.mass) << ',' << g17(d.hamiltonian) << ','
           << g17(d.h1_semi_sq) << ',' << g17(d.h2_proxy_sq) << ',' << d.newton_iters << '\n';
    }
}

void write_ensemble_csv(const EnsembleStats& s, std::ostream& os) {
    os << "step,time,mass,hamiltonian,h1_semi_sq,h2_proxy_sq,newton_iters\n";
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        os << k << ',' << g17(s.times[k]) << ',' << g17(s.mean_mass[k]) << ','
           << g17(s.mean_hamiltonian[k]) << ',' << g17(s.mean_h1_semi_sq[k]) << ','
           << g17(s.mean_h2_proxy_sq[k]) << ',' << g17(s.mean_newton_iters[k]) << '\n';
    }
    os << "# realizations=" << s.n_realizations << " failures=" << s.n_failures << '\n';
    os << "# max_mean_hamiltonian=" << g17(s.max_mean_hamiltonian) << '\n';
    os << "# max_abs_mass_drift=" << g17(s.max_abs_mass_drift) << '\n';
    os << "# h1_max_quantiles=" << g17(s.h1_max_quantiles[0]) << ',' << g17(s.h1_max_quantiles[1])
       << ',' << g17(s.h1_max_quantiles[2]) << '\n';
}

} // namespace snls
