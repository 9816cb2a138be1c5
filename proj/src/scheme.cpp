#include "snls/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snls/diagnostics.hpp"
#include "snls/errors.hpp"

namespace snls {

ThetaPolicy ThetaPolicy::fixed(double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument("ThetaPolicy: fixed theta must lie in [0, 1]");
    }
    return ThetaPolicy{Fixed{value}};
}

ThetaPolicy ThetaPolicy::half_plus_c_sqrt_tau(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("ThetaPolicy: c must be positive");
    return ThetaPolicy{HalfPlusCSqrtTau{c}};
}

double resolve_theta(const ThetaPolicy& policy, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("resolve_theta: tau must be positive");
    if (const auto* f = std::get_if<ThetaPolicy::Fixed>(&policy.variant)) {
        return f->value;
    }
    const auto& p = std::get<ThetaPolicy::HalfPlusCSqrtTau>(policy.variant);
    return std::min(1.0, 0.5 + p.c * std::sqrt(tau));
}

void SchemeParams::validate() const {
    if (lambda != -1 && lambda != 1) throw std::invalid_argument("SchemeParams: lambda must be -1 or +1");
    if (!(tau > 0.0)) throw std::invalid_argument("SchemeParams: tau must be positive");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("SchemeParams: newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("SchemeParams: newton_max_iter must be >= 1");
}

namespace {

void require_dims(std::size_t n, const ComplexField& u, const ComplexField& phi_n,
                  std::span<const double> dW, const TriDiagMatrix& M, const TriDiagMatrix& A) {
    if (u.size() != n || phi_n.size() != n || dW.size() != n || M.size() != n || A.size() != n) {
        throw std::invalid_argument("scheme: dimension mismatch between field, noise and operators");
    }
}

double euclid_norm(const std::vector<cplx>& v) {
    double acc = 0.0;
    for (const cplx& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

// Nodal nonlinear + noise product before mass weighting:
//   g_i = lambda (tau/4) (|u_i|^2 + |phi_i|^2)(u_i + phi_i) - (dW_i/2)(u_i + phi_i)
std::vector<cplx> nodal_products(const ComplexField& u, const ComplexField& phi_n,
                                 std::span<const double> dW, const SchemeParams& params) {
    const double cub = params.lambda * params.tau * 0.25;
    std::vector<cplx> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const cplx mid = u.values[i] + phi_n.values[i];
        const double amp = std::norm(u.values[i]) + std::norm(phi_n.values[i]);
        g[i] = (cub * amp - 0.5 * dW[i]) * mid;
    }
    return g;
}

// Derivative of g_i with respect to (Re u_i, Im u_i).
Block2 nodal_product_block(cplx u, cplx phi, double dW_i, const SchemeParams& params) {
    const double cub = params.lambda * params.tau * 0.25;
    const double p = u.real(), q = u.imag();
    const double fr = phi.real(), fi = phi.imag();
    const double s = p * p + q * q + std::norm(phi);
    return Block2{
        cub * (2.0 * p * (p + fr) + s) - 0.5 * dW_i,
        cub * (2.0 * q * (p + fr)),
        cub * (2.0 * p * (q + fi)),
        cub * (2.0 * q * (q + fi) + s) - 0.5 * dW_i,
    };
}

inline void add_scaled(Block2& dst, double w, const Block2& src) {
    dst[0] += w * src[0];
    dst[1] += w * src[1];
    dst[2] += w * src[2];
    dst[3] += w * src[3];
}

std::vector<double> to_real(const std::vector<cplx>& v) {
    std::vector<double> x(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        x[2 * i] = v[i].real();
        x[2 * i + 1] = v[i].imag();
    }
    return x;
}

} // namespace

ComplexField residual(const ComplexField& u, const ComplexField& phi_n,
                      std::span<const double> dW, double theta, const SchemeParams& params,
                      const TriDiagMatrix& M, const TriDiagMatrix& A, const Grid1D& grid) {
    const std::size_t n = grid.n_interior();
    require_dims(n, u, phi_n, dW, M, A);

    std::vector<cplx> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = u.values[i] - phi_n.values[i];
    std::vector<cplx> m_diff = M.apply(diff);

    std::vector<cplx> lap(n);
    for (std::size_t i = 0; i < n; ++i) {
        lap[i] = theta * u.values[i] + (1.0 - theta) * phi_n.values[i];
    }
    std::vector<cplx> a_lap = A.apply(lap);

    std::vector<cplx> g = nodal_products(u, phi_n, dW, params);
    std::vector<cplx> wg;
    if (params.quadrature == NonlinearQuadrature::ConsistentMass) {
        wg = M.apply(g);
    } else {
        wg.resize(n);
        const double h = grid.h();
        for (std::size_t i = 0; i < n; ++i) wg[i] = h * g[i];
    }

    ComplexField r;
    r.grid_id = grid.id();
    r.values.resize(n);
    const cplx iu(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        r.values[i] = iu * m_diff[i] - params.tau * a_lap[i] + wg[i];
    }
    return r;
}

BlockTridiagMatrix jacobian(const ComplexField& u, const ComplexField& phi_n,
                            std::span<const double> dW, double theta, const SchemeParams& params,
                            const TriDiagMatrix& M, const TriDiagMatrix& A, const Grid1D& grid) {
    const std::size_t n = grid.n_interior();
    require_dims(n, u, phi_n, dW, M, A);

    BlockTridiagMatrix J;
    J.resize(n);

    // Linear contributions: i M - tau theta A. Multiplication by i maps the
    // 2x2 identity pattern to the rotation [[0,-1],[1,0]].
    for (std::size_t i = 0; i < n; ++i) {
        const double m = M.diag[i], a = A.diag[i];
        J.diag[i] = Block2{-params.tau * theta * a, -m, m, -params.tau * theta * a};
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double m = M.off[i], a = A.off[i];
        const Block2 blk{-params.tau * theta * a, -m, m, -params.tau * theta * a};
        J.sup[i] = blk;
        J.sub[i] = blk;
    }

    // Nonlinear + noise contributions: W_q applied to the per-node blocks.
    // Column j of M g(u) differentiates to M_ij * D_j, so the block D_j
    // lands on the whole column j of the block matrix.
    if (params.quadrature == NonlinearQuadrature::ConsistentMass) {
        for (std::size_t j = 0; j < n; ++j) {
            const Block2 d = nodal_product_block(u.values[j], phi_n.values[j], dW[j], params);
            add_scaled(J.diag[j], M.diag[j], d);
            if (j > 0) add_scaled(J.sup[j - 1], M.off[j - 1], d);
            if (j + 1 < n) add_scaled(J.sub[j], M.off[j], d);
        }
    } else {
        const double h = grid.h();
        for (std::size_t i = 0; i < n; ++i) {
            const Block2 d = nodal_product_block(u.values[i], phi_n.values[i], dW[i], params);
            add_scaled(J.diag[i], h, d);
        }
    }
    return J;
}

std::pair<ComplexField, StepReport> solve_step(const ComplexField& phi_n,
                                               std::span<const double> dW,
                                               const SchemeParams& params, const TriDiagMatrix& M,
                                               const TriDiagMatrix& A, const Grid1D& grid) {
    params.validate();
    const std::size_t n = grid.n_interior();
    const double theta = resolve_theta(params.theta_policy, params.tau);
    const double tol = params.newton_tol * std::sqrt(static_cast<double>(n));

    ComplexField u = phi_n;
    ComplexField r = residual(u, phi_n, dW, theta, params, M, A, grid);
    double res_norm = euclid_norm(r.values);
    const double res0 = res_norm;

    StepReport report;
    report.theta_used = theta;

    for (int iter = 0; iter <= params.newton_max_iter; ++iter) {
        if (res_norm <= tol) {
            report.newton_iters = iter;
            report.final_residual = res_norm;
            return {std::move(u), report};
        }
        if (!std::isfinite(res_norm) || res_norm > 1e6 * std::max(res0, tol)) {
            throw NonConvergenceError("Newton residual diverged", 0, iter, res_norm);
        }
        if (iter == params.newton_max_iter) break;

        BlockTridiagMatrix J = jacobian(u, phi_n, dW, theta, params, M, A, grid);
        std::vector<double> delta = to_real(r.values);
        for (double& v : delta) v = -v;
        block_tridiag_solve(J, delta);

        // Full step first; halve while the residual would grow.
        double scale = 1.0;
        ComplexField u_try;
        ComplexField r_try;
        double rn_try = 0.0;
        for (int bt = 0;; ++bt) {
            u_try = u;
            for (std::size_t i = 0; i < n; ++i) {
                u_try.values[i] += scale * cplx(delta[2 * i], delta[2 * i + 1]);
            }
            r_try = residual(u_try, phi_n, dW, theta, params, M, A, grid);
            rn_try = euclid_norm(r_try.values);
            if (rn_try < res_norm || bt >= 8) break;
            scale *= 0.5;
        }
        u = std::move(u_try);
        r = std::move(r_try);
        res_norm = rn_try;
    }
    throw NonConvergenceError("Newton iterations exhausted", 0, params.newton_max_iter, res_norm);
}

TrajectoryResult run_trajectory(const ComplexField& psi0, const WienerPath& path,
                                const NoiseModel& model, const SchemeParams& params,
                                const Grid1D& grid, const TriDiagMatrix& M,
                                const TriDiagMatrix& A,
                                const std::vector<std::size_t>& snapshot_steps) {
    params.validate();
    if (psi0.grid_id != 0 && psi0.grid_id != grid.id()) {
        throw std::invalid_argument("run_trajectory: initial field built on another grid");
    }
    if (psi0.size() != grid.n_interior()) {
        throw std::invalid_argument("run_trajectory: initial field dimension mismatch");
    }
    if (std::abs(params.tau - path.tau) > 1e-12 * std::max(params.tau, path.tau)) {
        throw std::invalid_argument("run_trajectory: params.tau disagrees with path.tau");
    }

    TrajectoryResult result;
    result.steps.reserve(path.n_steps + 1);

    auto record = [&](const ComplexField& phi, std::size_t step, int iters) {
        StepDiagnostics d;
        d.time = static_cast<double>(step) * path.tau;
        d.mass = mass(phi, M);
        d.hamiltonian = hamiltonian(phi, A, grid, params.lambda);
        d.h1_semi_sq = h1_seminorm_sq(phi, A);
        d.h2_proxy_sq = h2_proxy_sq(phi, M, A, grid);
        d.newton_iters = iters;
        result.steps.push_back(d);
        return d;
    };

    auto maybe_snapshot = [&](const ComplexField& phi, std::size_t step) {
        if (std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end()) {
            result.snapshots.push_back(
                Snapshot{step, static_cast<double>(step) * path.tau, phi.values});
        }
    };

    ComplexField phi = psi0;
    phi.grid_id = grid.id();
    StepDiagnostics d0 = record(phi, 0, 0);
    maybe_snapshot(phi, 0);
    const bool guard = (params.lambda == 1);
    double h1_full_sq = d0.mass + d0.h1_semi_sq;

    for (std::size_t step = 0; step < path.n_steps; ++step) {
        if (guard && h1_full_sq > 1e6) {
            throw NonConvergenceError("amplitude guard tripped (focusing run)", step, 0,
                                      std::sqrt(h1_full_sq));
        }
        const std::vector<double> dW = expand_increment(model, path, step);
        try {
            auto [next, report] = solve_step(phi, dW, params, M, A, grid);
            phi = std::move(next);
            const StepDiagnostics d = record(phi, step + 1, report.newton_iters);
            h1_full_sq = d.mass + d.h1_semi_sq;
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(std::string(e.what()) + " at step " + std::to_string(step),
                                      step, e.iterations(), e.residual());
        }
        maybe_snapshot(phi, step + 1);
    }
    result.final_field = std::move(phi);
    return result;
}

} // namespace snls
