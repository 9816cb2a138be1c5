#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "snls/block_tridiag.hpp"
#include "snls/grid.hpp"
#include "snls/noise.hpp"

namespace snls {

/// Implicitness parameter selection. HalfPlusCSqrtTau resolves to
/// min(1, 1/2 + c*sqrt(tau)); the damping it adds is what keeps the
/// stochastic runs stable, so it is a first-class policy rather than a
/// precomputed number.
struct ThetaPolicy {
    struct Fixed {
        double value;
    };
    struct HalfPlusCSqrtTau {
        double c;
    };
    std::variant<Fixed, HalfPlusCSqrtTau> variant;

    static ThetaPolicy fixed(double value);
    static ThetaPolicy half_plus_c_sqrt_tau(double c = 1.0);
};

double resolve_theta(const ThetaPolicy& policy, double tau);

/// Which mass weighting the nodal nonlinear/noise products receive.
/// Lumped (h * identity) is the default; ConsistentMass applies the full
/// P1 mass matrix instead, for quadrature sensitivity checks.
enum class NonlinearQuadrature { Lumped, ConsistentMass };

struct SchemeParams {
    int lambda = -1; // nonlinearity sign, -1 defocusing / +1 focusing
    ThetaPolicy theta_policy = ThetaPolicy::fixed(0.5);
    double tau = 0.0;
    double newton_tol = 1e-12; // scaled by sqrt(#unknowns) at solve time
    int newton_max_iter = 50;
    NonlinearQuadrature quadrature = NonlinearQuadrature::Lumped;

    void validate() const;
};

struct StepReport {
    int newton_iters = 0;
    double final_residual = 0.0;
    double theta_used = 0.0;
};

/// Nonlinear residual of one implicit step, evaluated at candidate u:
///   R(u) = i M (u - phi_n) - tau [theta A u + (1-theta) A phi_n]
///          + W_q [ lambda (tau/4) (|u|^2 + |phi_n|^2)(u + phi_n)
///                  - (dW/2)(u + phi_n) ]
/// with W_q = h*I (lumped) or M (consistent mass), all products nodal.
ComplexField residual(const ComplexField& u, const ComplexField& phi_n,
                      std::span<const double> dW, double theta, const SchemeParams& params,
                      const TriDiagMatrix& M, const TriDiagMatrix& A, const Grid1D& grid);

/// Exact derivative of the residual with respect to (Re u, Im u), as a
/// real block-tridiagonal matrix with 2x2 blocks.
BlockTridiagMatrix jacobian(const ComplexField& u, const ComplexField& phi_n,
                            std::span<const double> dW, double theta, const SchemeParams& params,
                            const TriDiagMatrix& M, const TriDiagMatrix& A, const Grid1D& grid);

/// One implicit step by Newton's method started at phi_n, banded block LU
/// for the linear solves, simple halving backtracking. Throws
/// NonConvergenceError when the iteration budget is exhausted or the
/// residual diverges.
std::pair<ComplexField, StepReport> solve_step(const ComplexField& phi_n,
                                               std::span<const double> dW,
                                               const SchemeParams& params, const TriDiagMatrix& M,
                                               const TriDiagMatrix& A, const Grid1D& grid);

/// Per-step functionals recorded along a trajectory.
struct StepDiagnostics {
    double time = 0.0;
    double mass = 0.0;
    double hamiltonian = 0.0;
    double h1_semi_sq = 0.0;
    double h2_proxy_sq = 0.0;
    int newton_iters = 0;
};

struct Snapshot {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<cplx> values;
};

struct TrajectoryResult {
    ComplexField final_field;
    std::vector<StepDiagnostics> steps; // size n_steps + 1, entry 0 is the initial state
    std::vector<Snapshot> snapshots;
};

/// Runs the scheme over all increments of the path. Diagnostics are
/// recorded at every step; full fields are stored at the requested step
/// indices. NonConvergenceError propagates with the failing step index.
/// For lambda = +1 an amplitude guard aborts once ||phi||_{H1} > 1e3.
TrajectoryResult run_trajectory(const ComplexField& psi0, const WienerPath& path,
                                const NoiseModel& model, const SchemeParams& params,
                                const Grid1D& grid, const TriDiagMatrix& M,
                                const TriDiagMatrix& A,
                                const std::vector<std::size_t>& snapshot_steps = {});

} // namespace snls
