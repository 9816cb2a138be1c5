#include "snls/selftest.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <vector>

#include "snls/diagnostics.hpp"
#include "snls/noise.hpp"
#include "snls/rng.hpp"
#include "snls/scheme.hpp"

namespace snls {

namespace {

struct Reporter {
    std::ostream& os;
    bool all_ok = true;

    void check(const char* name, bool ok) {
        os << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        all_ok = all_ok && ok;
    }
};

ComplexField random_field(const Grid1D& grid, std::uint64_t seed, std::uint32_t tag) {
    ComplexField f = zero_field(grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.values[i] = cplx(standard_normal_at(seed, tag, 0, static_cast<std::uint32_t>(i)),
                           standard_normal_at(seed, tag, 1, static_cast<std::uint32_t>(i)));
    }
    return f;
}

std::vector<double> random_noise(const Grid1D& grid, std::uint64_t seed, std::uint32_t tag) {
    std::vector<double> w(grid.n_interior());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = 0.3 * standard_normal_at(seed, tag, 2, static_cast<std::uint32_t>(i));
    }
    return w;
}

// Published test vectors for the 10-round 4x32 generator.
bool philox_known_answers() {
    using philox::block;
    const philox::Counter z = block({0u, 0u, 0u, 0u}, {0u, 0u});
    const philox::Counter f = block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
    const philox::Counter pi = block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
    const philox::Counter ez = {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
    const philox::Counter ef = {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
    const philox::Counter epi = {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};
    return z == ez && f == ef && pi == epi;
}

bool jacobian_vs_central_differences() {
    const Grid1D grid = build_grid(0.0, 1.0, 6); // 5 interior nodes
    const TriDiagMatrix M = assemble_mass(grid);
    const TriDiagMatrix A = assemble_stiffness(grid);
    const std::size_t n = grid.n_interior();
    const double eps = 1e-6;
    double worst = 0.0;

    for (std::uint32_t inst = 0; inst < 100; ++inst) {
        SchemeParams params;
        params.lambda = (inst % 2 == 0) ? -1 : 1;
        params.tau = 0.01;
        const double theta = 0.5 + 0.4 * uniform_open01(philox::block(
                                                            {inst, 7u, 0u, 0u},
                                                            philox::key_from_seed(42))[0]);
        const ComplexField u = random_field(grid, 1000 + inst, 0);
        const ComplexField phi = random_field(grid, 1000 + inst, 1);
        const std::vector<double> dW = random_noise(grid, 1000 + inst, 2);

        const BlockTridiagMatrix J = jacobian(u, phi, dW, theta, params, M, A, grid);
        for (std::size_t k = 0; k < 2 * n; ++k) {
            ComplexField up = u, um = u;
            if (k % 2 == 0) {
                up.values[k / 2] += eps;
                um.values[k / 2] -= eps;
            } else {
                up.values[k / 2] += cplx(0.0, eps);
                um.values[k / 2] -= cplx(0.0, eps);
            }
            const ComplexField rp = residual(up, phi, dW, theta, params, M, A, grid);
            const ComplexField rm = residual(um, phi, dW, theta, params, M, A, grid);
            std::vector<double> col(2 * n);
            std::vector<double> e(2 * n, 0.0);
            e[k] = 1.0;
            J.apply(e, col);
            for (std::size_t i = 0; i < n; ++i) {
                const cplx fd = (rp.values[i] - rm.values[i]) / (2.0 * eps);
                worst = std::max(worst, std::abs(fd.real() - col[2 * i]));
                worst = std::max(worst, std::abs(fd.imag() - col[2 * i + 1]));
            }
        }
    }
    return worst <= 1e-6;
}

// Dense complex LU-free 3x3 solve used only here.
std::vector<cplx> dense_solve3(std::vector<cplx> a, std::vector<cplx> b) {
    const std::size_t n = 3;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        cplx acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return x;
}

// Damped preconditioned fixed point on the same residual; independent of
// the Newton path (dense constant preconditioner, no Jacobian).
bool newton_vs_fixed_point() {
    const Grid1D grid = build_grid(0.0, 1.0, 4); // 3 interior nodes
    const TriDiagMatrix M = assemble_mass(grid);
    const TriDiagMatrix A = assemble_stiffness(grid);
    const std::size_t n = grid.n_interior();
    double worst = 0.0;

    for (std::uint32_t inst = 0; inst < 20; ++inst) {
        SchemeParams params;
        params.lambda = -1;
        params.tau = 1e-3;
        params.theta_policy = ThetaPolicy::fixed(0.7);
        const double theta = 0.7;
        ComplexField phi = random_field(grid, 5000 + inst, 0);
        for (auto& v : phi.values) v *= 0.5; // entries bounded by ~1
        std::vector<double> dW = random_noise(grid, 5000 + inst, 1);

        auto [u_newton, report] = solve_step(phi, dW, params, M, A, grid);

        // P = i M - tau theta A as a dense complex matrix.
        std::vector<cplx> P(n * n, cplx(0, 0));
        for (std::size_t i = 0; i < n; ++i) {
            P[i * n + i] = cplx(0.0, 1.0) * M.diag[i] - params.tau * theta * A.diag[i];
            if (i + 1 < n) {
                P[i * n + i + 1] = cplx(0.0, 1.0) * M.off[i] - params.tau * theta * A.off[i];
                P[(i + 1) * n + i] = P[i * n + i + 1];
            }
        }
        ComplexField u = phi;
        for (int it = 0; it < 10000; ++it) {
            const ComplexField r = residual(u, phi, dW, theta, params, M, A, grid);
            const std::vector<cplx> corr = dense_solve3(P, r.values);
            for (std::size_t i = 0; i < n; ++i) u.values[i] -= 0.5 * corr[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(u.values[i] - u_newton.values[i]));
        }
        (void)report;
    }
    return worst <= 1e-10;
}

bool noise_variance_vs_fq() {
    const Grid1D grid = build_grid(-1.0, 1.0, 32);
    const NoiseModel model = make_noise_model(4, std::sqrt(2.0), CoeffRule::OneOverEll, grid);
    const double tau = 1.0 / 512.0;
    const std::size_t n_samples = 100000;
    const WienerPath path = sample_path(model, 77, tau, n_samples);
    const std::vector<double> fq = f_q(model, grid);

    std::vector<double> var(grid.n_interior(), 0.0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::vector<double> dW = expand_increment(model, path, s);
        for (std::size_t i = 0; i < var.size(); ++i) var[i] += dW[i] * dW[i];
    }
    for (std::size_t i = 0; i < var.size(); ++i) {
        var[i] /= static_cast<double>(n_samples);
        if (std::abs(var[i] - tau * fq[i]) > 0.05 * tau * fq[i]) return false;
    }
    return true;
}

bool coarsening_bit_exact() {
    const Grid1D grid = build_grid(-1.0, 1.0, 16);
    const NoiseModel model = make_noise_model(3, 1.0, CoeffRule::OneOverEll, grid);
    const WienerPath fine = sample_path(model, 99, 1.0 / 1024.0, 64);
    const WienerPath c4 = coarsen(fine, 4);
    const WienerPath c22 = coarsen(coarsen(fine, 2), 2);
    if (c4.n_steps != c22.n_steps || c4.tau != c22.tau) return false;
    return std::memcmp(c4.increments.data(), c22.increments.data(),
                       c4.increments.size() * sizeof(double)) == 0;
}

bool fem_norms_vs_integrals() {
    const Grid1D grid = build_grid(-1.0, 1.0, 512);
    const TriDiagMatrix M = assemble_mass(grid);
    const TriDiagMatrix A = assemble_stiffness(grid);
    const ComplexField u = interpolate(
        [](double x) {
            const double s = std::sin(M_PI * x);
            return cplx(s * s, 0.0);
        },
        grid);
    const double l2 = l2_norm_sq(u, M);
    const double h1 = h1_seminorm_sq(u, A);
    const double l4 = l4_norm4(u, grid);
    const double pi2 = M_PI * M_PI;
    return std::abs(l2 - 0.75) <= 5e-5 && std::abs(h1 - pi2) <= 1e-3 * pi2 &&
           std::abs(l4 - 35.0 / 64.0) <= 5e-4;
}

} // namespace

bool run_selftest(std::ostream& os) {
    Reporter rep{os};
    rep.check("philox4x32-10 known answers", philox_known_answers());
    rep.check("jacobian vs central differences (100 random 5-node instances)",
              jacobian_vs_central_differences());
    rep.check("newton vs damped fixed-point oracle (3-node instances)", newton_vs_fixed_point());
    rep.check("noise increment variance vs tau*F_Q (1e5 samples)", noise_variance_vs_fq());
    rep.check("coarsening associativity bit-exact", coarsening_bit_exact());
    rep.check("FEM norms vs closed-form integrals", fem_norms_vs_integrals());
    os << (rep.all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
    return rep.all_ok;
}

} // namespace snls
