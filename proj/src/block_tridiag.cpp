#include "snls/block_tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace snls {

namespace {

inline Block2 mul(const Block2& a, const Block2& b) {
    return Block2{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
                  a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Block2 sub2(const Block2& a, const Block2& b) {
    return Block2{a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

// 2x2 inverse via Gaussian elimination with row pivoting.
inline Block2 inv2(const Block2& m) {
    double a = m[0], b = m[1], c = m[2], d = m[3];
    const bool swap = std::abs(c) > std::abs(a);
    if (swap) {
        std::swap(a, c);
        std::swap(b, d);
    }
    if (std::abs(a) < 1e-300) throw std::runtime_error("block_tridiag_solve: singular pivot block");
    const double l = c / a;
    const double s = d - l * b; // Schur complement
    if (std::abs(s) < 1e-300) throw std::runtime_error("block_tridiag_solve: singular pivot block");
    // Solve M X = P for the two columns of the (possibly row-swapped) identity.
    const double p00 = swap ? 0.0 : 1.0, p01 = swap ? 1.0 : 0.0;
    const double p10 = swap ? 1.0 : 0.0, p11 = swap ? 0.0 : 1.0;
    const double x10 = (p10 - l * p00) / s;
    const double x11 = (p11 - l * p01) / s;
    const double x00 = (p00 - b * x10) / a;
    const double x01 = (p01 - b * x11) / a;
    return Block2{x00, x01, x10, x11};
}

inline void matvec2(const Block2& m, const double* v, double* out) {
    out[0] = m[0] * v[0] + m[1] * v[1];
    out[1] = m[2] * v[0] + m[3] * v[1];
}

} // namespace

void BlockTridiagMatrix::apply(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = n_blocks();
    if (x.size() != 2 * n || out.size() != 2 * n) {
        throw std::invalid_argument("BlockTridiagMatrix::apply: dimension mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        double acc[2];
        matvec2(diag[i], &x[2 * i], acc);
        if (i > 0) {
            double t[2];
            matvec2(sub[i - 1], &x[2 * (i - 1)], t);
            acc[0] += t[0];
            acc[1] += t[1];
        }
        if (i + 1 < n) {
            double t[2];
            matvec2(sup[i], &x[2 * (i + 1)], t);
            acc[0] += t[0];
            acc[1] += t[1];
        }
        out[2 * i] = acc[0];
        out[2 * i + 1] = acc[1];
    }
}

std::vector<double> BlockTridiagMatrix::to_dense() const {
    const std::size_t n = n_blocks();
    const std::size_t dim = 2 * n;
    std::vector<double> dense(dim * dim, 0.0);
    auto put = [&](std::size_t bi, std::size_t bj, const Block2& blk) {
        dense[(2 * bi) * dim + 2 * bj] = blk[0];
        dense[(2 * bi) * dim + 2 * bj + 1] = blk[1];
        dense[(2 * bi + 1) * dim + 2 * bj] = blk[2];
        dense[(2 * bi + 1) * dim + 2 * bj + 1] = blk[3];
    };
    for (std::size_t i = 0; i < n; ++i) {
        put(i, i, diag[i]);
        if (i > 0) put(i, i - 1, sub[i - 1]);
        if (i + 1 < n) put(i, i + 1, sup[i]);
    }
    return dense;
}

void block_tridiag_solve(const BlockTridiagMatrix& A, std::span<double> rhs) {
    const std::size_t n = A.n_blocks();
    if (rhs.size() != 2 * n) {
        throw std::invalid_argument("block_tridiag_solve: rhs dimension mismatch");
    }
    if (n == 0) return;

    // Block Thomas: pivot_inv[i] = inv(D_i - L_i pivot_inv[i-1] U_{i-1}).
    std::vector<Block2> pivot_inv(n);
    std::vector<Block2> lower(n > 0 ? n - 1 : 0); // L_i * pivot_inv[i-1]
    pivot_inv[0] = inv2(A.diag[0]);
    for (std::size_t i = 1; i < n; ++i) {
        lower[i - 1] = mul(A.sub[i - 1], pivot_inv[i - 1]);
        pivot_inv[i] = inv2(sub2(A.diag[i], mul(lower[i - 1], A.sup[i - 1])));
    }
    // Forward sweep.
    for (std::size_t i = 1; i < n; ++i) {
        double t[2];
        matvec2(lower[i - 1], &rhs[2 * (i - 1)], t);
        rhs[2 * i] -= t[0];
        rhs[2 * i + 1] -= t[1];
    }
    // Back substitution.
    double x[2];
    matvec2(pivot_inv[n - 1], &rhs[2 * (n - 1)], x);
    rhs[2 * (n - 1)] = x[0];
    rhs[2 * (n - 1) + 1] = x[1];
    for (std::size_t ii = n - 1; ii-- > 0;) {
        double t[2];
        matvec2(A.sup[ii], &rhs[2 * (ii + 1)], t);
        const double y[2] = {rhs[2 * ii] - t[0], rhs[2 * ii + 1] - t[1]};
        matvec2(pivot_inv[ii], y, x);
        rhs[2 * ii] = x[0];
        rhs[2 * ii + 1] = x[1];
    }
}

} // namespace snls
