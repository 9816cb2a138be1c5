#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace snls {

/// 2x2 real block, row-major.
using Block2 = std::array<double, 4>;

/// Real block-tridiagonal matrix with 2x2 blocks; represents the 2N x 2N
/// real form of a complex tridiagonal-plus-diagonal operator under the
/// interleaved layout (Re u_0, Im u_0, Re u_1, ...).
struct BlockTridiagMatrix {
    std::vector<Block2> sub;  // size n-1
    std::vector<Block2> diag; // size n
    std::vector<Block2> sup;  // size n-1

    std::size_t n_blocks() const { return diag.size(); }

    void resize(std::size_t n) {
        diag.assign(n, Block2{});
        sub.assign(n > 0 ? n - 1 : 0, Block2{});
        sup.assign(n > 0 ? n - 1 : 0, Block2{});
    }

    /// out = this * x, with x and out of length 2*n_blocks.
    void apply(std::span<const double> x, std::span<double> out) const;

    /// Dense 2n x 2n copy (row-major); test and debugging aid.
    std::vector<double> to_dense() const;
};

/// Solves A x = rhs in place by block Thomas elimination; each 2x2 pivot is
/// solved with partial pivoting inside the block. Throws std::runtime_error
/// on a (numerically) singular pivot.
void block_tridiag_solve(const BlockTridiagMatrix& A, std::span<double> rhs);

} // namespace snls
