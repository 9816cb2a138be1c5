#include "snls/grid.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace snls {

namespace {

std::uint64_t next_grid_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

// Imaginary residue of a sesquilinear form with a real symmetric matrix must
// vanish; anything above round-off indicates an assembly error upstream.
double real_part_checked(cplx s, const char* what) {
    if (std::abs(s.imag()) > 1e-13 * std::abs(s.real()) + 1e-300) {
        throw std::logic_error(std::string(what) + ": sesquilinear form has imaginary residue " +
                               std::to_string(s.imag()));
    }
    return s.real();
}

} // namespace

Grid1D::Grid1D(double a, double b, int n_cells)
    : a_(a), b_(b), n_cells_(n_cells), id_(next_grid_id()) {
    if (!(b > a)) throw std::invalid_argument("Grid1D: requires b > a");
    if (n_cells < 2) throw std::invalid_argument("Grid1D: requires n_cells >= 2");
    h_ = (b - a) / static_cast<double>(n_cells);
    nodes_.resize(static_cast<std::size_t>(n_cells) - 1);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        nodes_[i] = a + static_cast<double>(i + 1) * h_;
    }
}

Grid1D build_grid(double a, double b, int n_cells) {
    return Grid1D(a, b, n_cells);
}

ComplexField zero_field(const Grid1D& grid) {
    ComplexField f;
    f.values.assign(grid.n_interior(), cplx(0.0, 0.0));
    f.grid_id = grid.id();
    return f;
}

ComplexField interpolate(const std::function<cplx(double)>& f, const Grid1D& grid) {
    ComplexField out = zero_field(grid);
    for (std::size_t i = 0; i < grid.n_interior(); ++i) {
        const cplx v = f(grid.node(i));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::domain_error("interpolate: non-finite value at x = " +
                                    std::to_string(grid.node(i)));
        }
        out.values[i] = v;
    }
    return out;
}

void TriDiagMatrix::apply(std::span<const cplx> in, std::span<cplx> out) const {
    const std::size_t n = diag.size();
    if (in.size() != n || out.size() != n) {
        throw std::invalid_argument("TriDiagMatrix::apply: dimension mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc = diag[i] * in[i];
        if (i > 0) acc += off[i - 1] * in[i - 1];
        if (i + 1 < n) acc += off[i] * in[i + 1];
        out[i] = acc;
    }
}

std::vector<cplx> TriDiagMatrix::apply(const std::vector<cplx>& in) const {
    std::vector<cplx> out(in.size());
    apply(std::span<const cplx>(in), std::span<cplx>(out));
    return out;
}

TriDiagMatrix assemble_mass(const Grid1D& grid) {
    const std::size_t n = grid.n_interior();
    const double h = grid.h();
    TriDiagMatrix m;
    m.diag.assign(n, 2.0 * h / 3.0);
    m.off.assign(n > 0 ? n - 1 : 0, h / 6.0);
    return m;
}

TriDiagMatrix assemble_stiffness(const Grid1D& grid) {
    const std::size_t n = grid.n_interior();
    const double h = grid.h();
    TriDiagMatrix a;
    a.diag.assign(n, 2.0 / h);
    a.off.assign(n > 0 ? n - 1 : 0, -1.0 / h);
    return a;
}

cplx sesquilinear(const TriDiagMatrix& S, const ComplexField& v, const ComplexField& w) {
    require_same_size(S.size(), v.size(), "sesquilinear");
    require_same_size(S.size(), w.size(), "sesquilinear");
    std::vector<cplx> sw = S.apply(w.values);
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < sw.size(); ++i) {
        acc += std::conj(v.values[i]) * sw[i];
    }
    return acc;
}

double l2_norm_sq(const ComplexField& u, const TriDiagMatrix& M) {
    require_same_size(M.size(), u.size(), "l2_norm_sq");
    return real_part_checked(sesquilinear(M, u, u), "l2_norm_sq");
}

double h1_seminorm_sq(const ComplexField& u, const TriDiagMatrix& A) {
    require_same_size(A.size(), u.size(), "h1_seminorm_sq");
    return real_part_checked(sesquilinear(A, u, u), "h1_seminorm_sq");
}

double l4_norm4(const ComplexField& u, const Grid1D& grid) {
    require_same_size(grid.n_interior(), u.size(), "l4_norm4");
    double acc = 0.0;
    for (const cplx& v : u.values) {
        const double m2 = std::norm(v);
        acc += m2 * m2;
    }
    return grid.h() * acc;
}

} // namespace snls
