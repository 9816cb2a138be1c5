#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace snls {

using cplx = std::complex<double>;

/// Uniform 1D mesh on (a, b) with homogeneous Dirichlet boundary.
/// Only the n_cells-1 interior nodes carry unknowns; the endpoints are
/// implied zero and never stored.
class Grid1D {
public:
    Grid1D(double a, double b, int n_cells);

    double a() const { return a_; }
    double b() const { return b_; }
    int n_cells() const { return n_cells_; }
    double h() const { return h_; }
    std::size_t n_interior() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    std::span<const double> interior_nodes() const { return nodes_; }

    /// Unique identity, used to catch fields applied to the wrong mesh.
    std::uint64_t id() const { return id_; }

private:
    double a_;
    double b_;
    int n_cells_;
    double h_;
    std::vector<double> nodes_;
    std::uint64_t id_;
};

/// Factory matching the library-wide convention of free-function ops.
/// Throws std::invalid_argument for b <= a or n_cells < 2.
Grid1D build_grid(double a, double b, int n_cells);

/// Complex nodal amplitudes on the interior nodes of one grid.
struct ComplexField {
    std::vector<cplx> values;
    std::uint64_t grid_id = 0;

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }
};

ComplexField zero_field(const Grid1D& grid);

/// Nodal interpolation: values[i] = f(x_i). The caller is responsible for
/// supplying f with f(a) = f(b) = 0; the boundary values are not stored.
/// Throws std::domain_error if any f(x_i) is non-finite.
ComplexField interpolate(const std::function<cplx(double)>& f, const Grid1D& grid);

/// Symmetric tridiagonal matrix; single off-diagonal stored.
struct TriDiagMatrix {
    std::vector<double> diag;
    std::vector<double> off; // off.size() == diag.size() - 1 (or 0 for 1x1)

    std::size_t size() const { return diag.size(); }

    /// out = this * in (complex vector, real matrix)
    void apply(std::span<const cplx> in, std::span<cplx> out) const;
    std::vector<cplx> apply(const std::vector<cplx>& in) const;
};

/// Consistent P1 mass matrix on interior nodes: diag 2h/3, off h/6.
TriDiagMatrix assemble_mass(const Grid1D& grid);

/// P1 stiffness matrix on interior nodes: diag 2/h, off -1/h.
TriDiagMatrix assemble_stiffness(const Grid1D& grid);

/// Sesquilinear pairing sum_ij conj(v_i) S_ij w_j for a real symmetric S.
cplx sesquilinear(const TriDiagMatrix& S, const ComplexField& v, const ComplexField& w);

/// ||u||^2 in the discrete L2 inner product induced by the mass matrix.
/// Asserts the imaginary residue of the sesquilinear form is below 1e-13
/// relative before discarding it.
double l2_norm_sq(const ComplexField& u, const TriDiagMatrix& M);

/// |u|^2_{H1} seminorm via the stiffness form, same residue assertion.
double h1_seminorm_sq(const ComplexField& u, const TriDiagMatrix& A);

/// Nodal (trapezoidal) quadrature of |u|^4: h * sum_i |u_i|^4.
double l4_norm4(const ComplexField& u, const Grid1D& grid);

} // namespace snls
