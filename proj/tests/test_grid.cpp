#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "snls/experiment.hpp"
#include "snls/grid.hpp"
#include "snls/rng.hpp"

using namespace snls;

namespace {

ComplexField sin_sq_field(const Grid1D& grid) {
    return interpolate(
        [](double x) {
            const double s = std::sin(M_PI * x);
            return cplx(s * s, 0.0);
        },
        grid);
}

} // namespace

TEST_CASE("build_grid basics") {
    const Grid1D g = build_grid(-1.0, 1.0, 512);
    CHECK(g.h() == doctest::Approx(1.0 / 256.0).epsilon(1e-14));
    CHECK(g.n_interior() == 511);
    CHECK(g.node(0) == doctest::Approx(-1.0 + 1.0 / 256.0).epsilon(1e-14));

    const Grid1D tiny = build_grid(0.0, 1.0, 2);
    CHECK(tiny.h() == 0.5);
    CHECK(tiny.n_interior() == 1);
    CHECK(tiny.node(0) == 0.5);

    const Grid1D g4 = build_grid(0.0, 2.0, 4);
    CHECK(g4.h() == 0.5);
    REQUIRE(g4.n_interior() == 3);
    CHECK(g4.node(0) == doctest::Approx(0.5));
    CHECK(g4.node(1) == doctest::Approx(1.0));
    CHECK(g4.node(2) == doctest::Approx(1.5));
}

TEST_CASE("build_grid rejects bad domains") {
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("mass matrix entries") {
    const TriDiagMatrix m1 = assemble_mass(build_grid(0.0, 1.0, 2));
    REQUIRE(m1.diag.size() == 1);
    CHECK(m1.diag[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m1.off.empty());

    const TriDiagMatrix m3 = assemble_mass(build_grid(0.0, 1.0, 4));
    REQUIRE(m3.diag.size() == 3);
    for (double d : m3.diag) CHECK(d == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    REQUIRE(m3.off.size() == 2);
    for (double o : m3.off) CHECK(o == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
}

TEST_CASE("mass matrix row sums away from boundary equal h") {
    // Row i of M integrates the hat function at node i against 1, which is
    // exactly h for interior rows not touching the boundary.
    const Grid1D g = build_grid(0.0, 1.0, 16);
    const TriDiagMatrix m = assemble_mass(g);
    for (std::size_t i = 1; i + 1 < m.size(); ++i) {
        const double row = m.off[i - 1] + m.diag[i] + m.off[i];
        CHECK(row == doctest::Approx(g.h()).epsilon(1e-14));
    }
}

TEST_CASE("stiffness matrix entries and quadratic form") {
    const Grid1D g = build_grid(0.0, 1.0, 2);
    const TriDiagMatrix a = assemble_stiffness(g);
    REQUIRE(a.diag.size() == 1);
    CHECK(a.diag[0] == doctest::Approx(4.0));

    ComplexField peak = zero_field(g);
    peak.values[0] = 1.0;
    CHECK(h1_seminorm_sq(peak, a) == doctest::Approx(4.0));
}

TEST_CASE("stiffness form of sin(pi x) approaches pi^2/2") {
    const Grid1D g = build_grid(0.0, 1.0, 64);
    const TriDiagMatrix a = assemble_stiffness(g);
    const ComplexField u =
        interpolate([](double x) { return cplx(std::sin(M_PI * x), 0.0); }, g);
    CHECK(h1_seminorm_sq(u, a) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-3));
}

TEST_CASE("interpolate") {
    const Grid1D g = build_grid(-1.0, 1.0, 512);
    const ComplexField u = sin_sq_field(g);
    // x = 0.5 is node index (0.5 - (-1))/h - 1 = 383
    CHECK(u.values[383].real() == doctest::Approx(1.0).epsilon(1e-12));
    // x = 0 is node index 255
    CHECK(std::abs(u.values[255]) < 1e-15);

    const ComplexField z = interpolate([](double) { return cplx(0, 0); }, g);
    for (const cplx& v : z.values) CHECK(v == cplx(0, 0));

    const Grid1D tiny = build_grid(0.0, 1.0, 2);
    const ComplexField q = interpolate([](double x) { return cplx(x * (1 - x), 0.0); }, tiny);
    CHECK(q.values[0] == cplx(0.25, 0.0));

    CHECK_THROWS_AS(interpolate([](double x) { return cplx(1.0 / (x - 0.5), 0.0); }, tiny),
                    std::domain_error);
}

TEST_CASE("norms against closed-form integrals") {
    const Grid1D g = build_grid(-1.0, 1.0, 512);
    const TriDiagMatrix M = assemble_mass(g);
    const TriDiagMatrix A = assemble_stiffness(g);
    const ComplexField u = sin_sq_field(g);

    // int_{-1}^{1} sin^4(pi x) dx = 3/4
    CHECK(l2_norm_sq(u, M) == doctest::Approx(0.75).epsilon(5e-5 / 0.75));
    // int_{-1}^{1} |pi sin(2 pi x)|^2 dx = pi^2
    CHECK(h1_seminorm_sq(u, A) == doctest::Approx(M_PI * M_PI).epsilon(1e-3));
    // int_{-1}^{1} sin^8(pi x) dx = 35/64
    CHECK(l4_norm4(u, g) == doctest::Approx(35.0 / 64.0).epsilon(5e-4 / (35.0 / 64.0)));

    const ComplexField z = zero_field(g);
    CHECK(l2_norm_sq(z, M) == 0.0);
    CHECK(h1_seminorm_sq(z, A) == 0.0);
    CHECK(l4_norm4(z, g) == 0.0);
}

TEST_CASE("single-node norms") {
    const Grid1D g = build_grid(0.0, 1.0, 2);
    const TriDiagMatrix M = assemble_mass(g);
    const TriDiagMatrix A = assemble_stiffness(g);
    ComplexField u = zero_field(g);
    u.values[0] = 1.0;
    CHECK(l2_norm_sq(u, M) == doctest::Approx(1.0 / 3.0));
    CHECK(h1_seminorm_sq(u, A) == doctest::Approx(4.0));
    CHECK(l4_norm4(u, g) == doctest::Approx(0.5));
}

TEST_CASE("norm dimension mismatch throws") {
    const Grid1D g2 = build_grid(0.0, 1.0, 4);
    const Grid1D g1 = build_grid(0.0, 1.0, 2);
    const ComplexField u = zero_field(g1);
    CHECK_THROWS_AS(l2_norm_sq(u, assemble_mass(g2)), std::invalid_argument);
    CHECK_THROWS_AS(l4_norm4(u, g2), std::invalid_argument);
}

TEST_CASE("property: M and A symmetric positive on random fields") {
    const Grid1D g = build_grid(-1.0, 1.0, 32);
    const TriDiagMatrix M = assemble_mass(g);
    const TriDiagMatrix A = assemble_stiffness(g);
    for (std::uint32_t trial = 0; trial < 50; ++trial) {
        ComplexField u = zero_field(g);
        bool nonzero = false;
        for (std::size_t i = 0; i < u.size(); ++i) {
            u.values[i] = cplx(standard_normal_at(321, trial, 0, static_cast<std::uint32_t>(i)),
                               standard_normal_at(321, trial, 1, static_cast<std::uint32_t>(i)));
            nonzero = nonzero || std::abs(u.values[i]) > 0;
        }
        REQUIRE(nonzero);
        CHECK(l2_norm_sq(u, M) > 0.0);
        CHECK(h1_seminorm_sq(u, A) > 0.0);
        // symmetry: <v, S w> == conj(<w, S v>) exercised via real parts
        ComplexField v = zero_field(g);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v.values[i] = cplx(standard_normal_at(654, trial, 2, static_cast<std::uint32_t>(i)),
                               standard_normal_at(654, trial, 3, static_cast<std::uint32_t>(i)));
        }
        const cplx mv = sesquilinear(M, v, u);
        const cplx mu = sesquilinear(M, u, v);
        CHECK(std::abs(mv - std::conj(mu)) < 1e-12 * (1.0 + std::abs(mv)));
    }
}

TEST_CASE("FEM consistency rates over the h ladder") {
    // Smooth boundary-vanishing test function without special symmetry.
    auto f = [](double x) { return cplx(std::sin(M_PI * x) * std::exp(x), 0.0); };
    // Exact integrals from a symbolic oracle, frozen:
    //   int_0^1 |f|^2  = pi^2 (e^2 - 1) / (4 + 4 pi^2)
    //   int_0^1 |f'|^2 = pi^2 (e^2 - 1) / 4
    //   int_0^1 |f|^4  = 3 pi^4 (e^4 - 1) / (128 + 160 pi^2 + 32 pi^4)
    const double exact_l2 = 1.4503162641892721;
    const double exact_h1 = 15.764364048203189;
    const double exact_l4 = 3.2467044406139074;

    std::vector<double> hs, e_l2, e_h1, e_l4;
    for (int n : {16, 32, 64, 128}) {
        const Grid1D g = build_grid(0.0, 1.0, n);
        const TriDiagMatrix M = assemble_mass(g);
        const TriDiagMatrix A = assemble_stiffness(g);
        const ComplexField u = interpolate(f, g);
        hs.push_back(g.h());
        e_l2.push_back(std::abs(l2_norm_sq(u, M) - exact_l2));
        e_h1.push_back(std::abs(h1_seminorm_sq(u, A) - exact_h1));
        e_l4.push_back(std::abs(l4_norm4(u, g) - exact_l4));
    }
    const auto [slope_l2, res_l2] = estimate_order(hs, e_l2);
    const auto [slope_h1, res_h1] = estimate_order(hs, e_h1);
    CHECK(slope_l2 == doctest::Approx(2.0).epsilon(0.15));
    CHECK(slope_h1 == doctest::Approx(2.0).epsilon(0.15));
    // The quartic functional superconverges for boundary-flat integrands,
    // so only the rate >= 2 bound is asserted: err(h) <= err(h0) (h/h0)^1.7.
    for (std::size_t i = 1; i < hs.size(); ++i) {
        CHECK(e_l4[i] <= e_l4[0] * std::pow(hs[i] / hs[0], 1.7));
    }
}
