#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "snls/diagnostics.hpp"

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

TEST_CASE("mass equals the L2 form and is phase invariant") {
    const Grid1D g = build_grid(-1.0, 1.0, 512);
    const TriDiagMatrix M = assemble_mass(g);

    CHECK(mass(zero_field(g), M) == 0.0);

    const ComplexField u = sin_sq_field(g);
    const double m = mass(u, M);
    CHECK(m == doctest::Approx(0.75).epsilon(5e-5 / 0.75));

    ComplexField rotated = u;
    const cplx phase = std::polar(1.0, 0.739);
    for (cplx& v : rotated.values) v *= phase;
    CHECK(mass(rotated, M) == doctest::Approx(m).epsilon(1e-14));
}

TEST_CASE("hamiltonian against the closed-form value") {
    const Grid1D g = build_grid(-1.0, 1.0, 512);
    const TriDiagMatrix A = assemble_stiffness(g);
    const ComplexField u = sin_sq_field(g);

    CHECK(hamiltonian(zero_field(g), A, g, -1) == 0.0);

    // pi^2/2 + 35/256 for the defocusing sign
    const double expected = M_PI * M_PI / 2.0 + 35.0 / 256.0;
    CHECK(hamiltonian(u, A, g, -1) == doctest::Approx(expected).epsilon(2e-3 / expected));
    const double expected_focus = M_PI * M_PI / 2.0 - 35.0 / 256.0;
    CHECK(hamiltonian(u, A, g, 1) ==
          doctest::Approx(expected_focus).epsilon(2e-3 / expected_focus));
}

TEST_CASE("h2 proxy") {
    const Grid1D g64 = build_grid(0.0, 1.0, 64);
    const TriDiagMatrix M = assemble_mass(g64);
    const TriDiagMatrix A = assemble_stiffness(g64);

    CHECK(h2_proxy_sq(zero_field(g64), M, A, g64) == 0.0);

    // discrete Laplacian term of sin(pi x): int |pi^2 sin(pi x)|^2 = pi^4/2
    const ComplexField u =
        interpolate([](double x) { return cplx(std::sin(M_PI * x), 0.0); }, g64);
    const double lap_term = h2_proxy_sq(u, M, A, g64) - l2_norm_sq(u, M) - h1_seminorm_sq(u, A);
    CHECK(lap_term == doctest::Approx(std::pow(M_PI, 4) / 2.0).epsilon(0.01));

    // quadratic scaling
    ComplexField two_u = u;
    for (cplx& v : two_u.values) v *= 2.0;
    CHECK(h2_proxy_sq(two_u, M, A, g64) ==
          doctest::Approx(4.0 * h2_proxy_sq(u, M, A, g64)).epsilon(1e-13));
}

TEST_CASE("ensemble_reduce basics") {
    std::vector<StepDiagnostics> traj(3);
    for (std::size_t k = 0; k < 3; ++k) {
        traj[k].time = 0.5 * static_cast<double>(k);
        traj[k].mass = 1.0 + static_cast<double>(k);
        traj[k].hamiltonian = 2.0 * static_cast<double>(k);
        traj[k].h1_semi_sq = static_cast<double>(k * k);
        traj[k].newton_iters = 2;
    }

    SUBCASE("single trajectory is the identity") {
        const EnsembleStats s = ensemble_reduce({traj});
        CHECK(s.n_realizations == 1);
        CHECK(s.mean_mass[2] == 3.0);
        CHECK(s.max_mean_hamiltonian == 4.0);
        CHECK(s.mass_drift[2] == 2.0);
        CHECK(s.max_abs_mass_drift == 2.0);
        CHECK(s.h1_max_quantiles[1] == doctest::Approx(2.0)); // sqrt(4)
    }

    SUBCASE("all-zero ensemble reduces to zeros") {
        std::vector<StepDiagnostics> z(4);
        for (std::size_t k = 0; k < 4; ++k) z[k].time = static_cast<double>(k);
        const EnsembleStats s = ensemble_reduce({z, z, z});
        CHECK(s.max_mean_hamiltonian == 0.0);
        CHECK(s.max_abs_mass_drift == 0.0);
        CHECK(s.h1_max_quantiles[0] == 0.0);
        CHECK(s.h1_max_quantiles[2] == 0.0);
    }

    SUBCASE("empty ensemble throws") {
        CHECK_THROWS_AS(ensemble_reduce({}), std::invalid_argument);
    }

    SUBCASE("quantiles are sorted") {
        std::vector<std::vector<StepDiagnostics>> ens;
        for (int r = 0; r < 7; ++r) {
            std::vector<StepDiagnostics> t(2);
            t[1].h1_semi_sq = static_cast<double>((r * 3) % 7);
            ens.push_back(t);
        }
        const EnsembleStats s = ensemble_reduce(ens);
        CHECK(s.h1_max_quantiles[0] <= s.h1_max_quantiles[1]);
        CHECK(s.h1_max_quantiles[1] <= s.h1_max_quantiles[2]);
    }
}

TEST_CASE("CSV emission formats") {
    std::vector<StepDiagnostics> traj(2);
    traj[1].time = 0.25;
    traj[1].mass = 0.75;
    traj[1].newton_iters = 3;

    std::ostringstream os;
    write_trajectory_csv(traj, os);
    const std::string text = os.str();
    CHECK(text.rfind("step,time,mass,hamiltonian,h1_semi_sq,h2_proxy_sq,newton_iters\n", 0) == 0);
    CHECK(text.find("1,0.25,0.75,0,0,0,3\n") != std::string::npos);

    std::ostringstream es;
    write_ensemble_csv(ensemble_reduce({traj}), es);
    const std::string etext = es.str();
    CHECK(etext.find("# realizations=1 failures=0") != std::string::npos);
    CHECK(etext.find("# max_mean_hamiltonian=") != std::string::npos);
    CHECK(etext.find("# h1_max_quantiles=") != std::string::npos);
}
