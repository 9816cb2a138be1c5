#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "snls/noise.hpp"
#include "snls/rng.hpp"

using namespace snls;

TEST_CASE("philox known-answer vectors") {
    using philox::block;
    const philox::Counter z = block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(z == philox::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const philox::Counter f = block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
    CHECK(f == philox::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const philox::Counter pi = block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
    CHECK(pi == philox::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("noise model construction") {
    const Grid1D grid = build_grid(-1.0, 1.0, 512);

    const NoiseModel empty = make_noise_model(0, 1.0, CoeffRule::OneOverEll, grid);
    CHECK(empty.n_modes() == 0);

    const NoiseModel one = make_noise_model(1, 1.0, CoeffRule::OneOverEll, grid);
    // node at x = -0.5 has index 127; |sin(pi/2)| = 1
    CHECK(std::abs(one.mode_value(0, 127)) == doctest::Approx(1.0).epsilon(1e-12));

    const NoiseModel eight = make_noise_model(8, std::sqrt(2.0), CoeffRule::OneOverEll, grid);
    REQUIRE(eight.coeffs().size() == 8);
    for (int l = 0; l < 8; ++l) {
        CHECK(eight.coeffs()[static_cast<std::size_t>(l)] == doctest::Approx(1.0 / (l + 1)));
    }
    // every mode respects the Dirichlet boundary
    for (int l = 0; l < 8; ++l) {
        const double end_a = std::sin(0.0);
        const double end_b = std::sin((l + 1) * M_PI * 2.0);
        CHECK(std::abs(end_a) < 1e-12);
        CHECK(std::abs(end_b) < 1e-9);
    }

    CHECK_THROWS_AS(make_noise_model(2, 1.0, CoeffRule::Custom, grid, {1.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_noise_model(2, 1.0, CoeffRule::Custom, grid, {1.0}),
                    std::invalid_argument);
}

TEST_CASE("sample_path determinism and L=0") {
    const Grid1D grid = build_grid(-1.0, 1.0, 16);
    const NoiseModel m0 = make_noise_model(0, 1.0, CoeffRule::OneOverEll, grid);
    const WienerPath p0 = sample_path(m0, 5, 0.125, 4);
    CHECK(p0.n_modes == 0);
    CHECK(p0.increments.empty());
    const std::vector<double> z = expand_increment(m0, p0, 2);
    for (double v : z) CHECK(v == 0.0);

    const NoiseModel m3 = make_noise_model(3, 2.0, CoeffRule::OneOverEll, grid);
    const WienerPath a = sample_path(m3, 123, 0.01, 64);
    const WienerPath b = sample_path(m3, 123, 0.01, 64);
    CHECK(std::memcmp(a.increments.data(), b.increments.data(),
                      a.increments.size() * sizeof(double)) == 0);
    const WienerPath c = sample_path(m3, 124, 0.01, 64);
    CHECK(std::memcmp(a.increments.data(), c.increments.data(),
                      a.increments.size() * sizeof(double)) != 0);
}

TEST_CASE("increment moments over 1e5 samples") {
    const Grid1D grid = build_grid(-1.0, 1.0, 8);
    const NoiseModel m = make_noise_model(2, 1.0, CoeffRule::OneOverEll, grid);
    const double tau = 1.0 / 256.0;
    const std::size_t n = 100000;
    const WienerPath p = sample_path(m, 31, tau, n);

    for (std::size_t l = 0; l < 2; ++l) {
        double mean = 0.0;
        for (std::size_t s = 0; s < n; ++s) mean += p.increment(s, l);
        mean /= static_cast<double>(n);
        CHECK(std::abs(mean) <= 4.0 * std::sqrt(tau / static_cast<double>(n)));

        double var = 0.0, m4 = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double d = p.increment(s, l) - mean;
            var += d * d;
            m4 += d * d * d * d;
        }
        var /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        CHECK(var == doctest::Approx(tau).epsilon(0.05));
        const double kurt = m4 / (var * var);
        CHECK(kurt > 2.9);
        CHECK(kurt < 3.1);
    }
}

TEST_CASE("expand_increment linearity and bounds") {
    const Grid1D grid = build_grid(-1.0, 1.0, 16);
    const NoiseModel m = make_noise_model(1, 1.0, CoeffRule::OneOverEll, grid);
    WienerPath unit;
    unit.tau = 1.0;
    unit.n_steps = 1;
    unit.n_modes = 1;
    unit.increments = {1.0};
    const std::vector<double> field = expand_increment(m, unit, 0);
    for (std::size_t i = 0; i < field.size(); ++i) {
        CHECK(field[i] == doctest::Approx(m.mode_value(0, i)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(expand_increment(m, unit, 1), std::out_of_range);
}

TEST_CASE("f_q matches empirical increment variance") {
    const Grid1D grid = build_grid(-1.0, 1.0, 16);

    const NoiseModel m0 = make_noise_model(0, 1.0, CoeffRule::OneOverEll, grid);
    for (double v : f_q(m0, grid)) CHECK(v == 0.0);

    const NoiseModel m1 = make_noise_model(1, 1.0, CoeffRule::OneOverEll, grid);
    // x = -0.5 is node index 3; sin^2(pi/2) = 1
    CHECK(f_q(m1, grid)[3] == doctest::Approx(1.0).epsilon(1e-12));

    const NoiseModel m = make_noise_model(4, std::sqrt(2.0), CoeffRule::OneOverEll, grid);
    const double tau = 1.0 / 128.0;
    const std::size_t n = 100000;
    const WienerPath p = sample_path(m, 77, tau, n);
    const std::vector<double> fq = f_q(m, grid);
    std::vector<double> var(grid.n_interior(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const std::vector<double> dW = expand_increment(m, p, s);
        for (std::size_t i = 0; i < var.size(); ++i) var[i] += dW[i] * dW[i];
    }
    for (std::size_t i = 0; i < var.size(); ++i) {
        var[i] /= static_cast<double>(n);
        CHECK(std::abs(var[i] - tau * fq[i]) <= 0.05 * tau * fq[i] + 1e-30);
    }
}

TEST_CASE("coarsen definition and edge cases") {
    WienerPath p;
    p.tau = 0.25;
    p.n_steps = 4;
    p.n_modes = 1;
    p.increments = {1.0, 2.0, 3.0, 4.0};
    const WienerPath c = coarsen(p, 2);
    CHECK(c.tau == 0.5);
    REQUIRE(c.n_steps == 2);
    CHECK(c.increments[0] == 3.0);
    CHECK(c.increments[1] == 7.0);

    const WienerPath ident = coarsen(p, 1);
    CHECK(ident.increments == p.increments);

    CHECK_THROWS_AS(coarsen(p, 3), std::invalid_argument);
}

TEST_CASE("coarsening composes bit-exactly and expansion is linear") {
    const Grid1D grid = build_grid(-1.0, 1.0, 32);
    const NoiseModel m = make_noise_model(5, 1.3, CoeffRule::OneOverEll, grid);
    const WienerPath fine = sample_path(m, 2024, 1.0 / 4096.0, 256);

    const WienerPath c4 = coarsen(fine, 4);
    const WienerPath c22 = coarsen(coarsen(fine, 2), 2);
    REQUIRE(c4.increments.size() == c22.increments.size());
    CHECK(std::memcmp(c4.increments.data(), c22.increments.data(),
                      c4.increments.size() * sizeof(double)) == 0);

    const WienerPath c8 = coarsen(fine, 8);
    const WienerPath c242 = coarsen(coarsen(c4, 2), 1);
    CHECK(std::memcmp(c8.increments.data(), coarsen(c22, 2).increments.data(),
                      c8.increments.size() * sizeof(double)) == 0);
    (void)c242;

    // expand(coarse step) == sum of expands of the fine steps, ~1e-15
    const std::size_t k = 4;
    for (std::size_t n : {std::size_t{0}, std::size_t{17}, std::size_t{63}}) {
        const std::vector<double> coarse_field = expand_increment(m, c4, n);
        std::vector<double> acc(grid.n_interior(), 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const std::vector<double> f = expand_increment(m, fine, n * k + j);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f[i];
        }
        for (std::size_t i = 0; i < acc.size(); ++i) {
            CHECK(std::abs(acc[i] - coarse_field[i]) <= 1e-15);
        }
    }
}

TEST_CASE("path dump/load round trip is bit exact") {
    const Grid1D grid = build_grid(-1.0, 1.0, 8);
    const NoiseModel m = make_noise_model(3, 0.7, CoeffRule::OneOverEll, grid);
    const WienerPath p = sample_path(m, 11, 1.0 / 64.0, 10);
    std::stringstream ss;
    dump_path(p, ss);
    const WienerPath q = load_path(ss);
    CHECK(q.tau == p.tau);
    CHECK(q.n_steps == p.n_steps);
    CHECK(q.n_modes == p.n_modes);
    REQUIRE(q.increments.size() == p.increments.size());
    CHECK(std::memcmp(q.increments.data(), p.increments.data(),
                      p.increments.size() * sizeof(double)) == 0);
}
