#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qgp/errors.hpp"
#include "qgp/grid.hpp"

using namespace qgp;

namespace {
const double kPi = 3.14159265358979323846;

Field plane_wave(const GridSpec& g, int mode) {
    Field f(g.size());
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j)
            f[static_cast<std::size_t>(j)] = std::polar(1.0, mode * 2.0 * kPi / g.L * g.node(j));
    } else {
        std::size_t idx = 0;
        for (int a = 0; a < g.M; ++a)
            for (int b = 0; b < g.M; ++b)
                f[idx++] = std::polar(1.0, mode * 2.0 * kPi / g.L * g.node(a));
    }
    return f;
}
}  // namespace

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS((GridSpec{3, 8, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((GridSpec{1, 6, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((GridSpec{1, 2, 1.0}.validate()), ValidationError);
    CHECK_THROWS_AS((GridSpec{1, 8, -1.0}.validate()), ValidationError);
    GridSpec g{2, 16, 2.0 * kPi};
    g.validate();
    CHECK(g.size() == 256);
    CHECK(g.quad_weight() == doctest::Approx(std::pow(g.h(), 2)));
}

TEST_CASE("constant field: unit quadrature and DC bin") {
    GridSpec g{1, 8, 2.0 * kPi};
    Field one(g.size(), 1.0);
    CHECK(l2_norm(one, g) == doctest::Approx(std::sqrt(2.0 * kPi)));  // L^(d/2)

    const Field hat = transform_forward(one, g);
    CHECK(std::abs(hat[0]) == doctest::Approx(std::sqrt(8.0)));
    for (std::size_t i = 1; i < hat.size(); ++i) CHECK(std::abs(hat[i]) < 1e-13);
}

TEST_CASE("single mode lands in the j=1 bin") {
    GridSpec g{1, 8, 2.0 * kPi};
    const Field f = plane_wave(g, 1);
    const Field hat = transform_forward(f, g);
    for (std::size_t i = 0; i < hat.size(); ++i) {
        if (i == 1)
            CHECK(std::abs(hat[i]) > 1.0);
        else
            CHECK(std::abs(hat[i]) < 1e-12);
    }
}

TEST_CASE("roundtrip and Plancherel on random fields") {
    std::mt19937_64 rng(7);
    for (int d : {1, 2}) {
        GridSpec g{d, 16, 5.0};
        Field f = random_smooth_field(g, rng, 1.2);
        const Field back = transform_inverse(transform_forward(f, g), g);
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(f[i] - back[i]));
        CHECK(err < 1e-12);
        CHECK(std::abs(l2_norm(f, g) - l2_norm(transform_forward(f, g), g)) <=
              1e-12 * l2_norm(f, g));
    }
}

TEST_CASE("dimension mismatch rejected") {
    GridSpec g{1, 8, 1.0};
    Field wrong(4, 0.0);
    CHECK_THROWS_AS(transform_forward(wrong, g), ValidationError);
}

TEST_CASE("multiplier basics") {
    GridSpec g{1, 16, 2.0 * kPi};
    std::mt19937_64 rng(3);
    const Field f = random_smooth_field(g, rng);

    SUBCASE("sobolev(0) is the identity") {
        const Field out = apply_multiplier(f, SpectralMultiplier::sobolev(g, 0.0), g);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(out[i] - f[i]) < 1e-12);
    }
    SUBCASE("sobolev values are real and >= 1") {
        const auto m = SpectralMultiplier::sobolev(g, 0.7);
        for (const auto& v : m.values) {
            CHECK(v.imag() == 0.0);
            CHECK(v.real() >= 1.0);
        }
    }
    SUBCASE("laplacian eigenfunction") {
        const Field pw = plane_wave(g, 3);  // k = 3 on L = 2 pi
        const Field out = apply_multiplier(pw, SpectralMultiplier::laplacian(g), g);
        for (std::size_t i = 0; i < pw.size(); ++i)
            CHECK(std::abs(out[i] - (-9.0) * pw[i]) < 1e-10);
        CHECK(std::abs(SpectralMultiplier::laplacian(g).values[0]) == 0.0);
    }
    SUBCASE("sobolev(1) on e^{ix} scales by sqrt(2)") {
        const Field pw = plane_wave(g, 1);
        const Field out = apply_multiplier(pw, SpectralMultiplier::sobolev(g, 1.0), g);
        for (std::size_t i = 0; i < pw.size(); ++i)
            CHECK(std::abs(out[i] - std::sqrt(2.0) * pw[i]) < 1e-12);
    }
}

TEST_CASE("sobolev norm values and monotonicity") {
    GridSpec g{1, 16, 2.0 * kPi};
    Field one(g.size(), 1.0);
    for (double a : {0.0, 0.5, 1.0, 2.0})
        CHECK(sobolev_norm(one, a, g) == doctest::Approx(std::sqrt(2.0 * kPi)));

    const Field pw = plane_wave(g, 1);
    CHECK(sobolev_norm(pw, 1.0, g) ==
          doctest::Approx(std::sqrt(2.0) * std::sqrt(2.0 * kPi)).epsilon(1e-12));

    std::mt19937_64 rng(11);
    const Field f = random_smooth_field(g, rng, 1.0);
    CHECK(sobolev_norm(f, 0.0, g) == doctest::Approx(l2_norm(f, g)));
    double prev = 0.0;
    for (double a : {0.0, 0.3, 0.6, 1.0, 1.5}) {
        const double cur = sobolev_norm(f, a, g);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
}

TEST_CASE("multiplier composition: sobolev adds, free flow is a group") {
    GridSpec g{1, 32, 4.0};
    std::mt19937_64 rng(5);
    const Field f = random_smooth_field(g, rng, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.5);
    for (int trial = 0; trial < 8; ++trial) {
        const double a = uni(rng), b = uni(rng);
        const Field ab = apply_multiplier(apply_multiplier(f, SpectralMultiplier::sobolev(g, a), g),
                                          SpectralMultiplier::sobolev(g, b), g);
        const Field sum = apply_multiplier(f, SpectralMultiplier::sobolev(g, a + b), g);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(ab[i] - sum[i]) < 1e-11);
    }
    for (int trial = 0; trial < 8; ++trial) {
        const double t1 = uni(rng) - 0.75, t2 = uni(rng) - 0.75;
        const Field two = apply_multiplier(
            apply_multiplier(f, SpectralMultiplier::free_flow(g, t1), g),
            SpectralMultiplier::free_flow(g, t2), g);
        const Field one = apply_multiplier(f, SpectralMultiplier::free_flow(g, t1 + t2), g);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(two[i] - one[i]) < 1e-12);
        CHECK(std::abs(l2_norm(two, g) - l2_norm(f, g)) < 1e-12);
    }
    const Field id = apply_multiplier(f, SpectralMultiplier::free_flow(g, 0.0), g);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(id[i] - f[i]) < 1e-13);
}
