#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qgp/errors.hpp"
#include "qgp/nls.hpp"

using namespace qgp;

namespace {
const double kPi = 3.14159265358979323846;

WaveFunction plane_wave(const GridSpec& g, double A) {
    Field f(g.size());
    for (int j = 0; j < g.M; ++j) f[static_cast<std::size_t>(j)] = A * std::polar(1.0, g.node(j));
    return WaveFunction{g, f, 0.0};
}

WaveFunction gaussian_state(const GridSpec& g, double sigma) {
    Field f = gaussian_bump(g, sigma);
    normalize_mass(f, g);
    return WaveFunction{g, f, 0.0};
}
}  // namespace

TEST_CASE("zero field stays zero") {
    GridSpec g{1, 32, 2.0 * kPi};
    WaveFunction phi{g, Field(g.size(), 0.0), 0.0};
    NlsParams p{1.0, 0.0, 0.0, 1e-3};
    CHECK(mass(phi) == 0.0);
    CHECK(energy(phi, p) == 0.0);
    for (int s = 0; s < 10; ++s) step_strang_inplace(phi, p);
    for (const auto& v : phi.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("plane wave mass and energy") {
    GridSpec g{1, 64, 2.0 * kPi};
    const double A = 1.3;
    WaveFunction phi = plane_wave(g, A);
    NlsParams p{1.0, 0.0, 0.0, 1e-3};
    CHECK(mass(phi) == doctest::Approx(2.0 * kPi * A * A).epsilon(1e-12));
    CHECK(energy(phi, p) ==
          doctest::Approx(2.0 * kPi * (A * A + std::pow(A, 6) / 3.0)).epsilon(1e-12));
}

TEST_CASE("plane wave quintic evolution matches the exact phase") {
    GridSpec g{1, 64, 2.0 * kPi};
    const double A = 0.9, b0 = 0.7, T = 0.1;
    NlsParams p{b0, 0.0, 0.0, 1e-4};
    const auto traj = evolve(plane_wave(g, A), p, T, 100);
    const double omega = 1.0 + b0 * std::pow(A, 4);
    const WaveFunction& last = traj.back();
    CHECK(last.t == doctest::Approx(T));
    double err = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const cplx expect = A * std::polar(1.0, g.node(j) - omega * T);
        err = std::max(err, std::abs(last.values[static_cast<std::size_t>(j)] - expect));
    }
    CHECK(err < 1e-8);
}

TEST_CASE("zero coupling reproduces the free flow") {
    GridSpec g{1, 32, 2.0 * kPi};
    WaveFunction phi = gaussian_state(g, 0.5);
    NlsParams p{0.0, 0.0, 0.0, 1e-3};
    const auto traj = evolve(phi, p, 0.05, 50);
    const Field direct =
        apply_multiplier(phi.values, SpectralMultiplier::free_flow(g, 0.05), g);
    double err = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
        err = std::max(err, std::abs(direct[i] - traj.back().values[i]));
    CHECK(err < 1e-11);
}

TEST_CASE("mass conserved to roundoff, energy drift is O(dt^2)") {
    GridSpec g{1, 64, 2.0 * kPi};
    WaveFunction phi = gaussian_state(g, 0.5);
    NlsParams p{1.0, 0.5, 0.0, 1e-3};
    const double m0 = mass(phi), e0 = energy(phi, p);

    auto drift = [&](double dt) {
        NlsParams q = p;
        q.dt = dt;
        const auto traj = evolve(phi, q, 0.2, static_cast<int>(std::lround(0.2 / dt)));
        CHECK(std::abs(mass(traj.back()) - m0) <= 1e-12 * m0);
        return std::abs(energy(traj.back(), q) - e0);
    };
    const double d1 = drift(1e-3), d2 = drift(5e-4);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("gauge covariance is exact") {
    GridSpec g{1, 32, 2.0 * kPi};
    WaveFunction phi = gaussian_state(g, 0.6);
    NlsParams p{1.0, 0.0, 0.3, 1e-3};
    WaveFunction rotated = phi;
    const cplx z = std::polar(1.0, 0.77);
    for (auto& v : rotated.values) v *= z;
    for (int s = 0; s < 25; ++s) {
        step_strang_inplace(phi, p);
        step_strang_inplace(rotated, p);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i)
        err = std::max(err, std::abs(rotated.values[i] - z * phi.values[i]));
    CHECK(err < 1e-13);
}

TEST_CASE("strang self-convergence is second order") {
    GridSpec g{1, 64, 2.0 * kPi};
    WaveFunction phi = gaussian_state(g, 0.5);
    const double T = 0.1;
    auto run = [&](double dt) {
        NlsParams p{1.0, 0.0, 0.0, dt};
        return evolve(phi, p, T, static_cast<int>(std::lround(T / dt))).back();
    };
    const WaveFunction a = run(1e-3), b = run(5e-4), c = run(2.5e-4);
    auto dist = [&](const WaveFunction& x, const WaveFunction& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.values.size(); ++i)
            s += std::norm(x.values[i] - y.values[i]);
        return std::sqrt(s * g.quad_weight());
    };
    const double order = std::log2(dist(a, b) / dist(b, c));
    CHECK(order > 1.9);
    CHECK(order < 2.1);
}

TEST_CASE("evolve bookkeeping and validation") {
    GridSpec g{1, 16, 2.0 * kPi};
    WaveFunction phi = gaussian_state(g, 0.5);
    NlsParams p{0.0, 0.0, 0.0, 1e-3};
    const auto traj = evolve(phi, p, 1e-3, 1);
    CHECK(traj.size() == 2);
    CHECK(traj[0].t == 0.0);
    CHECK(traj[1].t == doctest::Approx(1e-3));

    CHECK_THROWS_AS(evolve(phi, p, -1.0, 1), ValidationError);
    CHECK_THROWS_AS(evolve(phi, p, 1e-3 * 10, 3), ValidationError);  // 10 steps, every 3
    NlsParams bad = p;
    bad.dt = -1.0;
    CHECK_THROWS_AS(evolve(phi, bad, 0.1, 1), ValidationError);
    NlsParams focusing = p;
    focusing.b0 = -1.0;
    CHECK_THROWS_AS(step_strang(phi, focusing), ValidationError);
}

TEST_CASE("nonfinite input aborts with a node diagnostic") {
    GridSpec g{1, 16, 2.0 * kPi};
    WaveFunction phi = gaussian_state(g, 0.5);
    phi.values[5] = cplx(std::numeric_limits<double>::infinity(), 0.0);
    NlsParams p{1.0, 0.0, 0.0, 1e-3};
    CHECK_THROWS_AS(step_strang_inplace(phi, p), NumericalError);
}
