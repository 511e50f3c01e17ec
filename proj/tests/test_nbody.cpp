#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "qgp/errors.hpp"
#include "qgp/harness.hpp"
#include "qgp/nbody.hpp"
#include "qgp/nls.hpp"

using namespace qgp;

namespace {
const double kPi = 3.14159265358979323846;
constexpr std::uint64_t kCap = 1ull << 30;

Field normalized_bump(const GridSpec& g, double sigma) {
    Field f = gaussian_bump(g, sigma);
    normalize_mass(f, g);
    return f;
}
}  // namespace

TEST_CASE("potential spec validation and shape") {
    PotentialSpec v;
    v.beta = 0.2;  // 1/(4(d+1)) = 0.125 in d=1
    CHECK_THROWS_AS(v.validate(1), ValidationError);
    v.beta = 0.1;
    v.validate(1);
    CHECK_THROWS_AS((PotentialSpec{PotentialSpec::Family::Gaussian, -1.0, 0.4, 0.1, 3}.validate(1)),
                    ValidationError);

    // V symmetric and nonnegative on sampled pairs
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int s = 0; s < 200; ++s) {
        double u[1] = {uni(rng)}, w[1] = {uni(rng)};
        const double a = v.eval_base(u, w, 1);
        const double b = v.eval_base(w, u, 1);
        CHECK(a >= 0.0);
        CHECK(a == b);
        // full triple symmetry of the builtin family: center change
        double mu[1] = {-u[0]}, mw[1] = {w[0] - u[0]};
        CHECK(v.eval_base(mu, mw, 1) == doctest::Approx(a).epsilon(1e-14));
    }
}

TEST_CASE("potential field construction") {
    GridSpec g{1, 8, 2.0 * kPi};

    SUBCASE("fewer than three particles gives the zero field") {
        PotentialSpec v;
        v.N = 2;
        const auto W = build_potential_field(v, g, 2, kCap);
        for (double w : W) CHECK(w == 0.0);
    }
    SUBCASE("constant V at N=3") {
        PotentialSpec v;
        v.family = PotentialSpec::Family::Constant;
        v.amplitude = 0.7;
        v.beta = 0.1;
        v.N = 3;
        const auto W = build_potential_field(v, g, 3, kCap);
        const double expect = 0.7 * std::pow(3.0, 2.0 * 0.1) / 9.0;
        for (double w : W) CHECK(w == doctest::Approx(expect).epsilon(1e-14));
    }
    SUBCASE("slot swap leaves the field bit-identical") {
        PotentialSpec v;
        v.N = 4;
        const auto W = build_potential_field(v, g, 4, kCap);
        const std::size_t S = g.size();
        for (std::size_t a = 0; a < S; ++a)
            for (std::size_t b = 0; b < S; ++b)
                for (std::size_t c = 0; c < S; ++c)
                    for (std::size_t d = 0; d < S; ++d) {
                        const std::size_t i = ((a * S + b) * S + c) * S + d;
                        const std::size_t swapped = ((b * S + a) * S + c) * S + d;
                        CHECK(W[i] == W[swapped]);
                    }
    }
    SUBCASE("memory cap produces a resource error with a byte report") {
        PotentialSpec v;
        v.N = 3;
        try {
            build_potential_field(v, g, 3, 1024);
            FAIL("expected ResourceError");
        } catch (const ResourceError& e) {
            CHECK(e.required_bytes() > 1024);
        }
    }
    SUBCASE("decay check") {
        PotentialSpec v;
        v.width = 0.45;
        CHECK(v.decays_within_box(g));
        v.width = 3.0;
        CHECK(!v.decays_within_box(g));
    }
}

TEST_CASE("free product evolution stays an exact product") {
    GridSpec g{1, 8, 2.0 * kPi};
    const int N = 3;
    const Field phi0 = normalized_bump(g, 0.5);
    NBodyState st = make_product_state(g, N, phi0);
    const std::vector<double> W(st.values.size(), 0.0);
    const double dt = 1e-3;
    NBodyEvolver ev(g, N, W, dt);
    for (int s = 0; s < 40; ++s) ev.step(st);

    const Field phit = apply_multiplier(phi0, SpectralMultiplier::free_flow(g, 0.04), g);
    const NBodyState ref = make_product_state(g, N, phit);
    double err = 0.0;
    for (std::size_t i = 0; i < st.values.size(); ++i)
        err = std::max(err, std::abs(st.values[i] - ref.values[i]));
    CHECK(err < 1e-11);
}

TEST_CASE("N=1 reduces to the single-particle flow and norm is preserved") {
    GridSpec g{1, 16, 2.0 * kPi};
    const Field phi0 = normalized_bump(g, 0.5);
    NBodyState st = make_product_state(g, 1, phi0);
    const std::vector<double> W(g.size(), 0.0);
    NBodyEvolver ev(g, 1, W, 1e-3);
    for (int s = 0; s < 100; ++s) ev.step(st);
    const Field direct = apply_multiplier(phi0, SpectralMultiplier::free_flow(g, 0.1), g);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(st.values[i] - direct[i]) < 1e-11);

    double nrm2 = 0.0;
    for (const auto& v : st.values) nrm2 += std::norm(v);
    CHECK(std::abs(std::sqrt(nrm2 * g.quad_weight()) - 1.0) < 1e-11);
}

TEST_CASE("interacting evolution preserves norm and symmetry") {
    GridSpec g{1, 8, 2.0 * kPi};
    const int N = 3;
    PotentialSpec v;
    v.N = N;
    v.amplitude = 2.5;
    const auto W = build_potential_field(v, g, N, kCap);
    NBodyState st = make_product_state(g, N, normalized_bump(g, 0.5));
    NBodyEvolver ev(g, N, W, 1e-3);
    const double e0 = energy_per_particle(st, W);
    for (int s = 0; s < 100; ++s) ev.step(st);
    double nrm2 = 0.0;
    for (const auto& val : st.values) nrm2 += std::norm(val);
    CHECK(std::abs(std::sqrt(nrm2 * std::pow(g.quad_weight(), N)) - 1.0) < 1e-11);
    CHECK(symmetry_defect(st) < 1e-10);
    CHECK(std::abs(energy_per_particle(st, W) - e0) < 1e-4);
}

TEST_CASE("marginals of product states factorize") {
    GridSpec g{1, 8, 2.0 * kPi};
    const Field phi = normalized_bump(g, 0.6);
    const NBodyState st = make_product_state(g, 3, phi);
    for (int k : {1, 2}) {
        const MarginalDensity gam = marginal(st, k, kCap);
        const MarginalDensity ref = factorized_marginal(phi, g, k);
        CHECK(trace_distance(gam, ref) < 1e-12);
        CHECK(gam.trace() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("k = N gives the rank-one projector onto Psi") {
    GridSpec g{1, 8, 2.0 * kPi};
    const NBodyState st = make_product_state(g, 2, normalized_bump(g, 0.5));
    const MarginalDensity gam = marginal(st, 2, kCap);
    // gamma^2 = gamma for a rank-1 unit-trace projector (operator product
    // carries the quadrature weight).
    const Eigen::MatrixXcd sq = gam.mat * gam.mat * std::pow(g.quad_weight(), 2);
    CHECK((sq - gam.mat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("symmetrized two-mode marginal against an index-loop partial trace") {
    GridSpec g{1, 8, 2.0 * kPi};
    Field phi = normalized_bump(g, 0.5);
    std::mt19937_64 rng(5);
    Field psi = random_smooth_field(g, rng);

    const std::size_t S = g.size();
    std::vector<cplx> tensor(S * S);
    for (std::size_t a = 0; a < S; ++a)
        for (std::size_t b = 0; b < S; ++b)
            tensor[a * S + b] = phi[a] * psi[b] + psi[a] * phi[b];
    NBodyState st{g, 2, tensor, 0.0};
    double nrm2 = 0.0;
    for (const auto& v : st.values) nrm2 += std::norm(v);
    const double scale = 1.0 / std::sqrt(nrm2 * std::pow(g.quad_weight(), 2));
    for (auto& v : st.values) v *= scale;

    const MarginalDensity gam = marginal(st, 1, kCap);
    CHECK(gam.trace() == doctest::Approx(1.0).epsilon(1e-10));

    // independent double-loop partial trace
    Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(S),
                                                     static_cast<Eigen::Index>(S));
    for (std::size_t x = 0; x < S; ++x)
        for (std::size_t y = 0; y < S; ++y) {
            cplx s = 0.0;
            for (std::size_t r = 0; r < S; ++r)
                s += st.values[x * S + r] * std::conj(st.values[y * S + r]);
            direct(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
                s * g.quad_weight();
        }
    CHECK((gam.mat - direct).cwiseAbs().maxCoeff() < 1e-12);

    // positivity of eigenvalues
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gam.mat);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("marginal consistency: tracing out the last slot") {
    GridSpec g{1, 8, 2.0 * kPi};
    PotentialSpec v;
    v.N = 3;
    v.amplitude = 2.0;
    const auto W = build_potential_field(v, g, 3, kCap);
    NBodyState st = make_product_state(g, 3, normalized_bump(g, 0.5));
    NBodyEvolver ev(g, 3, W, 1e-3);
    for (int s = 0; s < 50; ++s) ev.step(st);
    const MarginalDensity g2 = marginal(st, 2, kCap);
    const MarginalDensity g1 = marginal(st, 1, kCap);
    CHECK(trace_distance(partial_trace_last(g2), g1) < 1e-10);
}

TEST_CASE("trace distance") {
    GridSpec g{1, 8, 2.0 * kPi};
    const Field phi = normalized_bump(g, 0.5);
    const MarginalDensity a = factorized_marginal(phi, g, 1);
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));

    // orthogonal rank-1 projectors are at distance 2
    Field e0(g.size(), 0.0), e1(g.size(), 0.0);
    e0[0] = 1.0;
    e1[1] = 1.0;
    normalize_mass(e0, g);
    normalize_mass(e1, g);
    CHECK(trace_distance(factorized_marginal(e0, g, 1), factorized_marginal(e1, g, 1)) ==
          doctest::Approx(2.0).epsilon(1e-10));

    // random Hermitian pair against a singular-value oracle
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_density = [&](int n) {
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = cplx(gauss(rng), gauss(rng));
        Eigen::MatrixXcd H = A * A.adjoint();
        H /= H.trace().real();
        return H;
    };
    GridSpec g4{1, 4, 2.0 * kPi};
    MarginalDensity x{1, g4, random_density(4) / g4.quad_weight()};
    MarginalDensity y{1, g4, random_density(4) / g4.quad_weight()};
    const Eigen::MatrixXcd diff = (x.mat - y.mat) * g4.quad_weight();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
    CHECK(std::abs(trace_distance(x, y) - svd.singularValues().sum()) < 1e-10);
}

TEST_CASE("energy per particle") {
    GridSpec g{1, 16, 2.0 * kPi};
    SUBCASE("plane-wave product with V = 0 has unit kinetic energy per particle") {
        Field pw(g.size());
        for (int j = 0; j < g.M; ++j)
            pw[static_cast<std::size_t>(j)] = std::polar(1.0, g.node(j));
        const NBodyState st = make_product_state(g, 3, pw);
        const std::vector<double> W(st.values.size(), 0.0);
        CHECK(energy_per_particle(st, W) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("constant state has zero energy; V >= 0 adds a nonnegative amount") {
        Field one(g.size(), 1.0);
        const NBodyState st = make_product_state(g, 3, one);
        const std::vector<double> W0(st.values.size(), 0.0);
        CHECK(std::abs(energy_per_particle(st, W0)) < 1e-12);
        PotentialSpec v;
        v.N = 3;
        const auto W = build_potential_field(v, g, 3, kCap);
        CHECK(energy_per_particle(st, W) >= 0.0);
    }
}

TEST_CASE("energy trace diagnostic on plane-wave and product data") {
    GridSpec g{1, 8, 2.0 * kPi};
    Field pw(g.size());
    for (int j = 0; j < g.M; ++j) pw[static_cast<std::size_t>(j)] = std::polar(1.0, g.node(j));
    normalize_mass(pw, g);
    const MarginalDensity m1 = factorized_marginal(pw, g, 1);
    CHECK(energy_trace_diag(m1) == doctest::Approx(2.0).epsilon(1e-10));  // 1 + |k|^2 at k=1
    const MarginalDensity m2 = factorized_marginal(pw, g, 2);
    CHECK(energy_trace_diag(m2) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("convergence experiment: free control collapses to the reference") {
    ExperimentConfig cfg;
    cfg.experiment = "nbody-converge";
    cfg.d = 1;
    cfg.M = 8;
    cfg.L = 2.0 * kPi;
    cfg.v_family = "zero";
    cfg.T = 0.05;
    cfg.dt = 1e-3;
    cfg.N_list = {2, 3};
    cfg.validate();
    const ConvergenceResult res = convergence_experiment(cfg);
    REQUIRE(res.rows.size() == 2);
    for (const auto& r : res.rows) CHECK(r.trace_distance < 1e-8);
    CHECK(res.b0 == 0.0);
}

TEST_CASE("convergence experiment: wrong-coupling reference departs") {
    ExperimentConfig cfg;
    cfg.experiment = "nbody-converge";
    cfg.d = 1;
    cfg.M = 8;
    cfg.L = 2.0 * kPi;
    cfg.v_family = "gaussian";
    cfg.v_amplitude = 2.5;
    cfg.v_width = 0.45;
    cfg.beta = 0.1;
    cfg.T = 0.05;
    cfg.dt = 1e-3;
    cfg.N_list = {3};
    cfg.b0_override = 0.0;  // reference deliberately ignores the interaction
    cfg.validate();
    const ConvergenceResult res = convergence_experiment(cfg);
    CHECK(res.rows[0].trace_distance > 1e-4);
}

TEST_CASE("d=2 evolution at small size") {
    GridSpec g{2, 4, 2.0 * kPi};
    PotentialSpec v;
    v.N = 3;
    v.beta = 0.08;  // 1/(4(d+1)) = 1/12 in d=2
    v.width = 0.45;
    v.validate(2);
    const auto W = build_potential_field(v, g, 3, kCap);
    NBodyState st = make_product_state(g, 3, normalized_bump(g, 0.6));
    NBodyEvolver ev(g, 3, W, 1e-3);
    for (int s = 0; s < 20; ++s) ev.step(st);
    CHECK(symmetry_defect(st) < 1e-10);
    const MarginalDensity gam = marginal(st, 1, kCap);
    CHECK(gam.trace() == doctest::Approx(1.0).epsilon(1e-9));
}
