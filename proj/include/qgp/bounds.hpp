#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qgp/grid.hpp"
#include "qgp/kernels.hpp"

namespace qgp {

struct BoundReport {
    std::string name;
    std::map<std::string, double> params;
    double observed_sup = 0.0;
    int sample_size = 0;
    std::string verdict;  // "bounded" or "unbounded-trend"
    double refinement_delta = 0.0;  // relative change under doubling
    std::vector<std::pair<double, double>> curve;  // (parameter, value) samples
};

// int_{R^d} dy / (<P-y>^(2-2a) <y>^2). Finite for d=1, a <= 1 and d=2, a < 1;
// throws NumericalError for the divergent d=2, a = 1 combination. P is the
// magnitude of the shift (the integral is radial in P). Numerical part over a
// large ball plus a closed-form asymptotic tail; the reported remainder is the
// error of that tail estimate.
struct CrucialintValue {
    double value = 0.0;
    double tail = 0.0;            // analytic tail added to the numeric part
    double tail_remainder = 0.0;  // estimated error of the tail term
};
CrucialintValue crucialint(double alpha, int d, double P);

// Truncated version (ball of radius R, no tail), used to exhibit divergence.
double crucialint_truncated(double alpha, int d, double P, double R);

// Ratio sup over a log-spaced P grid up to 1e3 with grid-doubling
// stabilization; divergent combinations report an unbounded trend over a
// radius ladder instead.
BoundReport crucialint_report(double alpha, int d);

// C_alpha = sup_P int dy dz / (<P-y-z>^(2-2a) <y>^2 <z>^2), evaluated as a
// nested application of crucialint. error_bar is the change under quadrature
// refinement.
struct CAlphaValue {
    double value = 0.0;
    double error_bar = 0.0;
};
CAlphaValue c_alpha(double alpha, int d);
BoundReport c_alpha_report(double alpha, int d);

// |<psi1, V psi2>| / (||V||_p ||psi1||_2 ||<grad><grad> psi2||_2) for
// two-particle fields on grid^2 (2d axes of M points).
double sobolev_trilinear_ratio(const std::vector<cplx>& V, const std::vector<cplx>& psi1,
                               const std::vector<cplx>& psi2, double p, const GridSpec& g);
BoundReport sobolev_trilinear_report(const GridSpec& g, double p, int samples,
                                     std::uint64_t seed);

// kernel_norm(contract(gamma, j), alpha) / kernel_norm(gamma, alpha).
double highreg_ratio(const SeparableKernel& gamma, int j, double alpha);
// Random-kernel sampling; `decay` controls factor roughness (smaller = rougher).
BoundReport highreg_report(const GridSpec& g, int order, int rank, double alpha, int samples,
                           double decay, std::uint64_t seed);

// Positive order-(k+2) kernels: lhs norms of B and B+ against the
// (1-Lap)...(1-Lap) trace of gamma.
struct KmBoundValue {
    double lhs_b = 0.0;
    double lhs_bplus = 0.0;
    double rhs_trace = 0.0;
};
KmBoundValue km_bound_check(const SeparableKernel& gamma, int j, double alpha);
BoundReport km_bound_report(const GridSpec& g, int order, int rank, double alpha, int samples,
                            std::uint64_t seed);

// Mollifier comparison of Lemma-A.1 type for k=1: gamma is a positive order-3
// kernel, J a one-particle Fourier multiplier (empty = identity). The
// mollifier acts spectrally with symbol exp(-a^2 |k|^2 / 2) (Gaussian profile,
// unit integral); a <= 0 selects the exact grid delta (control run).
struct PoincareValue {
    double lhs = 0.0;
    double bound_factor = 0.0;  // a^kappa * weighted trace term
    double ratio = 0.0;
};
PoincareValue poincare_check(double a, double kappa, const SeparableKernel& gamma,
                             const std::vector<cplx>& J_multiplier);
BoundReport poincare_report(const GridSpec& g, double kappa, const std::vector<double>& a_list,
                            double factor_decay, int rank, std::uint64_t seed);

// ||grad V_N||_{L^2p(R^2d)} for the product Gaussian V against the exact
// scaling exponent 2 beta (d + 1/2 - d/(2p)).
struct ScalingCheck {
    double slope = 0.0;
    double predicted = 0.0;
    std::vector<std::pair<double, double>> table;  // (N, norm)
};
ScalingCheck potential_scaling_check(double beta, const std::vector<int>& N_list, double p, int d);

// Finite-window time quadrature of ||S^(k,a) B_j U(t) gamma0||^2 on [0, Tw]
// against ||gamma0||_alpha (d=2 only).
struct SpacetimeProbe {
    double lhs = 0.0;
    double rhs = 0.0;
    std::vector<std::pair<double, double>> window_curve;  // (t, cumulative lhs)
};
SpacetimeProbe spacetime_bound_probe(const SeparableKernel& gamma0, int j, double alpha,
                                     double T_window, int nodes);

// Random kernel builders shared by the probes and the tests.
SeparableKernel random_separable_kernel(const GridSpec& g, int order, int rank,
                                        std::mt19937_64& rng, double decay = 2.0);
SeparableKernel random_positive_kernel(const GridSpec& g, int order, int rank,
                                       std::mt19937_64& rng, double decay = 2.0);

}  // namespace qgp
