#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qgp/grid.hpp"

namespace qgp {

// Scaled three-body potential V_N(x, y) = N^(2 d beta) V(N^beta x, N^beta y).
// The builtin Gaussian family is a Gaussian in all three pairwise separations,
//   V(u, v) = amplitude * exp(-(|u|^2 + |v|^2 + |u-v|^2) / (2 width^2)),
// which is invariant under the full triple permutation group, so the ordered
// triple sum in the Hamiltonian commutes with particle permutations exactly.
struct PotentialSpec {
    enum class Family { Gaussian, Constant, Zero };
    Family family = Family::Gaussian;
    double amplitude = 1.0;
    double width = 0.45;
    double beta = 0.1;
    int N = 3;

    void validate(int d) const;  // beta in (0, 1/(4(d+1))), V >= 0, N >= 1
    // Base V at separations u = x_i - x_j, v = x_i - x_k (d components each).
    double eval_base(const double* u, const double* v, int d) const;
    double eval_scaled(const double* u, const double* v, int d) const;
    // b0 = integral of V over the (periodized) separation grid, h^(2d) weights.
    double b0_quadrature(const GridSpec& g) const;
    // max V over separations with one component at L/2 must be < 1e-8 * max V.
    bool decays_within_box(const GridSpec& g) const;
};

struct NBodyState {
    GridSpec grid;
    int N = 1;
    std::vector<cplx> values;  // row-major (M^d)^N tensor, slot 0 slowest
    double t = 0.0;
};

NBodyState make_product_state(const GridSpec& g, int N, const Field& phi);

std::uint64_t nbody_bytes_estimate(const GridSpec& g, int N);

// W(x_1..x_N) = (1/N^2) sum_{i<j<k} V_N(x_i - x_j, x_i - x_k) with minimal-image
// differences; every pairwise separation is reduced to [-L/2, L/2) before V is
// evaluated. Throws ResourceError when the estimate exceeds mem_cap_bytes.
std::vector<double> build_potential_field(const PotentialSpec& spec, const GridSpec& g, int N,
                                          std::uint64_t mem_cap_bytes);

// Strang stepping for i d_t Psi = (-Lap + W) Psi: half free flow along every
// particle axis, exact potential phase, half free flow. Precomputes the phase
// tables once per (grid, N, dt).
class NBodyEvolver {
public:
    NBodyEvolver(const GridSpec& g, int N, const std::vector<double>& W, double dt);
    void step(NBodyState& state) const;
    double dt() const { return dt_; }

private:
    GridSpec grid_;
    int N_;
    double dt_;
    std::vector<cplx> half_kinetic_;
    std::vector<cplx> potential_phase_;
};

struct MarginalDensity {
    int k = 1;
    GridSpec grid;
    Eigen::MatrixXcd mat;  // (M^dk) x (M^dk), operator trace = trace(mat) * h^(dk)

    double trace() const;
};

MarginalDensity marginal(const NBodyState& state, int k, std::uint64_t mem_cap_bytes);

// |phi><phi|^(tensor k) as a dense marginal on the same convention.
MarginalDensity factorized_marginal(const Field& phi, const GridSpec& g, int k);

// Sum of |eigenvalues| of the Hermitian difference, with quadrature weight.
double trace_distance(const MarginalDensity& a, const MarginalDensity& b);

double energy_per_particle(const NBodyState& state, const std::vector<double>& W);

// Tr (1-Lap_1)...(1-Lap_k) gamma.
double energy_trace_diag(const MarginalDensity& gamma);

// Partial trace over the last slot of an order-k marginal.
MarginalDensity partial_trace_last(const MarginalDensity& gamma);

// Max L2 deviation of Psi from slot-transposed copies over sampled swaps.
double symmetry_defect(const NBodyState& state);

struct ConvergenceRow {
    int N = 0;
    int M = 0;
    double beta = 0.0;
    double T = 0.0;
    int k = 1;
    double trace_distance = 0.0;
    double energy_trace_diag = 0.0;
};

}  // namespace qgp
