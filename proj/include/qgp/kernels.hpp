#pragma once

#include <vector>

#include "qgp/grid.hpp"
#include "qgp/nls.hpp"

namespace qgp {

// Rank-R separable kernel of order k:
//   gamma(x_1..x_k; x'_1..x'_k) = sum_m c_m prod_i f_{m,i}(x_i) conj(g_{m,i}(x'_i)).
// All factor fields live on one shared grid. An empty term list is the zero
// kernel. Kernels are immutable values; every operation returns a new kernel.
struct KernelTerm {
    cplx coeff;
    std::vector<Field> f;  // k unprimed factors
    std::vector<Field> g;  // k primed factors (stored unconjugated)
};

struct SeparableKernel {
    GridSpec grid;
    int order = 0;
    std::vector<KernelTerm> terms;

    int rank() const { return static_cast<int>(terms.size()); }
};

// Default rank cap; operations that accumulate terms check against it.
inline constexpr int kDefaultRankCap = 1 << 16;

void check_rank_cap(const SeparableKernel& k, int cap);

// |phi><phi|^(tensor k): rank-1, f = g = phi, coefficient 1.
SeparableKernel factorized(const Field& phi, const GridSpec& g, int k);

// e^{i t (Lap_x - Lap_x')} gamma: every f and g factor gets the free-flow(t)
// multiplier (the conjugation in the kernel turns e^{-it Lap_x'} into
// free-flow(t) on g). Unitary for the alpha=0 kernel norm.
SeparableKernel free_propagate(const SeparableKernel& gamma, double t);

// Same, restricted to a subset of slots (1-based).
SeparableKernel free_propagate_slots(const SeparableKernel& gamma, double t,
                                     const std::vector<int>& slots);

// Contractions pinning the last two slots (k+1, k+2) of an order-(k+2) kernel
// onto slot j (1-based, j <= k). A grid delta is the density 1/h^d at a node,
// so delta contractions are pure pointwise products with no extra h factors.
SeparableKernel contract_plus(const SeparableKernel& gamma, int j);
SeparableKernel contract_minus(const SeparableKernel& gamma, int j);
SeparableKernel contract(const SeparableKernel& gamma, int j);  // plus - minus

// Generalized contraction pinning the slot pair (a, b) (1-based positions,
// a < b, both != j) onto slot j, leaving other slots alive in order.
SeparableKernel contract_plus_at(const SeparableKernel& gamma, int j, int a, int b);
SeparableKernel contract_minus_at(const SeparableKernel& gamma, int j, int a, int b);
SeparableKernel contract_at(const SeparableKernel& gamma, int j, int a, int b);

// Weighted Gram inner product without materializing the dense kernel:
//   <g1, g2>_alpha = sum_{m,m'} conj(c_m) c_{m'}
//                    prod_i <S^a f_{m,i}, S^a f_{m',i}> <S^a g_{m',i}, S^a g_{m,i}>.
cplx kernel_inner(const SeparableKernel& g1, const SeparableKernel& g2, double alpha);
double kernel_norm(const SeparableKernel& gamma, double alpha);

cplx kernel_trace(const SeparableKernel& gamma);

// Hermitian adjoint: swap f <-> g, conjugate coefficients.
SeparableKernel kernel_adjoint(const SeparableKernel& gamma);

// Concatenate term lists: a + scale*b. Checks the rank cap.
SeparableKernel kernel_add(const SeparableKernel& a, const SeparableKernel& b, cplx scale = 1.0,
                           int rank_cap = kDefaultRankCap);
SeparableKernel kernel_scale(const SeparableKernel& a, cplx scale);

// Residual of the integral hierarchy equation with factorized kernels built
// from an equally-spaced trajectory covering [0, t]:
//   gamma_t^(k) - U^(k)(t) gamma_0^(k)
//     + i*b0_rhs*sum_j int_0^t U^(k)(t-s) B_{j;k+1,k+2} gamma_s^(k+2) ds,
// returned as the alpha=0 kernel norm. `nodes` subintervals of the trajectory
// are used (nodes+1 snapshots, Simpson if nodes is even, trapezoid otherwise).
// The snapshot count minus one must be divisible by nodes.
enum class QuadratureRule { Simpson, Trapezoid };
double duhamel_residual(const std::vector<WaveFunction>& traj, int k, double b0_rhs, int nodes,
                        QuadratureRule rule = QuadratureRule::Simpson,
                        int rank_cap = kDefaultRankCap);

// Propagator/contraction exchange identity at a column boundary. gamma has
// order q >= 6; both compositions below are applied to it and the alpha=0 norm
// of the difference is returned (zero in exact arithmetic):
//   LHS = U(a) B_{l;q-3,q-2} U(b) B_{i;q-1,q} U(c) gamma
//   RHS = U(a+b) B_{i;..} U(-b)~ B_{l;q-3,q-2} U(b+c) gamma
// where U(-b)~ propagates every slot alive between the two contractions and
// the pinned pairs follow the positional bookkeeping of the swapped order.
// Preconditions: 1 <= i < l <= q-4. `plus_only` drops the minus parts of both
// contractions (the identity holds term by term).
double commutation_check(const SeparableKernel& gamma, int i, int l, double gap_a, double gap_b,
                         double gap_c, bool plus_only = false);

// Duhamel integrand J^r(t; mu) for separable kernels: alternating free
// propagation over the time gaps and contractions at the collapse-map picks.
//   J = U(t_r - t_{r+2}) B_{mu_1} U(t_{r+2} - t_{r+4}) ... B_{mu_n} gamma.
// `times` holds (t_r, t_{r+2}, ..., t_{r+2n}); picks are 1-based.
SeparableKernel duhamel_integrand(const SeparableKernel& gamma_top, const std::vector<int>& picks,
                                  const std::vector<double>& times);

}  // namespace qgp
