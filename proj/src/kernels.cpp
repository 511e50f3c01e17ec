#include "qgp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgp/errors.hpp"

namespace qgp {

namespace {

void check_order(const SeparableKernel& k, int min_order, const char* op) {
    if (k.order < min_order)
        throw ValidationError(std::string(op) + ": order " + std::to_string(k.order) +
                              " < required " + std::to_string(min_order));
}

void apply_flow_field(Field& f, const std::vector<cplx>& symbol, const GridSpec& g) {
    fft_all_axes(f.data(), f.size(), g.M, g.d, true);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= symbol[i];
    fft_all_axes(f.data(), f.size(), g.M, g.d, false);
}

Field pointwise_product(const Field& a, const Field& b) {
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Field pointwise_product_conj(const Field& a, const Field& b) {  // a * conj(b)
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * std::conj(b[i]);
    return out;
}

}  // namespace

void check_rank_cap(const SeparableKernel& k, int cap) {
    if (k.rank() > cap)
        throw ResourceError("separable kernel rank " + std::to_string(k.rank()) +
                                " exceeds cap " + std::to_string(cap),
                            static_cast<std::uint64_t>(k.rank()) * k.order * k.grid.size() * 32);
}

SeparableKernel factorized(const Field& phi, const GridSpec& g, int k) {
    if (k < 1) throw ValidationError("factorized: k must be >= 1");
    if (phi.size() != g.size()) throw ValidationError("factorized: field/grid size mismatch");
    KernelTerm t;
    t.coeff = 1.0;
    t.f.assign(static_cast<std::size_t>(k), phi);
    t.g.assign(static_cast<std::size_t>(k), phi);
    return SeparableKernel{g, k, {std::move(t)}};
}

SeparableKernel free_propagate(const SeparableKernel& gamma, double t) {
    SeparableKernel out = gamma;
    if (t == 0.0) return out;
    const auto symbol = SpectralMultiplier::free_flow(gamma.grid, t).values;
    for (auto& term : out.terms) {
        for (auto& f : term.f) apply_flow_field(f, symbol, gamma.grid);
        for (auto& g : term.g) apply_flow_field(g, symbol, gamma.grid);
    }
    return out;
}

SeparableKernel free_propagate_slots(const SeparableKernel& gamma, double t,
                                     const std::vector<int>& slots) {
    SeparableKernel out = gamma;
    if (t == 0.0 || slots.empty()) return out;
    const auto symbol = SpectralMultiplier::free_flow(gamma.grid, t).values;
    for (int s : slots)
        if (s < 1 || s > gamma.order)
            throw ValidationError("free_propagate_slots: slot " + std::to_string(s) +
                                  " out of range 1.." + std::to_string(gamma.order));
    for (auto& term : out.terms)
        for (int s : slots) {
            apply_flow_field(term.f[static_cast<std::size_t>(s - 1)], symbol, gamma.grid);
            apply_flow_field(term.g[static_cast<std::size_t>(s - 1)], symbol, gamma.grid);
        }
    return out;
}

namespace {

enum class Pin { Plus, Minus };

// Pin the slot pair (a, b) onto slot j. Plus folds f_a conj(g_a) f_b conj(g_b)
// into the f factor at j; Minus folds g_a conj(f_a) g_b conj(f_b) into the g
// factor. Slots a and b are removed, the rest keep their order.
SeparableKernel contract_impl(const SeparableKernel& gamma, int j, int a, int b, Pin pin) {
    check_order(gamma, 3, "contract");
    const int q = gamma.order;
    if (!(1 <= j && j <= q) || !(1 <= a && a < b && b <= q) || j == a || j == b) {
        std::ostringstream msg;
        msg << "contract: invalid slots j=" << j << " pair=(" << a << "," << b
            << ") for order " << q;
        throw ValidationError(msg.str());
    }
    SeparableKernel out{gamma.grid, q - 2, {}};
    out.terms.reserve(gamma.terms.size());
    const std::size_t ja = static_cast<std::size_t>(j - 1);
    const std::size_t aa = static_cast<std::size_t>(a - 1);
    const std::size_t bb = static_cast<std::size_t>(b - 1);
    for (const auto& term : gamma.terms) {
        KernelTerm nt;
        nt.coeff = term.coeff;
        nt.f.reserve(static_cast<std::size_t>(q - 2));
        nt.g.reserve(static_cast<std::size_t>(q - 2));
        Field fold;
        if (pin == Pin::Plus) {
            fold = pointwise_product_conj(term.f[aa], term.g[aa]);
            fold = pointwise_product(fold, pointwise_product_conj(term.f[bb], term.g[bb]));
        } else {
            fold = pointwise_product_conj(term.g[aa], term.f[aa]);
            fold = pointwise_product(fold, pointwise_product_conj(term.g[bb], term.f[bb]));
        }
        for (std::size_t s = 0; s < static_cast<std::size_t>(q); ++s) {
            if (s == aa || s == bb) continue;
            if (s == ja) {
                if (pin == Pin::Plus) {
                    nt.f.push_back(pointwise_product(term.f[s], fold));
                    nt.g.push_back(term.g[s]);
                } else {
                    nt.f.push_back(term.f[s]);
                    nt.g.push_back(pointwise_product(term.g[s], fold));
                }
            } else {
                nt.f.push_back(term.f[s]);
                nt.g.push_back(term.g[s]);
            }
        }
        out.terms.push_back(std::move(nt));
    }
    return out;
}

}  // namespace

SeparableKernel contract_plus(const SeparableKernel& gamma, int j) {
    if (j > gamma.order - 2)
        throw ValidationError("contract_plus: j must be <= order-2");
    return contract_impl(gamma, j, gamma.order - 1, gamma.order, Pin::Plus);
}

SeparableKernel contract_minus(const SeparableKernel& gamma, int j) {
    if (j > gamma.order - 2)
        throw ValidationError("contract_minus: j must be <= order-2");
    return contract_impl(gamma, j, gamma.order - 1, gamma.order, Pin::Minus);
}

SeparableKernel contract(const SeparableKernel& gamma, int j) {
    SeparableKernel plus = contract_plus(gamma, j);
    SeparableKernel minus = contract_minus(gamma, j);
    for (auto& t : minus.terms) {
        t.coeff = -t.coeff;
        plus.terms.push_back(std::move(t));
    }
    return plus;
}

SeparableKernel contract_plus_at(const SeparableKernel& gamma, int j, int a, int b) {
    return contract_impl(gamma, j, a, b, Pin::Plus);
}

SeparableKernel contract_minus_at(const SeparableKernel& gamma, int j, int a, int b) {
    return contract_impl(gamma, j, a, b, Pin::Minus);
}

SeparableKernel contract_at(const SeparableKernel& gamma, int j, int a, int b) {
    SeparableKernel plus = contract_plus_at(gamma, j, a, b);
    SeparableKernel minus = contract_minus_at(gamma, j, a, b);
    for (auto& t : minus.terms) {
        t.coeff = -t.coeff;
        plus.terms.push_back(std::move(t));
    }
    return plus;
}

namespace {

// Frequency-space factor table of a kernel: per term, per slot, the forward
// transforms of f and g. Weighted single-field inner products then reduce to
// weighted sums over the frequency grid.
struct FreqFactors {
    std::vector<std::vector<Field>> f, g;
};

FreqFactors to_freq(const SeparableKernel& k) {
    FreqFactors out;
    out.f.resize(k.terms.size());
    out.g.resize(k.terms.size());
    for (std::size_t m = 0; m < k.terms.size(); ++m) {
        out.f[m].reserve(k.terms[m].f.size());
        out.g[m].reserve(k.terms[m].g.size());
        for (const auto& fld : k.terms[m].f) out.f[m].push_back(transform_forward(fld, k.grid));
        for (const auto& fld : k.terms[m].g) out.g[m].push_back(transform_forward(fld, k.grid));
    }
    return out;
}

cplx weighted_inner(const Field& a, const Field& b, const std::vector<double>& w, double qw) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::conj(a[i]) * b[i];
    return s * qw;
}

std::vector<double> sobolev_weight_sq(const GridSpec& g, double alpha) {
    auto mult = SpectralMultiplier::sobolev(g, alpha).values;
    std::vector<double> w(mult.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = mult[i].real() * mult[i].real();
    return w;
}

}  // namespace

cplx kernel_inner(const SeparableKernel& g1, const SeparableKernel& g2, double alpha) {
    if (g1.order != g2.order) throw ValidationError("kernel_inner: order mismatch");
    if (g1.grid.M != g2.grid.M || g1.grid.d != g2.grid.d || g1.grid.L != g2.grid.L)
        throw ValidationError("kernel_inner: grid mismatch");
    if (g1.terms.empty() || g2.terms.empty()) return 0.0;

    const auto w = sobolev_weight_sq(g1.grid, alpha);
    const double qw = g1.grid.quad_weight();
    const FreqFactors a = to_freq(g1);
    const FreqFactors b = (&g1 == &g2) ? FreqFactors{} : to_freq(g2);
    const FreqFactors& bb = (&g1 == &g2) ? a : b;

    const int k = g1.order;
    std::complex<long double> acc = 0.0;
    for (std::size_t m = 0; m < g1.terms.size(); ++m) {
        for (std::size_t n = 0; n < g2.terms.size(); ++n) {
            cplx prod = std::conj(g1.terms[m].coeff) * g2.terms[n].coeff;
            for (int i = 0; i < k && prod != cplx(0.0); ++i) {
                prod *= weighted_inner(a.f[m][static_cast<std::size_t>(i)],
                                       bb.f[n][static_cast<std::size_t>(i)], w, qw);
                prod *= weighted_inner(bb.g[n][static_cast<std::size_t>(i)],
                                       a.g[m][static_cast<std::size_t>(i)], w, qw);
            }
            acc += std::complex<long double>(prod.real(), prod.imag());
        }
    }
    return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

double kernel_norm(const SeparableKernel& gamma, double alpha) {
    const cplx v = kernel_inner(gamma, gamma, alpha);
    return std::sqrt(std::max(0.0, v.real()));
}

cplx kernel_trace(const SeparableKernel& gamma) {
    const double qw = gamma.grid.quad_weight();
    cplx total = 0.0;
    for (const auto& term : gamma.terms) {
        cplx prod = term.coeff;
        for (std::size_t i = 0; i < term.f.size(); ++i) {
            cplx s = 0.0;
            for (std::size_t x = 0; x < term.f[i].size(); ++x)
                s += term.f[i][x] * std::conj(term.g[i][x]);
            prod *= s * qw;
        }
        total += prod;
    }
    return total;
}

SeparableKernel kernel_adjoint(const SeparableKernel& gamma) {
    SeparableKernel out = gamma;
    for (auto& t : out.terms) {
        std::swap(t.f, t.g);
        t.coeff = std::conj(t.coeff);
    }
    return out;
}

SeparableKernel kernel_add(const SeparableKernel& a, const SeparableKernel& b, cplx scale,
                           int rank_cap) {
    if (a.order != b.order) throw ValidationError("kernel_add: order mismatch");
    SeparableKernel out = a;
    for (const auto& t : b.terms) {
        KernelTerm nt = t;
        nt.coeff *= scale;
        out.terms.push_back(std::move(nt));
    }
    check_rank_cap(out, rank_cap);
    return out;
}

SeparableKernel kernel_scale(const SeparableKernel& a, cplx scale) {
    SeparableKernel out = a;
    for (auto& t : out.terms) t.coeff *= scale;
    return out;
}

namespace {

// Difference of two rank-1 terms with equal coefficients, telescoped over the
// 2k field positions so every emitted term carries exactly one small factor.
// Keeps tiny-difference norms far away from the sqrt(eps) cancellation floor
// of the plain Gram evaluation.
void telescope_difference(const KernelTerm& A, const KernelTerm& B, const GridSpec& grid,
                          int order, std::vector<KernelTerm>& out) {
    const std::size_t k = A.f.size();
    if (A.coeff != B.coeff) {
        KernelTerm t = B;
        t.coeff = A.coeff - B.coeff;
        out.push_back(std::move(t));
    }
    for (std::size_t p = 0; p < 2 * k; ++p) {
        const bool is_f = (p % 2 == 0);
        const std::size_t s = p / 2;
        const Field& fa = is_f ? A.f[s] : A.g[s];
        const Field& fb = is_f ? B.f[s] : B.g[s];
        Field delta(fa.size());
        bool nonzero = false;
        for (std::size_t x = 0; x < fa.size(); ++x) {
            delta[x] = fa[x] - fb[x];
            nonzero |= (delta[x] != cplx(0.0));
        }
        if (!nonzero) continue;
        KernelTerm t;
        t.coeff = A.coeff;
        t.f.resize(k);
        t.g.resize(k);
        for (std::size_t sp = 0; sp < k; ++sp) {
            const std::size_t pf = 2 * sp, pg = 2 * sp + 1;
            t.f[sp] = (pf < p) ? A.f[sp] : ((pf == p) ? delta : B.f[sp]);
            t.g[sp] = (pg < p) ? A.g[sp] : ((pg == p) ? delta : B.g[sp]);
        }
        out.push_back(std::move(t));
    }
    (void)grid;
    (void)order;
}

}  // namespace

double duhamel_residual(const std::vector<WaveFunction>& traj, int k, double b0_rhs, int nodes,
                        QuadratureRule rule, int rank_cap) {
    if (traj.size() < 2) throw ValidationError("duhamel_residual: need at least two snapshots");
    if (nodes < 2) throw ValidationError("duhamel_residual: need at least 2 nodes");
    const std::size_t snaps = traj.size() - 1;
    if (snaps % static_cast<std::size_t>(nodes) != 0)
        throw ValidationError("duhamel_residual: snapshot count " + std::to_string(snaps) +
                              " not divisible by node count " + std::to_string(nodes));
    if (rule == QuadratureRule::Simpson && nodes % 2 != 0)
        throw ValidationError("duhamel_residual: Simpson needs an even node count");
    const std::size_t stride = snaps / static_cast<std::size_t>(nodes);
    const GridSpec& g = traj.front().grid;
    const double t = traj.back().t - traj.front().t;
    const double hq = t / nodes;

    // gamma_t^(k) - U(t) gamma_0^(k), telescoped.
    SeparableKernel lhs = factorized(traj.back().values, g, k);
    SeparableKernel prop0 = free_propagate(factorized(traj.front().values, g, k), t);
    SeparableKernel residual{g, k, {}};
    telescope_difference(lhs.terms[0], prop0.terms[0], g, k, residual.terms);

    // + i b0 sum_j int_0^t U(t-s) B_{j;k+1,k+2} gamma_s^(k+2) ds.
    for (int q = 0; q <= nodes; ++q) {
        double w;
        if (rule == QuadratureRule::Simpson)
            w = (q == 0 || q == nodes) ? hq / 3.0 : ((q % 2 == 1) ? 4.0 * hq / 3.0 : 2.0 * hq / 3.0);
        else
            w = (q == 0 || q == nodes) ? hq / 2.0 : hq;
        const WaveFunction& snap = traj[static_cast<std::size_t>(q) * stride];
        const double s = snap.t - traj.front().t;
        SeparableKernel g3 = factorized(snap.values, g, k + 2);
        for (int j = 1; j <= k; ++j) {
            SeparableKernel bj = free_propagate(contract(g3, j), t - s);
            residual = kernel_add(residual, bj, cplx(0.0, b0_rhs * w), rank_cap);
        }
    }
    return kernel_norm(residual, 0.0);
}

double commutation_check(const SeparableKernel& gamma, int i, int l, double gap_a, double gap_b,
                         double gap_c, bool plus_only) {
    const int q = gamma.order;
    check_order(gamma, 6, "commutation_check");
    if (!(1 <= i && i < l && l <= q - 4))
        throw ValidationError("commutation_check: need 1 <= i < l <= order-4, got i=" +
                              std::to_string(i) + " l=" + std::to_string(l) + " order=" +
                              std::to_string(q));

    const GridSpec& g = gamma.grid;
    SeparableKernel diff{g, q - 4, {}};
    const std::vector<std::pair<Pin, Pin>> branches =
        plus_only ? std::vector<std::pair<Pin, Pin>>{{Pin::Plus, Pin::Plus}}
                  : std::vector<std::pair<Pin, Pin>>{{Pin::Plus, Pin::Plus},
                                                     {Pin::Plus, Pin::Minus},
                                                     {Pin::Minus, Pin::Plus},
                                                     {Pin::Minus, Pin::Minus}};

    for (const auto& term : gamma.terms) {
        SeparableKernel single{g, q, {term}};
        for (const auto& [pin_i, pin_l] : branches) {
            const double sign = ((pin_i == Pin::Minus) != (pin_l == Pin::Minus)) ? -1.0 : 1.0;

            // LHS: U(a) B_l U(b) B_i U(c), contractions pinning the last two slots.
            SeparableKernel left = free_propagate(single, gap_c);
            left = contract_impl(left, i, q - 1, q, pin_i);
            left = free_propagate(left, gap_b);
            left = contract_impl(left, l, q - 3, q - 2, pin_l);
            left = free_propagate(left, gap_a);

            // RHS: U(a+b) B_i U(-b) B_l U(b+c), B_l pinning (q-3, q-2) while the
            // last pair stays alive, the middle propagator acting on every
            // live slot.
            SeparableKernel right = free_propagate(single, gap_b + gap_c);
            right = contract_impl(right, l, q - 3, q - 2, pin_l);
            right = free_propagate(right, -gap_b);
            right = contract_impl(right, i, q - 3, q - 2, pin_i);
            right = free_propagate(right, gap_a + gap_b);

            // Both sides are rank-1 images of the same product term; telescope
            // their difference instead of subtracting O(1) Gram entries.
            KernelTerm lt = left.terms[0];
            KernelTerm rt = right.terms[0];
            lt.coeff *= sign;
            rt.coeff *= sign;
            telescope_difference(lt, rt, g, q - 4, diff.terms);
        }
    }
    return kernel_norm(diff, 0.0);
}

SeparableKernel duhamel_integrand(const SeparableKernel& gamma_top, const std::vector<int>& picks,
                                  const std::vector<double>& times) {
    const int n = static_cast<int>(picks.size());
    if (times.size() != picks.size() + 1)
        throw ValidationError("duhamel_integrand: times must have picks.size()+1 entries");
    if (gamma_top.order < 2 * n + 1)
        throw ValidationError("duhamel_integrand: kernel order too small for the pick count");
    SeparableKernel k = gamma_top;
    for (int j = n; j >= 1; --j) {
        k = contract(k, picks[static_cast<std::size_t>(j - 1)]);
        k = free_propagate(k, times[static_cast<std::size_t>(j - 1)] -
                                  times[static_cast<std::size_t>(j)]);
    }
    return k;
}

}  // namespace qgp
