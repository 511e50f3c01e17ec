#include "qgp/nbody.hpp"

#include <cmath>
#include <sstream>

#include "qgp/errors.hpp"

namespace qgp {

namespace {

double min_image(double delta, double L) { return delta - L * std::round(delta / L); }

// Flat slot index -> per-axis coordinates (d of them).
inline void slot_coords(std::size_t s, int d, int M, int* out) {
    if (d == 1) {
        out[0] = static_cast<int>(s);
    } else {
        out[0] = static_cast<int>(s / static_cast<std::size_t>(M));
        out[1] = static_cast<int>(s % static_cast<std::size_t>(M));
    }
}

}  // namespace

void PotentialSpec::validate(int d) const {
    std::ostringstream bad;
    const double beta_max = 1.0 / (4.0 * (d + 1));
    if (family != Family::Zero) {
        if (!(beta > 0.0 && beta < beta_max))
            bad << "beta must lie in (0, " << beta_max << ") for d=" << d << " (got " << beta
                << "); ";
    }
    if (amplitude < 0.0) bad << "amplitude must be >= 0 (V >= 0); ";
    if (family == Family::Gaussian && !(width > 0.0)) bad << "width must be > 0; ";
    if (N < 1) bad << "N must be >= 1; ";
    if (!bad.str().empty()) throw ValidationError("PotentialSpec: " + bad.str());
}

double PotentialSpec::eval_base(const double* u, const double* v, int d) const {
    switch (family) {
        case Family::Zero:
            return 0.0;
        case Family::Constant:
            return amplitude;
        case Family::Gaussian: {
            double q = 0.0;
            for (int a = 0; a < d; ++a) {
                const double w = u[a] - v[a];
                q += u[a] * u[a] + v[a] * v[a] + w * w;
            }
            return amplitude * std::exp(-q / (2.0 * width * width));
        }
    }
    return 0.0;
}

double PotentialSpec::eval_scaled(const double* u, const double* v, int d) const {
    const double s = std::pow(static_cast<double>(N), beta);
    double us[2], vs[2];
    for (int a = 0; a < d; ++a) {
        us[a] = s * u[a];
        vs[a] = s * v[a];
    }
    return std::pow(static_cast<double>(N), 2.0 * d * beta) * eval_base(us, vs, d);
}

double PotentialSpec::b0_quadrature(const GridSpec& g) const {
    const int d = g.d;
    const std::size_t n = g.size();
    double sum = 0.0;
    double u[2], v[2];
    int cu[2], cv[2];
    for (std::size_t su = 0; su < n; ++su) {
        slot_coords(su, d, g.M, cu);
        for (int a = 0; a < d; ++a) u[a] = min_image(g.node(cu[a]), g.L);
        for (std::size_t sv = 0; sv < n; ++sv) {
            slot_coords(sv, d, g.M, cv);
            for (int a = 0; a < d; ++a) v[a] = min_image(g.node(cv[a]), g.L);
            sum += eval_base(u, v, d);
        }
    }
    return sum * std::pow(g.quad_weight(), 2);
}

bool PotentialSpec::decays_within_box(const GridSpec& g) const {
    if (family == Family::Zero) return true;
    if (family == Family::Constant) return false;
    double zero[2] = {0.0, 0.0};
    const double vmax = eval_base(zero, zero, g.d);
    double worst = 0.0;
    double u[2] = {0.0, 0.0}, v[2] = {0.0, 0.0};
    u[0] = g.L / 2.0;
    for (double vx : {0.0, g.L / 2.0, -g.L / 4.0}) {
        v[0] = vx;
        worst = std::max(worst, eval_base(u, v, g.d));
        worst = std::max(worst, eval_base(v, u, g.d));
    }
    return worst < 1e-8 * vmax;
}

NBodyState make_product_state(const GridSpec& g, int N, const Field& phi) {
    if (phi.size() != g.size()) throw ValidationError("make_product_state: field/grid mismatch");
    if (N < 1) throw ValidationError("make_product_state: N must be >= 1");
    const std::size_t slot = g.size();
    std::size_t total = 1;
    for (int i = 0; i < N; ++i) total *= slot;
    NBodyState st{g, N, std::vector<cplx>(total), 0.0};
    // Fill as repeated outer product.
    st.values.assign(1, cplx(1.0));
    for (int i = 0; i < N; ++i) {
        std::vector<cplx> next(st.values.size() * slot);
        std::size_t idx = 0;
        for (const auto& base : st.values)
            for (std::size_t s = 0; s < slot; ++s) next[idx++] = base * phi[s];
        st.values = std::move(next);
    }
    // Normalize to unit L2 norm with h^(dN) weights.
    double nrm2 = 0.0;
    for (const auto& v : st.values) nrm2 += std::norm(v);
    nrm2 *= std::pow(g.quad_weight(), N);
    const double scale = 1.0 / std::sqrt(nrm2);
    for (auto& v : st.values) v *= scale;
    return st;
}

std::uint64_t nbody_bytes_estimate(const GridSpec& g, int N) {
    std::uint64_t total = 1;
    for (int i = 0; i < N; ++i) total *= static_cast<std::uint64_t>(g.size());
    // state + W + two phase tables + transform scratch slack
    return total * (16 + 8 + 16 + 16) + (1u << 20);
}

std::vector<double> build_potential_field(const PotentialSpec& spec, const GridSpec& g, int N,
                                          std::uint64_t mem_cap_bytes) {
    const std::uint64_t need = nbody_bytes_estimate(g, N);
    if (need > mem_cap_bytes)
        throw ResourceError("build_potential_field: requires " + std::to_string(need) +
                                " bytes > cap " + std::to_string(mem_cap_bytes),
                            need);
    const int d = g.d;
    const std::size_t slot = g.size();
    std::size_t total = 1;
    for (int i = 0; i < N; ++i) total *= slot;
    std::vector<double> W(total, 0.0);
    if (N < 3 || spec.family == PotentialSpec::Family::Zero) return W;

    // Pair table over separation indices: V_N at (du, dv) where du, dv are
    // per-axis index differences mod M. Minimal images are taken per axis.
    std::vector<double> table(slot * slot);
    const double h = g.h();
    double u[2], v[2];
    int cu[2], cv[2];
    for (std::size_t du = 0; du < slot; ++du) {
        slot_coords(du, d, g.M, cu);
        for (int a = 0; a < d; ++a) u[a] = min_image(cu[a] * h, g.L);
        for (std::size_t dv = 0; dv < slot; ++dv) {
            slot_coords(dv, d, g.M, cv);
            for (int a = 0; a < d; ++a) v[a] = min_image(cv[a] * h, g.L);
            table[du * slot + dv] = spec.eval_scaled(u, v, d);
        }
    }

    auto pair_diff = [&](std::size_t sa, std::size_t sb) -> std::size_t {
        if (d == 1) {
            return static_cast<std::size_t>(
                (static_cast<int>(sa) - static_cast<int>(sb) + g.M) % g.M);
        }
        const int ax = (static_cast<int>(sa) / g.M - static_cast<int>(sb) / g.M + g.M) % g.M;
        const int ay = (static_cast<int>(sa) % g.M - static_cast<int>(sb) % g.M + g.M) % g.M;
        return static_cast<std::size_t>(ax * g.M + ay);
    };

    std::vector<std::size_t> coord(static_cast<std::size_t>(N));
    const double inv_n2 = 1.0 / (static_cast<double>(N) * N);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (int s = N - 1; s >= 0; --s) {
            coord[static_cast<std::size_t>(s)] = rem % slot;
            rem /= slot;
        }
        double w = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                for (int kk = j + 1; kk < N; ++kk) {
                    const std::size_t du = pair_diff(coord[static_cast<std::size_t>(i)],
                                                     coord[static_cast<std::size_t>(j)]);
                    const std::size_t dv = pair_diff(coord[static_cast<std::size_t>(i)],
                                                     coord[static_cast<std::size_t>(kk)]);
                    w += table[du * slot + dv];
                }
        W[idx] = inv_n2 * w;
    }
    return W;
}

NBodyEvolver::NBodyEvolver(const GridSpec& g, int N, const std::vector<double>& W, double dt)
    : grid_(g), N_(N), dt_(dt) {
    if (!(dt > 0.0)) throw ValidationError("NBodyEvolver: dt must be > 0");
    std::size_t total = 1;
    for (int i = 0; i < N; ++i) total *= g.size();
    if (W.size() != total) throw ValidationError("NBodyEvolver: potential field size mismatch");

    // Per-slot |k|^2 table, then the full half-step kinetic phase.
    const auto k = freq_table(g);
    std::vector<double> ksq_slot(g.size());
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j) ksq_slot[static_cast<std::size_t>(j)] = k[j] * k[j];
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < g.M; ++j0)
            for (int j1 = 0; j1 < g.M; ++j1)
                ksq_slot[idx++] = k[j0] * k[j0] + k[j1] * k[j1];
    }
    half_kinetic_.resize(total);
    const std::size_t slot = g.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        double ksum = 0.0;
        for (int s = 0; s < N; ++s) {
            ksum += ksq_slot[rem % slot];
            rem /= slot;
        }
        half_kinetic_[idx] = std::polar(1.0, -0.5 * dt * ksum);
    }
    potential_phase_.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx)
        potential_phase_[idx] = std::polar(1.0, -dt * W[idx]);
}

void NBodyEvolver::step(NBodyState& state) const {
    auto& v = state.values;
    const int axes = grid_.d * N_;
    fft_all_axes(v.data(), v.size(), grid_.M, axes, true);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_kinetic_[i];
    fft_all_axes(v.data(), v.size(), grid_.M, axes, false);
    double probe = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] *= potential_phase_[i];
        probe += v[i].real();
    }
    if (!std::isfinite(probe)) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
                throw NumericalError("nbody step: nonfinite value at node " + std::to_string(i) +
                                     ", t=" + std::to_string(state.t));
        throw NumericalError("nbody step: nonfinite values");
    }
    fft_all_axes(v.data(), v.size(), grid_.M, axes, true);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_kinetic_[i];
    fft_all_axes(v.data(), v.size(), grid_.M, axes, false);
    state.t += dt_;
}

double MarginalDensity::trace() const {
    return mat.trace().real() * std::pow(grid.quad_weight(), k);
}

MarginalDensity marginal(const NBodyState& state, int k, std::uint64_t mem_cap_bytes) {
    if (k < 1 || k > state.N) throw ValidationError("marginal: need 1 <= k <= N");
    std::size_t rows = 1, cols = 1;
    for (int i = 0; i < k; ++i) rows *= state.grid.size();
    for (int i = k; i < state.N; ++i) cols *= state.grid.size();
    const std::uint64_t need = static_cast<std::uint64_t>(rows) * rows * 16;
    if (need > mem_cap_bytes)
        throw ResourceError("marginal: dense k-marginal needs " + std::to_string(need) +
                                " bytes > cap " + std::to_string(mem_cap_bytes),
                            need);
    using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> A(state.values.data(), static_cast<Eigen::Index>(rows),
                               static_cast<Eigen::Index>(cols));
    MarginalDensity out;
    out.k = k;
    out.grid = state.grid;
    const double w = std::pow(state.grid.quad_weight(), state.N - k);
    out.mat = (A * A.adjoint()) * w;
    return out;
}

MarginalDensity factorized_marginal(const Field& phi, const GridSpec& g, int k) {
    std::size_t rows = 1;
    for (int i = 0; i < k; ++i) rows *= g.size();
    Eigen::VectorXcd v(static_cast<Eigen::Index>(rows));
    // k-fold tensor power of phi.
    std::vector<cplx> cur(1, cplx(1.0));
    for (int i = 0; i < k; ++i) {
        std::vector<cplx> next(cur.size() * g.size());
        std::size_t idx = 0;
        for (const auto& b : cur)
            for (std::size_t s = 0; s < g.size(); ++s) next[idx++] = b * phi[s];
        cur = std::move(next);
    }
    for (std::size_t i = 0; i < rows; ++i) v(static_cast<Eigen::Index>(i)) = cur[i];
    MarginalDensity out;
    out.k = k;
    out.grid = g;
    out.mat = v * v.adjoint();
    const double tr = out.trace();
    if (tr > 0.0) out.mat /= tr;
    return out;
}

double trace_distance(const MarginalDensity& a, const MarginalDensity& b) {
    if (a.mat.rows() != b.mat.rows())
        throw ValidationError("trace_distance: dimension mismatch");
    Eigen::MatrixXcd diff = a.mat - b.mat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("trace_distance: eigenvalue solver failed");
    const double w = std::pow(a.grid.quad_weight(), a.k);
    return es.eigenvalues().cwiseAbs().sum() * w;
}

double energy_per_particle(const NBodyState& state, const std::vector<double>& W) {
    const GridSpec& g = state.grid;
    const int axes = g.d * state.N;
    std::vector<cplx> hat = state.values;
    fft_all_axes(hat.data(), hat.size(), g.M, axes, true);

    const auto k = freq_table(g);
    std::vector<double> ksq_slot(g.size());
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j) ksq_slot[static_cast<std::size_t>(j)] = k[j] * k[j];
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < g.M; ++j0)
            for (int j1 = 0; j1 < g.M; ++j1)
                ksq_slot[idx++] = k[j0] * k[j0] + k[j1] * k[j1];
    }
    const std::size_t slot = g.size();
    double kin = 0.0;
    for (std::size_t idx = 0; idx < hat.size(); ++idx) {
        std::size_t rem = idx;
        double ksum = 0.0;
        for (int s = 0; s < state.N; ++s) {
            ksum += ksq_slot[rem % slot];
            rem /= slot;
        }
        kin += ksum * std::norm(hat[idx]);
    }
    double pot = 0.0;
    for (std::size_t idx = 0; idx < state.values.size(); ++idx)
        pot += W[idx] * std::norm(state.values[idx]);
    const double wq = std::pow(g.quad_weight(), state.N);
    return (kin + pot) * wq / state.N;
}

double energy_trace_diag(const MarginalDensity& gamma) {
    const GridSpec& g = gamma.grid;
    const int axes = g.d * gamma.k;
    const std::size_t n = static_cast<std::size_t>(gamma.mat.rows());

    // gamma_hat = (F tensor ... ) gamma (F tensor ...)^H via column transforms.
    Eigen::MatrixXcd work = gamma.mat;
    std::vector<cplx> buf(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) buf[r] = work(static_cast<Eigen::Index>(r),
                                                          static_cast<Eigen::Index>(c));
        fft_all_axes(buf.data(), n, g.M, axes, true);
        for (std::size_t r = 0; r < n; ++r)
            work(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = buf[r];
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c)
            buf[c] = std::conj(work(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        fft_all_axes(buf.data(), n, g.M, axes, true);
        for (std::size_t c = 0; c < n; ++c)
            work(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::conj(buf[c]);
    }

    const auto k = freq_table(g);
    std::vector<double> wslot(g.size());
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j) wslot[static_cast<std::size_t>(j)] = 1.0 + k[j] * k[j];
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < g.M; ++j0)
            for (int j1 = 0; j1 < g.M; ++j1)
                wslot[idx++] = 1.0 + k[j0] * k[j0] + k[j1] * k[j1];
    }
    const std::size_t slot = g.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        double wprod = 1.0;
        for (int s = 0; s < gamma.k; ++s) {
            wprod *= wslot[rem % slot];
            rem /= slot;
        }
        total += wprod * work(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
    return total * std::pow(g.quad_weight(), gamma.k);
}

MarginalDensity partial_trace_last(const MarginalDensity& gamma) {
    if (gamma.k < 2) throw ValidationError("partial_trace_last: need k >= 2");
    const std::size_t slot = gamma.grid.size();
    const std::size_t outer = static_cast<std::size_t>(gamma.mat.rows()) / slot;
    MarginalDensity out;
    out.k = gamma.k - 1;
    out.grid = gamma.grid;
    out.mat = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(outer),
                                     static_cast<Eigen::Index>(outer));
    for (std::size_t r = 0; r < outer; ++r)
        for (std::size_t c = 0; c < outer; ++c) {
            cplx s = 0.0;
            for (std::size_t y = 0; y < slot; ++y)
                s += gamma.mat(static_cast<Eigen::Index>(r * slot + y),
                               static_cast<Eigen::Index>(c * slot + y));
            out.mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                s * gamma.grid.quad_weight();
        }
    return out;
}

double symmetry_defect(const NBodyState& state) {
    if (state.N < 2) return 0.0;
    const std::size_t slot = state.grid.size();
    std::size_t total = state.values.size();
    double nrm2 = 0.0;
    for (const auto& v : state.values) nrm2 += std::norm(v);
    if (nrm2 == 0.0) return 0.0;

    // Strides of each slot in the flat index.
    std::vector<std::size_t> stride(static_cast<std::size_t>(state.N), 1);
    for (int s = state.N - 2; s >= 0; --s)
        stride[static_cast<std::size_t>(s)] = stride[static_cast<std::size_t>(s + 1)] * slot;

    double worst = 0.0;
    for (int a = 0; a < state.N - 1; ++a) {
        const int b = a + 1;
        double diff2 = 0.0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            const std::size_t ca = (idx / stride[static_cast<std::size_t>(a)]) % slot;
            const std::size_t cb = (idx / stride[static_cast<std::size_t>(b)]) % slot;
            if (ca >= cb) continue;
            const std::size_t swapped = idx + (cb - ca) * stride[static_cast<std::size_t>(a)] -
                                        (cb - ca) * stride[static_cast<std::size_t>(b)];
            diff2 += 2.0 * std::norm(state.values[idx] - state.values[swapped]);
        }
        worst = std::max(worst, std::sqrt(diff2 / nrm2));
    }
    return worst;
}

}  // namespace qgp
