#include "qgp/nls.hpp"

#include <cmath>
#include <sstream>

#include "qgp/errors.hpp"

namespace qgp {

void NlsParams::validate() const {
    std::ostringstream bad;
    if (b0 < 0.0) bad << "b0 must be >= 0 (defocusing); ";
    if (lambda2 < 0.0) bad << "lambda2 must be >= 0; ";
    if (lambda3 < 0.0) bad << "lambda3 must be >= 0; ";
    if (!(dt > 0.0)) bad << "dt must be > 0; ";
    if (!bad.str().empty()) throw ValidationError("NlsParams: " + bad.str());
}

double mass(const WaveFunction& phi) {
    double s = 0.0;
    for (const auto& v : phi.values) s += std::norm(v);
    return s * phi.grid.quad_weight();
}

double energy(const WaveFunction& phi, const NlsParams& p) {
    const GridSpec& g = phi.grid;
    Field fh = transform_forward(phi.values, g);
    const auto k = freq_table(g);
    double kin = 0.0;
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j) kin += k[j] * k[j] * std::norm(fh[j]);
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < g.M; ++j0)
            for (int j1 = 0; j1 < g.M; ++j1)
                kin += (k[j0] * k[j0] + k[j1] * k[j1]) * std::norm(fh[idx++]);
    }
    double p4 = 0.0, p6 = 0.0;
    for (const auto& v : phi.values) {
        const double a2 = std::norm(v);
        p4 += a2 * a2;
        p6 += a2 * a2 * a2;
    }
    const double w = g.quad_weight();
    return kin * w + 0.5 * p.lambda2 * p4 * w + p.quintic() / 3.0 * p6 * w;
}

namespace {

void check_finite(const Field& f, double t) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i].real()) || !std::isfinite(f[i].imag())) {
            std::ostringstream msg;
            msg << "step_strang: nonfinite value at node " << i << ", t=" << t
                << ", value=(" << f[i].real() << "," << f[i].imag() << ")";
            throw NumericalError(msg.str());
        }
    }
}

}  // namespace

void step_strang_inplace(WaveFunction& phi, const NlsParams& p) {
    p.validate();
    const GridSpec& g = phi.grid;
    const double dt = p.dt;
    const double lq = p.quintic();

    static thread_local struct {
        GridSpec grid{0, 0, 0.0};
        double dt = -1.0;
        std::vector<cplx> half_kin;
    } cache;
    if (cache.grid.d != g.d || cache.grid.M != g.M || cache.grid.L != g.L || cache.dt != dt) {
        cache.grid = g;
        cache.dt = dt;
        cache.half_kin = SpectralMultiplier::free_flow(g, dt / 2.0).values;
    }

    Field& v = phi.values;
    fft_all_axes(v.data(), v.size(), g.M, g.d, true);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= cache.half_kin[i];
    fft_all_axes(v.data(), v.size(), g.M, g.d, false);

    for (auto& z : v) {
        const double a2 = std::norm(z);
        z *= std::polar(1.0, -dt * (p.lambda2 * a2 + lq * a2 * a2));
    }

    fft_all_axes(v.data(), v.size(), g.M, g.d, true);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= cache.half_kin[i];
    fft_all_axes(v.data(), v.size(), g.M, g.d, false);

    phi.t += dt;
    check_finite(v, phi.t);
}

WaveFunction step_strang(const WaveFunction& phi, const NlsParams& p) {
    WaveFunction out = phi;
    step_strang_inplace(out, p);
    return out;
}

std::vector<WaveFunction> evolve(const WaveFunction& phi0, const NlsParams& p, double T,
                                 int record_every) {
    p.validate();
    if (!(T > 0.0)) throw ValidationError("evolve: T must be > 0");
    if (record_every < 1) throw ValidationError("evolve: record_every must be >= 1");
    const double steps_real = T / p.dt;
    const long steps = std::lround(steps_real);
    if (steps < 1 || std::abs(steps_real - steps) > 1e-9 * std::max(1.0, steps_real))
        throw ValidationError("evolve: dt must divide T");
    if (steps % record_every != 0)
        throw ValidationError("evolve: record_every must divide the step count");

    std::vector<WaveFunction> traj;
    traj.reserve(static_cast<std::size_t>(steps / record_every) + 1);
    WaveFunction cur = phi0;
    traj.push_back(cur);
    for (long s = 1; s <= steps; ++s) {
        step_strang_inplace(cur, p);
        if (s % record_every == 0) traj.push_back(cur);
    }
    return traj;
}

}  // namespace qgp
