#include "qgp/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "qgp/errors.hpp"

namespace qgp {

namespace {

bool is_pow2(int m) { return m >= 1 && (m & (m - 1)) == 0; }

// Plans are cached per (M, batch, direction) and created with
// FFTW_ESTIMATE|FFTW_UNALIGNED so they can execute on any buffer.
// Planning is serialized; execution on distinct buffers is thread-safe.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int M, int batch, bool forward) {
        std::lock_guard<std::mutex> lk(mu_);
        auto key = std::make_tuple(M, batch, forward);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> buf(static_cast<std::size_t>(M) * batch);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fftw_plan plan = fftw_plan_many_dft(
            1, &M, batch, p, nullptr, 1, M, p, nullptr, 1, M,
            forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

constexpr int kBatch = 64;

}  // namespace

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(M);
    return s;
}

double GridSpec::quad_weight() const { return std::pow(h(), d); }

double GridSpec::node(int j) const { return -L / 2.0 + j * h(); }

double GridSpec::freq(int j) const { return 2.0 * M_PI * freq_index(j, M) / L; }

void GridSpec::validate() const {
    std::ostringstream bad;
    if (d != 1 && d != 2) bad << "d must be 1 or 2 (got " << d << "); ";
    if (M < 4 || !is_pow2(M)) bad << "M must be a power of two >= 4 (got " << M << "); ";
    if (!(L > 0.0)) bad << "L must be positive (got " << L << "); ";
    if (!bad.str().empty()) throw ValidationError("GridSpec: " + bad.str());
}

int freq_index(int j, int M) { return j < M / 2 ? j : j - M; }

std::vector<double> freq_table(const GridSpec& g) {
    std::vector<double> k(g.M);
    for (int j = 0; j < g.M; ++j) k[j] = g.freq(j);
    return k;
}

namespace {

// |k|^2 over the full d-dimensional frequency grid, storage order.
std::vector<double> ksq_table(const GridSpec& g) {
    const auto k = freq_table(g);
    std::vector<double> out(g.size());
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j) out[j] = k[j] * k[j];
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < g.M; ++j0)
            for (int j1 = 0; j1 < g.M; ++j1) out[idx++] = k[j0] * k[j0] + k[j1] * k[j1];
    }
    return out;
}

}  // namespace

SpectralMultiplier SpectralMultiplier::laplacian(const GridSpec& g) {
    SpectralMultiplier m{Kind::Laplacian, {}};
    const auto k2 = ksq_table(g);
    m.values.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) m.values[i] = cplx(-k2[i], 0.0);
    return m;
}

SpectralMultiplier SpectralMultiplier::sobolev(const GridSpec& g, double alpha) {
    SpectralMultiplier m{Kind::Sobolev, {}};
    const auto k2 = ksq_table(g);
    m.values.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i)
        m.values[i] = cplx(std::pow(1.0 + k2[i], 0.5 * alpha), 0.0);
    return m;
}

SpectralMultiplier SpectralMultiplier::free_flow(const GridSpec& g, double t) {
    SpectralMultiplier m{Kind::FreeFlow, {}};
    const auto k2 = ksq_table(g);
    m.values.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i)
        m.values[i] = std::polar(1.0, -t * k2[i]);
    return m;
}

void fft_one_axis(cplx* data, std::size_t total, int M, int axis_count, int axis, bool forward) {
    // Row-major tensor, axis 0 slowest. Lines along `axis` are strided by
    // `inner` = M^(axis_count-1-axis); gather blocks of lines into a
    // contiguous scratch, transform, scatter back with unitary scaling.
    std::size_t inner = 1;
    for (int a = axis_count - 1; a > axis; --a) inner *= static_cast<std::size_t>(M);
    const std::size_t outer = total / (inner * static_cast<std::size_t>(M));
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));

    static thread_local std::vector<cplx> scratch;
    scratch.resize(static_cast<std::size_t>(M) * kBatch);

    fftw_plan plan_full = PlanCache::instance().get(M, kBatch, forward);

    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t base = o * inner * static_cast<std::size_t>(M);
        std::size_t i = 0;
        while (i < inner) {
            const int nb = static_cast<int>(std::min<std::size_t>(kBatch, inner - i));
            fftw_plan plan = (nb == kBatch) ? plan_full : PlanCache::instance().get(M, nb, forward);
            for (int b = 0; b < nb; ++b) {
                const std::size_t start = base + i + static_cast<std::size_t>(b);
                cplx* line = scratch.data() + static_cast<std::size_t>(b) * M;
                for (int j = 0; j < M; ++j) line[j] = data[start + static_cast<std::size_t>(j) * inner];
            }
            fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                             reinterpret_cast<fftw_complex*>(scratch.data()));
            for (int b = 0; b < nb; ++b) {
                const std::size_t start = base + i + static_cast<std::size_t>(b);
                const cplx* line = scratch.data() + static_cast<std::size_t>(b) * M;
                for (int j = 0; j < M; ++j)
                    data[start + static_cast<std::size_t>(j) * inner] = line[j] * scale;
            }
            i += static_cast<std::size_t>(nb);
        }
    }
}

void fft_all_axes(cplx* data, std::size_t total, int M, int axis_count, bool forward) {
    for (int a = 0; a < axis_count; ++a) fft_one_axis(data, total, M, axis_count, a, forward);
}

namespace {

void check_field(const Field& f, const GridSpec& g, const char* op) {
    if (f.size() != g.size())
        throw ValidationError(std::string(op) + ": field size " + std::to_string(f.size()) +
                              " does not match grid size " + std::to_string(g.size()));
}

}  // namespace

Field transform_forward(const Field& f, const GridSpec& g) {
    check_field(f, g, "transform_forward");
    Field out = f;
    fft_all_axes(out.data(), out.size(), g.M, g.d, true);
    return out;
}

Field transform_inverse(const Field& f, const GridSpec& g) {
    check_field(f, g, "transform_inverse");
    Field out = f;
    fft_all_axes(out.data(), out.size(), g.M, g.d, false);
    return out;
}

Field apply_multiplier(const Field& f, const SpectralMultiplier& m, const GridSpec& g) {
    check_field(f, g, "apply_multiplier");
    if (m.values.size() != f.size())
        throw ValidationError("apply_multiplier: multiplier size mismatch");
    Field out = transform_forward(f, g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= m.values[i];
    fft_all_axes(out.data(), out.size(), g.M, g.d, false);
    return out;
}

double l2_norm(const Field& f, const GridSpec& g) {
    double s = 0.0;
    for (const auto& v : f) s += std::norm(v);
    return std::sqrt(s * g.quad_weight());
}

cplx inner(const Field& f, const Field& gfld, const GridSpec& g) {
    if (f.size() != gfld.size()) throw ValidationError("inner: size mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * gfld[i];
    return s * g.quad_weight();
}

double sobolev_norm(const Field& f, double alpha, const GridSpec& g) {
    check_field(f, g, "sobolev_norm");
    Field fh = transform_forward(f, g);
    const auto k2 = ksq_table(g);
    double s = 0.0;
    for (std::size_t i = 0; i < fh.size(); ++i)
        s += std::pow(1.0 + k2[i], alpha) * std::norm(fh[i]);
    return std::sqrt(s * g.quad_weight());
}

Field random_smooth_field(const GridSpec& g, std::mt19937_64& rng, double decay) {
    const auto k2 = ksq_table(g);
    const double kmax = 2.0 * M_PI * (g.M / 2) / g.L;
    const double kcut = kmax * (2.0 / 3.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field fh(g.size());
    for (std::size_t i = 0; i < fh.size(); ++i) {
        const double kk = std::sqrt(k2[i]);
        if (kk > kcut) {
            fh[i] = 0.0;
            continue;
        }
        const double amp = std::pow(1.0 + k2[i], -0.5 * decay);
        fh[i] = amp * cplx(gauss(rng), gauss(rng));
    }
    Field f = transform_inverse(fh, g);
    normalize_mass(f, g);
    return f;
}

Field gaussian_bump(const GridSpec& g, double sigma, double x0, double y0) {
    Field f(g.size());
    if (g.d == 1) {
        for (int j = 0; j < g.M; ++j) {
            const double x = g.node(j) - x0;
            f[j] = std::exp(-x * x / (2.0 * sigma * sigma));
        }
    } else {
        std::size_t idx = 0;
        for (int j0 = 0; j0 < g.M; ++j0)
            for (int j1 = 0; j1 < g.M; ++j1) {
                const double x = g.node(j0) - x0;
                const double y = g.node(j1) - y0;
                f[idx++] = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            }
    }
    return f;
}

void normalize_mass(Field& f, const GridSpec& g, double target_mass) {
    const double nrm = l2_norm(f, g);
    if (nrm == 0.0) throw NumericalError("normalize_mass: zero field");
    const double scale = std::sqrt(target_mass) / nrm;
    for (auto& v : f) v *= scale;
}

}  // namespace qgp
