#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace qgp {

using cplx = std::complex<double>;
using Field = std::vector<cplx>;

// Periodic uniform grid on a torus of side L in d in {1,2}, M points per axis.
//
// Conventions used throughout:
//   * nodes x_j = -L/2 + j*h, h = L/M, quadrature weight h^d per node;
//   * frequency ordering per axis is j in {0,...,M/2-1, -M/2,...,-1}
//     (storage order), with physical frequency k_j = 2*pi*j/L;
//   * transforms are unitary, 1/sqrt(M) per axis in both directions, so the
//     discrete Plancherel identity is exact up to roundoff.
struct GridSpec {
    int d = 1;
    int M = 8;
    double L = 2.0 * 3.14159265358979323846;

    double h() const { return L / M; }
    std::size_t size() const;          // M^d
    double quad_weight() const;        // h^d
    double node(int j) const;          // -L/2 + j*h
    double freq(int j) const;          // storage index -> physical k
    void validate() const;             // throws ValidationError
};

// Storage index along one axis -> signed frequency index in [-M/2, M/2).
int freq_index(int j, int M);

// Per-axis frequency table in storage order.
std::vector<double> freq_table(const GridSpec& g);

struct SpectralMultiplier {
    enum class Kind { Laplacian, Sobolev, FreeFlow };
    Kind kind;
    std::vector<cplx> values;  // on the frequency grid, storage order

    static SpectralMultiplier laplacian(const GridSpec& g);
    static SpectralMultiplier sobolev(const GridSpec& g, double alpha);
    static SpectralMultiplier free_flow(const GridSpec& g, double t);
};

// Unitary DFT over all d axes of a single-particle field.
Field transform_forward(const Field& f, const GridSpec& g);
Field transform_inverse(const Field& f, const GridSpec& g);

// Low-level sweep: unitary 1D FFT along every one of `axis_count` axes of
// length M of a row-major tensor with `total` = M^axis_count entries.
// Used by the many-body evolution where axis_count = d*N.
void fft_all_axes(cplx* data, std::size_t total, int M, int axis_count, bool forward);
void fft_one_axis(cplx* data, std::size_t total, int M, int axis_count, int axis, bool forward);

Field apply_multiplier(const Field& f, const SpectralMultiplier& m, const GridSpec& g);

double l2_norm(const Field& f, const GridSpec& g);
cplx inner(const Field& f, const Field& gfld, const GridSpec& g);  // h^d-weighted, conj on f
double sobolev_norm(const Field& f, double alpha, const GridSpec& g);

// Band-limited random smooth field: Fourier coefficients ~ N(0,1)*<k>^-decay,
// top third of frequencies zeroed, normalized to unit L2 norm.
Field random_smooth_field(const GridSpec& g, std::mt19937_64& rng, double decay = 2.0);

// Gaussian bump exp(-|x - x0|^2 / (2 sigma^2)) sampled on the grid (not normalized).
Field gaussian_bump(const GridSpec& g, double sigma, double x0 = 0.0, double y0 = 0.0);

void normalize_mass(Field& f, const GridSpec& g, double target_mass = 1.0);

}  // namespace qgp
