#pragma once

#include <vector>

#include "qgp/grid.hpp"

namespace qgp {

// Single-particle wave function on a periodic grid.
struct WaveFunction {
    GridSpec grid;
    Field values;
    double t = 0.0;
};

// Defocusing cubic-quintic parameters. The pure quintic model uses b0 with
// lambda2 = lambda3 = 0; the mixed model uses (lambda2, lambda3) with b0 = 0.
// The effective quintic coupling is b0 + lambda3 throughout.
struct NlsParams {
    double b0 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double dt = 1e-3;

    double quintic() const { return b0 + lambda3; }
    void validate() const;
};

double mass(const WaveFunction& phi);

// Conserved functional of the flow: int |grad phi|^2 + (lambda2/2) int |phi|^4
// + (quintic/3) int |phi|^6. The 1/2 and 1/3 weights are fixed by d/dt E = 0
// along i d_t phi = -Lap phi + (lambda2 |phi|^2 + quintic |phi|^4) phi:
// the kinetic and potential production terms cancel exactly with these weights.
double energy(const WaveFunction& phi, const NlsParams& p);

// One Strang step: half free flow, exact pointwise nonlinear phase, half free
// flow. Both substeps are unit-modulus in their diagonalizing bases, so mass
// is conserved to roundoff. Throws NumericalError on the first nonfinite node.
void step_strang_inplace(WaveFunction& phi, const NlsParams& p);
WaveFunction step_strang(const WaveFunction& phi, const NlsParams& p);

// Advance to T = steps*dt, recording every `record_every` steps (snapshot at
// t=0 included, last snapshot at t=T). Requires record_every | steps.
std::vector<WaveFunction> evolve(const WaveFunction& phi0, const NlsParams& p, double T,
                                 int record_every);

}  // namespace qgp
