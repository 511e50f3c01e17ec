#pragma once

// Dense multi-index oracle for the separable-kernel algebra: every operation
// is implemented directly on the full 2k-slot tensor, independently of the
// Gram/low-rank code paths it is used to check. Test-only; sizes are tiny.

#include <vector>

#include "qgp/kernels.hpp"

namespace qgp::oracle {

struct DenseKernel {
    GridSpec grid;
    int order = 0;
    std::vector<cplx> a;  // (S^order) x (S^order), S = grid.size(), row-major

    std::size_t side() const;
};

DenseKernel materialize(const SeparableKernel& k, std::size_t max_entries = 1u << 24);

DenseKernel dense_factorized(const Field& phi, const GridSpec& g, int k);
DenseKernel dense_free_propagate(const DenseKernel& k, double t);
DenseKernel dense_contract_plus(const DenseKernel& k, int j);
DenseKernel dense_contract_minus(const DenseKernel& k, int j);
DenseKernel dense_contract(const DenseKernel& k, int j);
DenseKernel dense_contract_plus_at(const DenseKernel& k, int j, int a, int b);
cplx dense_inner(const DenseKernel& x, const DenseKernel& y, double alpha);
double dense_norm(const DenseKernel& k, double alpha);
cplx dense_trace(const DenseKernel& k);

// max |x - y| entrywise
double dense_max_diff(const DenseKernel& x, const DenseKernel& y);

}  // namespace qgp::oracle
