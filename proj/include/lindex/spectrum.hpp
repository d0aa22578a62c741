#pragma once
/// Spectral data of an assembled odd-graded operator: merged eigenvalues over
/// the diagonal blocks, per-eigenvector chirality expectations, and the
/// graded kernel split used by the index pipelines.

#include "lindex/linalg.hpp"

#include <utility>
#include <vector>

namespace lindex {

struct SpectralData {
    std::vector<double> eigenvalues;            // ascending over all blocks
    std::vector<double> chirality;              // Re<v, Gamma v> per eigenpair
    std::vector<std::pair<int, int>> origin;    // (block index, column) per eigenpair
    std::vector<Mat> block_vectors;             // eigenvector columns per block
    double kernel_threshold = 0.0;
    int dim_ker_plus = 0;
    int dim_ker_minus = 0;
    double max_residual = 0.0;                  // max ||D v - lambda v||
    bool gap_ambiguous = false;                 // below/above threshold ratio < 10
    double gap_ratio = 0.0;

    std::size_t size() const { return eigenvalues.size(); }

    /// sum_i chi_i e^{-t lambda_i^2}
    double heat_supertrace(double t) const;
    /// sum_i e^{-t lambda_i^2}
    double heat_trace(double t) const;
    /// sum_i chi_i lambda_i^2 e^{-t lambda_i^2} (eta integrand, up to 1/2 [D, .]_s bookkeeping)
    double heat_supertrace_d2(double t) const;

    double min_abs_eigenvalue() const;
    /// smallest |lambda| above the kernel threshold
    double spectral_gap() const;
};

/// Kernel split with the default threshold rule: the largest multiplicative
/// gap in sorted |lambda| (values below 1e-13 * scale clamped), threshold at
/// its geometric mean. An explicit threshold overrides the rule.
void classify_kernel(SpectralData& s, double threshold = -1.0);

} // namespace lindex
