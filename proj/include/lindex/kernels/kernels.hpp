#pragma once
/// \file kernels.hpp
/// Low-level data-parallel kernels used by the spectral pipelines.
///
/// Every kernel has a scalar reference implementation and (on x86-64) an
/// AVX2+FMA variant; the active set is chosen once at startup from CPUID.
/// lindex::kernels::force_scalar() pins the scalar set, which the
/// equivalence tests use to compare both paths on identical data.

#include <complex>
#include <cstddef>
#include <functional>

namespace lindex::kernels {

using cplx = std::complex<double>;

struct KernelTable {
    // out[i] = exp(-t * lam[i]^2)
    void (*exp_sq_weights)(const double* lam, double t, double* out, std::size_t n);
    // out[i] = exp(-t * lam[i])
    void (*exp_weights)(const double* lam, double t, double* out, std::size_t n);
    // acc += w * v * conj(v)  (rank-1 Hermitian update, row-major n x n)
    void (*herk1_acc)(cplx* acc, const cplx* v, double w, std::size_t n);
    // diag[i] += w * |v[i]|^2
    void (*diag_acc)(double* diag, const cplx* v, double w, std::size_t n);
    // sum_i conj(a[i]) * b[i]
    cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
    // sum_i w[i] * x[i]   (real weights, real values)
    double (*wsum)(const double* w, const double* x, std::size_t n);
    const char* name;
};

const KernelTable& active();
const KernelTable& scalar_table();
bool avx2_available();

/// Pin the scalar reference set (for tests); returns the previous table.
const KernelTable& force_scalar(bool on);

/// Opt-in threading for the embarrassingly parallel sample loops. Defaults to
/// 1 (or LINDEX_THREADS); chunks are contiguous and outputs disjoint, so
/// results are bit-identical for any thread count.
int thread_count();
void set_thread_count(int n);
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& chunk);

} // namespace lindex::kernels
