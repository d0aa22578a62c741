#include "lindex/kernels/kernels.hpp"

#include <cmath>

namespace lindex::kernels {

namespace scalar {

static void exp_sq_weights(const double* lam, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-t * lam[i] * lam[i]);
}

static void exp_weights(const double* lam, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-t * lam[i]);
}

static void herk1_acc(cplx* acc, const cplx* v, double w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx wvi = w * v[i];
        cplx* row = acc + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += wvi * std::conj(v[j]);
    }
}

static void diag_acc(double* diag, const cplx* v, double w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) diag[i] += w * std::norm(v[i]);
}

static cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

static void axpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

static double wsum(const double* w, const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i];
    return s;
}

} // namespace scalar

const KernelTable& scalar_table() {
    static const KernelTable table{
        scalar::exp_sq_weights, scalar::exp_weights, scalar::herk1_acc,
        scalar::diag_acc,       scalar::dotc,        scalar::axpy,
        scalar::wsum,           "scalar",
    };
    return table;
}

} // namespace lindex::kernels
