// AVX2+FMA kernel variants. Compiled with per-function target attributes so
// the TU builds on any x86-64 baseline; dispatch.cpp only installs this table
// after a CPUID check.

#include "lindex/kernels/kernels.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace lindex::kernels {

namespace avx2 {

#define LX_AVX2 __attribute__((target("avx2,fma")))

// exp stays in libm; vectorizing it would change results against the
// reference path. The squaring/weighting around it is memory-bound anyway.
static void exp_sq_weights(const double* lam, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-t * lam[i] * lam[i]);
}

static void exp_weights(const double* lam, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-t * lam[i]);
}

// (ar + i*ai) * conj(v) for two packed complexes.
LX_AVX2 static inline __m256d conj_mul_acc(__m256d a_re, __m256d a_im, __m256d v, __m256d acc) {
    const __m256d v_swap = _mm256_permute_pd(v, 0x5);
    const __m256d t = _mm256_mul_pd(a_re, v);
    // even lanes: ai*vi + ar*vr, odd lanes: ai*vr - ar*vi
    return _mm256_add_pd(acc, _mm256_fmsubadd_pd(a_im, v_swap, t));
}

LX_AVX2 static void herk1_acc(cplx* acc, const cplx* v, double w, std::size_t n) {
    const double* vd = reinterpret_cast<const double*>(v);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx wvi = w * v[i];
        const __m256d a_re = _mm256_set1_pd(wvi.real());
        const __m256d a_im = _mm256_set1_pd(wvi.imag());
        double* row = reinterpret_cast<double*>(acc + i * n);
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            const __m256d vv = _mm256_loadu_pd(vd + 2 * j);
            const __m256d r = conj_mul_acc(a_re, a_im, vv, _mm256_loadu_pd(row + 2 * j));
            _mm256_storeu_pd(row + 2 * j, r);
        }
        for (; j < n; ++j) acc[i * n + j] += wvi * std::conj(v[j]);
    }
}

LX_AVX2 static void diag_acc(double* diag, const cplx* v, double w, std::size_t n) {
    const double* vd = reinterpret_cast<const double*>(v);
    const __m256d ww = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vv = _mm256_loadu_pd(vd + 2 * i);
        const __m256d sq = _mm256_mul_pd(vv, vv);
        // |v0|^2 = sq0+sq1, |v1|^2 = sq2+sq3
        const __m128d lo = _mm256_castpd256_pd128(sq);
        const __m128d hi = _mm256_extractf128_pd(sq, 1);
        const __m128d sums = _mm_hadd_pd(lo, hi);
        const __m128d upd = _mm_fmadd_pd(_mm256_castpd256_pd128(ww), sums, _mm_loadu_pd(diag + i));
        _mm_storeu_pd(diag + i, upd);
    }
    for (; i < n; ++i) diag[i] += w * std::norm(v[i]);
}

LX_AVX2 static cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    __m256d acc_direct = _mm256_setzero_pd(); // pairs (ar*br, ai*bi)
    __m256d acc_cross = _mm256_setzero_pd();  // pairs (ai*br, ar*bi)
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d av = _mm256_loadu_pd(ad + 2 * i);
        const __m256d bv = _mm256_loadu_pd(bd + 2 * i);
        acc_direct = _mm256_fmadd_pd(av, bv, acc_direct);
        acc_cross = _mm256_fmadd_pd(_mm256_permute_pd(av, 0x5), bv, acc_cross);
    }
    alignas(32) double d[4], c[4];
    _mm256_store_pd(d, acc_direct);
    _mm256_store_pd(c, acc_cross);
    double re = d[0] + d[1] + d[2] + d[3];
    double im = (c[1] - c[0]) + (c[3] - c[2]);
    for (; i < n; ++i) {
        const cplx t = std::conj(a[i]) * b[i];
        re += t.real();
        im += t.imag();
    }
    return {re, im};
}

LX_AVX2 static void axpy(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const __m256d a_re = _mm256_set1_pd(alpha.real());
    const __m256d a_im = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d x_swap = _mm256_permute_pd(xv, 0x5);
        // even: ar*xr - ai*xi, odd: ar*xi + ai*xr
        const __m256d prod = _mm256_fmaddsub_pd(a_re, xv, _mm256_mul_pd(a_im, x_swap));
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

LX_AVX2 static double wsum(const double* w, const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i), acc);
    alignas(32) double d[4];
    _mm256_store_pd(d, acc);
    double s = d[0] + d[1] + d[2] + d[3];
    for (; i < n; ++i) s += w[i] * x[i];
    return s;
}

#undef LX_AVX2

} // namespace avx2

const KernelTable& avx2_table() {
    static const KernelTable table{
        avx2::exp_sq_weights, avx2::exp_weights, avx2::herk1_acc,
        avx2::diag_acc,       avx2::dotc,        avx2::axpy,
        avx2::wsum,           "avx2",
    };
    return table;
}

} // namespace lindex::kernels

#else

namespace lindex::kernels {
const KernelTable& avx2_table() { return scalar_table(); }
} // namespace lindex::kernels

#endif
