#pragma once
/// Dense complex matrices and the eigen/SVD entry points. The heavy
/// factorizations are backed by Eigen behind this interface; the hot
/// accumulation loops use the dispatched kernels.

#include "lindex/kernels/kernels.hpp"

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lindex {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

struct Mat {
    std::size_t rows = 0, cols = 0;
    cvec a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cplx(0.0)) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    Mat adjoint() const {
        Mat m(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
        return r;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
        return r;
    }
    friend Mat operator*(const Mat& x, const Mat& y) {
        if (x.cols != y.rows) throw std::invalid_argument("Mat: shape mismatch");
        Mat r(x.rows, y.cols);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t k = 0; k < x.cols; ++k) {
                const cplx v = x(i, k);
                if (v == cplx(0.0)) continue;
                kernels::active().axpy(&r.a[i * r.cols], v, &y.a[k * y.cols], y.cols);
            }
        return r;
    }
    Mat scaled(cplx c) const {
        Mat r = *this;
        for (auto& v : r.a) v *= c;
        return r;
    }

    cvec apply(const cvec& x) const {
        if (x.size() != cols) throw std::invalid_argument("Mat::apply: size mismatch");
        cvec y(rows, cplx(0.0));
        for (std::size_t i = 0; i < rows; ++i) {
            cplx s = 0.0;
            const cplx* row = &a[i * cols];
            for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
            y[i] = s;
        }
        return y;
    }

    double norm_fro() const {
        double s = 0;
        for (const auto& v : a) s += std::norm(v);
        return std::sqrt(s);
    }
    double norm_max() const {
        double s = 0;
        for (const auto& v : a) s = std::max(s, std::abs(v));
        return s;
    }
};

struct EigResult {
    std::vector<double> eigenvalues; // ascending
    Mat vectors;                     // columns are eigenvectors
};

/// Full eigendecomposition of a Hermitian matrix; throws if the input is not
/// Hermitian within `hermiticity_tol` (relative Frobenius).
EigResult hermitian_eigensolve(const Mat& h, double hermiticity_tol = 1e-10);

/// Largest singular value.
double operator_norm(const Mat& a);

/// Right singular vector of the smallest singular value (homogeneous LSQ).
cvec smallest_singular_vector(const Mat& a);

/// Least-squares solve min ||A x - b||_2 (complex, possibly rectangular);
/// also reports the condition number of A.
cvec least_squares(const Mat& a, const cvec& b, double* condition = nullptr);

/// Roots of a complex polynomial sum_k c_k z^k (c.back() != 0), Durand-Kerner.
cvec polynomial_roots(const cvec& coeffs);

} // namespace lindex
