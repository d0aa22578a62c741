#include "lindex/charclass.hpp"

#include "lindex/renorm.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace lindex {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::int64_t factorial(int k) {
    std::int64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

using FMat = std::vector<FormPolynomial<cplx>>; // row-major square matrix of forms

FMat fmat_identity(int n) {
    FMat m(static_cast<std::size_t>(n) * n, FormPolynomial<cplx>(n));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = FormPolynomial<cplx>::constant(n, 1.0);
    return m;
}

FMat fmat_mul(const FMat& a, const FMat& b, int n) {
    FMat c(static_cast<std::size_t>(n) * n, FormPolynomial<cplx>(n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const auto& aik = a[static_cast<std::size_t>(i) * n + k];
            if (aik.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                const auto& bkj = b[static_cast<std::size_t>(k) * n + j];
                if (bkj.is_zero()) continue;
                c[static_cast<std::size_t>(i) * n + j] = c[static_cast<std::size_t>(i) * n + j] + wedge(aik, bkj);
            }
        }
    return c;
}

bool fmat_is_zero(const FMat& a) {
    for (const auto& e : a)
        if (!e.is_zero()) return false;
    return true;
}

FormPolynomial<cplx> fmat_trace(const FMat& a, int n) {
    FormPolynomial<cplx> t(n);
    for (int i = 0; i < n; ++i) t = t + a[static_cast<std::size_t>(i) * n + i];
    return t;
}

} // namespace

std::vector<Rational> x_over_sinh_series(int terms) {
    // invert sinh(x)/x = sum x^{2k} / (2k+1)!
    std::vector<Rational> s(terms), b(terms);
    for (int k = 0; k < terms; ++k) s[static_cast<std::size_t>(k)] = Rational(1, factorial(2 * k + 1));
    b[0] = Rational(1);
    for (int k = 1; k < terms; ++k) {
        Rational acc(0);
        for (int j = 1; j <= k; ++j) acc += s[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k - j)];
        b[static_cast<std::size_t>(k)] = -acc;
    }
    return b;
}

std::vector<Rational> a_hat_scalar_series(int terms) {
    auto b = x_over_sinh_series(terms);
    Rational pow4(1);
    for (int k = 0; k < terms; ++k) {
        b[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)] / pow4;
        pow4 *= Rational(4);
    }
    return b;
}

FormPolynomial<cplx> a_hat(const CurvatureMatrix& R) {
    if (!R.is_valid(0.0)) throw std::invalid_argument("a_hat: curvature matrix not antisymmetric");
    const int n = R.n;
    const auto coeffs = a_hat_scalar_series(n / 4 + 2);

    FMat Rm(static_cast<std::size_t>(n) * n, FormPolynomial<cplx>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Rm[static_cast<std::size_t>(i) * n + j] = R(i, j);

    // M = sum_k c_k (-R^2)^k; the sign places the series on the Chern roots
    // of the antisymmetric blocks [[0, x], [-x, 0]], so block-diagonal input
    // reproduces prod_j (x_j/2)/sinh(x_j/2)
    const FMat R2 = fmat_mul(Rm, Rm, n);
    FMat M = fmat_identity(n);
    FMat power = fmat_identity(n);
    for (int k = 1; 4 * k <= n; ++k) {
        power = fmat_mul(power, R2, n);
        if (fmat_is_zero(power)) break;
        const double ck = coeffs[static_cast<std::size_t>(k)].to_double() * ((k % 2) ? -1.0 : 1.0);
        for (int e = 0; e < n * n; ++e)
            M[static_cast<std::size_t>(e)] = M[static_cast<std::size_t>(e)] + power[static_cast<std::size_t>(e)].scaled(cplx(ck));
    }

    // N = M - I is nilpotent of degree >= 4; log via the alternating series
    FMat N = M;
    for (int i = 0; i < n; ++i)
        N[static_cast<std::size_t>(i) * n + i] =
            N[static_cast<std::size_t>(i) * n + i] - FormPolynomial<cplx>::constant(n, 1.0);
    FormPolynomial<cplx> tr_log(n);
    FMat Np = fmat_identity(n);
    for (int j = 1; 4 * j <= n; ++j) {
        Np = fmat_mul(Np, N, n);
        if (fmat_is_zero(Np)) break;
        const double cj = ((j % 2) ? 1.0 : -1.0) / j;
        tr_log = tr_log + fmat_trace(Np, n).scaled(cplx(cj));
    }

    // det^{1/2} = exp(tr log / 2)
    const FormPolynomial<cplx> half = tr_log.scaled(cplx(0.5));
    FormPolynomial<cplx> result = FormPolynomial<cplx>::constant(n, 1.0);
    FormPolynomial<cplx> term = FormPolynomial<cplx>::constant(n, 1.0);
    for (int m = 1; 4 * m <= n; ++m) {
        term = wedge(term, half).scaled(cplx(1.0 / m));
        if (term.is_zero()) break;
        result = result + term;
    }
    return result;
}

FormPolynomial<cplx> chern_character(const FormPolynomial<CMat>& F, int rank) {
    const int n = F.dimension();
    for (const auto& [s, c] : F.coefficients()) {
        const int deg = std::popcount(s);
        if (deg % 2 != 0 || deg == 0)
            throw std::invalid_argument("chern_character: curvature must have even degree >= 2");
        if (rank < 0) rank = c.dim;
        if (c.dim != rank) throw std::invalid_argument("chern_character: coefficient size mismatch");
    }
    if (rank < 0) rank = 1;
    FormPolynomial<cplx> ch = FormPolynomial<cplx>::constant(n, double(rank));
    FormPolynomial<CMat> power = F;
    double kfact = 1.0;
    for (int k = 1; 2 * k <= n; ++k) {
        kfact *= k;
        if (power.is_zero()) break;
        FormPolynomial<cplx> tr(n);
        for (const auto& [s, c] : power.coefficients()) tr.accumulate(s, c.trace());
        ch = ch + tr.scaled(cplx(1.0 / kfact));
        power = wedge(power, F);
    }
    return ch;
}

FormPolynomial<cplx> chern_character(const FormPolynomial<cplx>& F) {
    const int n = F.dimension();
    for (const auto& [s, c] : F.coefficients()) {
        const int deg = std::popcount(s);
        if (deg % 2 != 0 || deg == 0)
            throw std::invalid_argument("chern_character: curvature must have even degree >= 2");
    }
    FormPolynomial<cplx> ch = FormPolynomial<cplx>::constant(n, 1.0);
    FormPolynomial<cplx> term = FormPolynomial<cplx>::constant(n, 1.0);
    for (int k = 1; 2 * k <= n; ++k) {
        term = wedge(term, F).scaled(cplx(1.0 / k));
        if (term.is_zero()) break;
        ch = ch + term;
    }
    return ch;
}

FormPolynomial<cplx> normalize_characteristic(const FormPolynomial<cplx>& omega) {
    const int n = omega.dimension();
    FormPolynomial<cplx> r(n);
    const cplx i_over_2pi(0.0, 1.0 / (2.0 * kPi));
    for (const auto& [s, c] : omega.coefficients()) {
        const int deg = std::popcount(s);
        cplx factor(1.0);
        for (int k = 0; k < deg / 2; ++k) factor *= i_over_2pi;
        r.accumulate(s, factor * c);
    }
    return r;
}

cplx top_degree_integral(const FormPolynomial<cplx>& omega, const ModelGeometry& geom) {
    if (omega.dimension() != geom.dimension())
        throw std::invalid_argument("top_degree_integral: geometry dimension mismatch");
    const int n = geom.dimension();
    const std::uint32_t top = (std::uint32_t(1) << n) - 1;
    const cplx c = omega.coefficient(top);
    if (c == cplx(0.0)) return 0.0;
    if (geom.has_boundary()) {
        auto lau = regularized_integral([c](const Point&) { return c; }, geom);
        return double(geom.orientation()) * lau.finite_part;
    }
    return double(geom.orientation()) * c * geom.volume();
}

cplx top_degree_integral_field(const std::vector<cplx>& top_coefficient_samples,
                               const ModelGeometry& geom) {
    if (top_coefficient_samples.size() != geom.num_samples())
        throw std::invalid_argument("top_degree_integral_field: sample count mismatch");
    if (geom.has_boundary())
        throw std::invalid_argument("field integration is implemented for closed models");
    cplx s = 0.0;
    for (std::size_t i = 0; i < top_coefficient_samples.size(); ++i)
        s += geom.weight(i) * top_coefficient_samples[i];
    return double(geom.orientation()) * s;
}

} // namespace lindex
