#pragma once
/// Graded-commutative polynomials in n exterior generators dx^1..dx^n with
/// scalar or square-matrix coefficients. All series arithmetic terminates at
/// degree n, so the characteristic-class computations downstream are exact up
/// to scalar rounding. Coefficient modes (scalar vs matrix) are separated by
/// the template parameter; mixing them is a type error rather than a runtime
/// one.

#include "lindex/clifford.hpp"
#include "lindex/rational.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace lindex {

using cplx = std::complex<double>;
using CMat = SmallMat<cplx>;

inline bool scalar_is_zero(const CMat& m) {
    for (const auto& v : m.a)
        if (v != cplx(0.0)) return false;
    return true;
}

namespace detail {

inline cplx coef_scale(const cplx& c, const cplx& v) { return c * v; }
inline GaussianRational coef_scale(const GaussianRational& c, const GaussianRational& v) {
    return c * v;
}
inline CMat coef_scale(const cplx& c, const CMat& v) { return v.scaled(c); }

inline cplx coef_neg(const cplx& v) { return -v; }
inline GaussianRational coef_neg(const GaussianRational& v) { return -v; }
inline CMat coef_neg(const CMat& v) { return v.scaled(cplx(-1.0)); }

/// Sign of merging the increasing monomials S and T (0 if they intersect).
inline int wedge_sign(std::uint32_t s, std::uint32_t t) {
    if (s & t) return 0;
    int swaps = 0;
    std::uint32_t tt = t;
    while (tt) {
        const int bit = std::countr_zero(tt);
        swaps += std::popcount(s >> (bit + 1));
        tt &= tt - 1;
    }
    return (swaps & 1) ? -1 : 1;
}

} // namespace detail

template <class Coef>
class FormPolynomial {
public:
    using Mask = std::uint32_t;

    FormPolynomial() = default;
    explicit FormPolynomial(int n) : n_(n) {
        if (n < 1 || n > 30) throw std::invalid_argument("form dimension out of range");
    }

    static FormPolynomial constant(int n, Coef c) {
        FormPolynomial f(n);
        f.accumulate(0, c);
        return f;
    }
    /// dx^S for a bitmask S.
    static FormPolynomial monomial(int n, Mask s, Coef c) {
        FormPolynomial f(n);
        if (s >> n) throw std::out_of_range("form monomial exceeds generator count");
        f.accumulate(s, c);
        return f;
    }

    int dimension() const { return n_; }
    const std::map<Mask, Coef>& coefficients() const { return coef_; }
    bool is_zero() const { return coef_.empty(); }

    Coef coefficient(Mask s, const Coef& zero = Coef()) const {
        auto it = coef_.find(s);
        return it == coef_.end() ? zero : it->second;
    }

    int degree() const {
        int d = 0;
        for (const auto& [s, c] : coef_) d = std::max(d, std::popcount(s));
        return d;
    }

    /// All monomials have the same form degree (or the value is 0).
    bool is_homogeneous(int deg) const {
        for (const auto& [s, c] : coef_)
            if (std::popcount(s) != deg) return false;
        return true;
    }

    bool has_even_degrees_only() const {
        for (const auto& [s, c] : coef_)
            if (std::popcount(s) & 1) return false;
        return true;
    }

    void accumulate(Mask s, const Coef& c) {
        auto it = coef_.find(s);
        if (it == coef_.end()) {
            if (!scalar_is_zero(c)) coef_[s] = c;
        } else {
            it->second = it->second + c;
            if (scalar_is_zero(it->second)) coef_.erase(it);
        }
    }

    FormPolynomial component(int deg) const {
        FormPolynomial f(n_);
        for (const auto& [s, c] : coef_)
            if (std::popcount(s) == deg) f.coef_[s] = c;
        return f;
    }

    friend FormPolynomial operator+(const FormPolynomial& a, const FormPolynomial& b) {
        require_same(a, b);
        FormPolynomial r = a;
        for (const auto& [s, c] : b.coef_) r.accumulate(s, c);
        return r;
    }
    friend FormPolynomial operator-(const FormPolynomial& a, const FormPolynomial& b) {
        require_same(a, b);
        FormPolynomial r = a;
        for (const auto& [s, c] : b.coef_) r.accumulate(s, detail::coef_neg(c));
        return r;
    }

    template <class Scal>
    FormPolynomial scaled(const Scal& v) const {
        FormPolynomial r(n_);
        for (const auto& [s, c] : coef_) r.accumulate(s, detail::coef_scale(v, c));
        return r;
    }

    static void require_same(const FormPolynomial& a, const FormPolynomial& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("form dimension mismatch");
    }

private:
    int n_ = 0;
    std::map<Mask, Coef> coef_;
};

/// Graded-commutative product; coefficients multiply in the given order
/// (matters for matrix coefficients).
template <class Coef>
FormPolynomial<Coef> wedge(const FormPolynomial<Coef>& a, const FormPolynomial<Coef>& b) {
    FormPolynomial<Coef>::require_same(a, b);
    FormPolynomial<Coef> r(a.dimension());
    for (const auto& [sa, ca] : a.coefficients())
        for (const auto& [sb, cb] : b.coefficients()) {
            const int sign = detail::wedge_sign(sa, sb);
            if (sign == 0) continue;
            Coef prod = ca * cb;
            if (sign < 0) prod = detail::coef_neg(prod);
            r.accumulate(sa | sb, prod);
        }
    return r;
}

/// Antisymmetric n x n matrix of 2-forms (the curvature in a frame).
struct CurvatureMatrix {
    int n = 0;                                 // generator count and matrix size
    std::vector<FormPolynomial<cplx>> entries; // row-major n x n

    static CurvatureMatrix zero(int n) {
        CurvatureMatrix r;
        r.n = n;
        r.entries.assign(std::size_t(n) * n, FormPolynomial<cplx>(n));
        return r;
    }

    const FormPolynomial<cplx>& operator()(int i, int j) const {
        return entries[std::size_t(i) * n + j];
    }
    FormPolynomial<cplx>& operator()(int i, int j) { return entries[std::size_t(i) * n + j]; }

    void set(int i, int j, const FormPolynomial<cplx>& w) {
        (*this)(i, j) = w;
        (*this)(j, i) = w.scaled(cplx(-1.0));
    }

    /// Entries antisymmetric and homogeneous of degree 2 (within eps).
    bool is_valid(double eps = 0.0) const;
};

/// Quantization map: dx^S -> e_S (basis monomial), extended linearly.
/// For a 2-form this is c(F) = sum_{i<j} F(e_i,e_j) c(e^i) c(e^j).
template <class K>
CliffordElement<K> quantize(const FormPolynomial<K>& omega, int clifford_dim) {
    if (omega.degree() > clifford_dim)
        throw std::invalid_argument("quantize: generator count exceeds Clifford dimension");
    CliffordElement<K> a(clifford_dim);
    for (const auto& [s, c] : omega.coefficients()) a.accumulate(s, c);
    return a;
}

template <class K>
CliffordElement<K> quantize(const FormPolynomial<K>& omega) {
    return quantize(omega, omega.dimension());
}

} // namespace lindex
