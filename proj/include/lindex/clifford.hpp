#pragma once
/// Complexified Clifford algebra Cl(n) with the degree filtration, the graded
/// supertrace and the spin representation.
///
/// Basis monomials e_S (S a strictly increasing index subset, stored as a
/// bitmask) in normal form; products are rewritten against the relation
/// e_i e_j + e_j e_i = -2 g(e_i, e_j). The scalar type K is either
/// GaussianRational (exact, used by the algebraic tests) or
/// std::complex<double> (used when mixed with numeric geometry data).
///
/// Grading convention: the chirality element is i^{n/2} e_1 ... e_n, the
/// unique choice for which str(e_1 e_2) = -2i at n = 2.

#include "lindex/rational.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace lindex {

template <class K> K scalar_i();
template <> inline GaussianRational scalar_i<GaussianRational>() { return GaussianRational::i(); }
template <> inline std::complex<double> scalar_i<std::complex<double>>() { return {0.0, 1.0}; }

template <class K> K scalar_from_real(double);
template <> inline std::complex<double> scalar_from_real<std::complex<double>>(double x) {
    return {x, 0.0};
}

/// Symmetric positive-definite bilinear form on the n generators.
template <class R>
struct MetricForm {
    int n = 0;
    std::vector<R> entries; // row-major n x n

    static MetricForm identity(int n) {
        MetricForm g;
        g.n = n;
        g.entries.assign(std::size_t(n) * n, R(0));
        for (int i = 0; i < n; ++i) g.entries[std::size_t(i) * n + i] = R(1);
        return g;
    }

    const R& operator()(int i, int j) const { return entries[std::size_t(i) * n + j]; }
    R& operator()(int i, int j) { return entries[std::size_t(i) * n + j]; }

    bool is_identity() const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!((*this)(i, j) == R(i == j ? 1 : 0))) return false;
        return true;
    }
};

template <class K>
class CliffordElement {
public:
    using Mask = std::uint32_t;

    CliffordElement() = default;
    explicit CliffordElement(int n) : n_(check_dim(n)) {}

    static CliffordElement unit(int n) {
        CliffordElement a(n);
        a.coef_[0] = K(1);
        return a;
    }
    static CliffordElement generator(int n, int i) {
        CliffordElement a(n);
        if (i < 1 || i > n) throw std::out_of_range("generator index");
        a.coef_[Mask(1) << (i - 1)] = K(1);
        return a;
    }
    /// Basis monomial e_S for a bitmask S (bit k set <=> generator k+1 present).
    static CliffordElement monomial(int n, Mask s, K c = K(1)) {
        CliffordElement a(n);
        if (s >> n) throw std::out_of_range("monomial mask exceeds dimension");
        if (!scalar_is_zero(c)) a.coef_[s] = c;
        return a;
    }

    int dimension() const { return n_; }
    const std::map<Mask, K>& coefficients() const { return coef_; }

    K coefficient(Mask s) const {
        auto it = coef_.find(s);
        return it == coef_.end() ? K(0) : it->second;
    }

    void set_coefficient(Mask s, K c) {
        if (s >> n_) throw std::out_of_range("monomial mask exceeds dimension");
        if (scalar_is_zero(c))
            coef_.erase(s);
        else
            coef_[s] = c;
    }

    void accumulate(Mask s, const K& c) {
        auto it = coef_.find(s);
        if (it == coef_.end()) {
            if (!scalar_is_zero(c)) coef_[s] = c;
        } else {
            it->second += c;
            if (scalar_is_zero(it->second)) coef_.erase(it);
        }
    }

    bool is_zero() const { return coef_.empty(); }

    /// Smallest k with a in Cl_k (0 for the zero element).
    int filtration_degree() const {
        int d = 0;
        for (const auto& [s, c] : coef_) d = std::max(d, std::popcount(s));
        return d;
    }

    /// 0 even, 1 odd, -1 mixed parity.
    int parity() const {
        int p = -2;
        for (const auto& [s, c] : coef_) {
            const int q = std::popcount(s) & 1;
            if (p == -2)
                p = q;
            else if (p != q)
                return -1;
        }
        return p == -2 ? 0 : p;
    }

    friend CliffordElement operator+(const CliffordElement& a, const CliffordElement& b) {
        require_same(a, b);
        CliffordElement r = a;
        for (const auto& [s, c] : b.coef_) r.accumulate(s, c);
        return r;
    }
    friend CliffordElement operator-(const CliffordElement& a, const CliffordElement& b) {
        require_same(a, b);
        CliffordElement r = a;
        for (const auto& [s, c] : b.coef_) r.accumulate(s, -c);
        return r;
    }
    friend CliffordElement operator*(const K& c, const CliffordElement& a) {
        CliffordElement r(a.n_);
        for (const auto& [s, v] : a.coef_) {
            const K p = c * v;
            if (!scalar_is_zero(p)) r.coef_[s] = p;
        }
        return r;
    }

    friend bool operator==(const CliffordElement& a, const CliffordElement& b) {
        return a.n_ == b.n_ && a.coef_ == b.coef_;
    }

    static void require_same(const CliffordElement& a, const CliffordElement& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("Clifford dimension mismatch");
    }

private:
    static int check_dim(int n) {
        if (n < 1 || n > 30) throw std::invalid_argument("Clifford dimension out of range");
        return n;
    }

    int n_ = 0;
    std::map<Mask, K> coef_;
};

namespace detail {

/// Accumulate c * (e_S e_i) into out, rewriting to normal form against g.
template <class K, class R>
void append_generator(std::map<std::uint32_t, K>& out, std::uint32_t s, int i, K c,
                      const MetricForm<R>& g) {
    using Mask = std::uint32_t;
    const Mask bit_i = Mask(1) << (i - 1);
    if (s == 0 || std::bit_width(s) <= unsigned(i - 1)) {
        // highest generator in S is below i (or S empty): plain concatenation
        auto it = out.find(s | bit_i);
        if (it == out.end())
            out[s | bit_i] = c;
        else {
            it->second += c;
            if (scalar_is_zero(it->second)) out.erase(it);
        }
        return;
    }
    const int m = std::bit_width(s); // 1-based index of the top generator
    const Mask s2 = s & ~(Mask(1) << (m - 1));
    auto add = [&out](Mask mask, const K& v) {
        if (scalar_is_zero(v)) return;
        auto it = out.find(mask);
        if (it == out.end())
            out[mask] = v;
        else {
            it->second += v;
            if (scalar_is_zero(it->second)) out.erase(it);
        }
    };
    if (m == i) {
        // e_m e_i = -g(i,i)
        add(s2, c * (-K(g(i - 1, i - 1))));
        return;
    }
    // m > i: e_m e_i = -e_i e_m - 2 g(m,i)
    add(s2, c * (K(-2) * K(g(m - 1, i - 1))));
    std::map<Mask, K> tmp;
    append_generator(tmp, s2, i, -c, g);
    // every monomial in tmp has top index < m, so appending e_m is a plain or
    for (const auto& [mask, v] : tmp) add(mask | (Mask(1) << (m - 1)), v);
}

} // namespace detail

/// Bilinear associative product with e_i e_j + e_j e_i = -2 g(e_i, e_j).
template <class K, class R>
CliffordElement<K> clifford_mul(const CliffordElement<K>& a, const CliffordElement<K>& b,
                                const MetricForm<R>& g) {
    CliffordElement<K>::require_same(a, b);
    if (g.n != a.dimension()) throw std::invalid_argument("metric dimension mismatch");
    CliffordElement<K> r(a.dimension());
    std::map<std::uint32_t, K> acc;
    for (const auto& [sa, ca] : a.coefficients()) {
        for (const auto& [sb, cb] : b.coefficients()) {
            std::map<std::uint32_t, K> cur;
            cur[sa] = ca * cb;
            for (int i = 1; i <= a.dimension(); ++i) {
                if (!(sb & (std::uint32_t(1) << (i - 1)))) continue;
                std::map<std::uint32_t, K> next;
                for (const auto& [s, c] : cur) detail::append_generator(next, s, i, c, g);
                cur.swap(next);
            }
            for (const auto& [s, c] : cur) {
                auto it = acc.find(s);
                if (it == acc.end())
                    acc[s] = c;
                else {
                    it->second += c;
                    if (scalar_is_zero(it->second)) acc.erase(it);
                }
            }
        }
    }
    for (const auto& [s, c] : acc) r.set_coefficient(s, c);
    return r;
}

/// (-2i)^{n/2}, the supertrace of the top basis monomial.
template <class K>
K supertrace_top_value(int n) {
    K v(1);
    const K m2i = K(-2) * scalar_i<K>();
    for (int k = 0; k < n / 2; ++k) v = v * m2i;
    return v;
}

/// Graded supertrace. Requires even n and an explicit orthonormal-frame
/// assertion from the caller; vanishes on Cl_{n-1}, returns
/// (-2i)^{n/2} * coeff(e_1...e_n).
template <class K>
K supertrace(const CliffordElement<K>& a, bool orthonormal_frame = true) {
    const int n = a.dimension();
    if (n % 2 != 0) throw std::invalid_argument("supertrace requires even dimension");
    if (!orthonormal_frame)
        throw std::invalid_argument("supertrace is only defined in an orthonormal frame");
    const std::uint32_t top = (std::uint32_t(1) << n) - 1;
    return supertrace_top_value<K>(n) * a.coefficient(top);
}

/// Dense square matrix over K, row-major; just enough for representation tests.
template <class K>
struct SmallMat {
    int dim = 0;
    std::vector<K> a;

    static SmallMat zero(int d) {
        SmallMat m;
        m.dim = d;
        m.a.assign(std::size_t(d) * d, K(0));
        return m;
    }
    static SmallMat id(int d) {
        SmallMat m = zero(d);
        for (int i = 0; i < d; ++i) m.a[std::size_t(i) * d + i] = K(1);
        return m;
    }
    K& operator()(int i, int j) { return a[std::size_t(i) * dim + j]; }
    const K& operator()(int i, int j) const { return a[std::size_t(i) * dim + j]; }

    friend SmallMat operator*(const SmallMat& x, const SmallMat& y) {
        SmallMat r = zero(x.dim);
        for (int i = 0; i < x.dim; ++i)
            for (int k = 0; k < x.dim; ++k) {
                const K& v = x(i, k);
                if (scalar_is_zero(v)) continue;
                for (int j = 0; j < x.dim; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }
    friend SmallMat operator+(const SmallMat& x, const SmallMat& y) {
        SmallMat r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
        return r;
    }
    friend SmallMat operator-(const SmallMat& x, const SmallMat& y) {
        SmallMat r = x;
        for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
        return r;
    }
    SmallMat scaled(const K& c) const {
        SmallMat r = *this;
        for (auto& v : r.a) v = c * v;
        return r;
    }
    K trace() const {
        K t(0);
        for (int i = 0; i < dim; ++i) t += (*this)(i, i);
        return t;
    }
    friend bool operator==(const SmallMat& x, const SmallMat& y) {
        return x.dim == y.dim && x.a == y.a;
    }
};

namespace detail {

template <class K>
SmallMat<K> kron(const SmallMat<K>& x, const SmallMat<K>& y) {
    SmallMat<K> r = SmallMat<K>::zero(x.dim * y.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < x.dim; ++j) {
            if (scalar_is_zero(x(i, j))) continue;
            for (int k = 0; k < y.dim; ++k)
                for (int l = 0; l < y.dim; ++l)
                    r(i * y.dim + k, j * y.dim + l) = x(i, j) * y(k, l);
        }
    return r;
}

} // namespace detail

/// Anti-Hermitian gamma matrices for Cl(n), n even, with gamma_k^2 = -1:
/// gamma_{2j-1} = s3^(j-1) (x) (i s1) (x) 1..., gamma_{2j} mutatis mutandis.
template <class K>
std::vector<SmallMat<K>> gamma_matrices(int n) {
    if (n % 2 != 0) throw std::invalid_argument("spin representation requires even dimension");
    const K I = scalar_i<K>();
    SmallMat<K> is1 = SmallMat<K>::zero(2), is2 = SmallMat<K>::zero(2), s3 = SmallMat<K>::zero(2);
    is1(0, 1) = I;
    is1(1, 0) = I;
    is2(0, 1) = K(1);
    is2(1, 0) = K(-1);
    s3(0, 0) = K(1);
    s3(1, 1) = K(-1);
    const SmallMat<K> one = SmallMat<K>::id(2);
    const int m = n / 2;
    std::vector<SmallMat<K>> gammas;
    for (int k = 1; k <= n; ++k) {
        const int j = (k + 1) / 2;
        SmallMat<K> g = SmallMat<K>::id(1);
        for (int p = 1; p <= m; ++p) {
            const SmallMat<K>& factor = (p < j) ? s3 : (p == j ? (k % 2 ? is1 : is2) : one);
            g = detail::kron(g, factor);
        }
        gammas.push_back(g);
    }
    return gammas;
}

/// Chirality element i^{n/2} gamma_1 ... gamma_n; squares to the identity.
template <class K>
SmallMat<K> grading_matrix(int n) {
    auto gam = gamma_matrices<K>(n);
    SmallMat<K> g = SmallMat<K>::id(1 << (n / 2));
    for (const auto& gk : gam) g = g * gk;
    K ipow(1);
    for (int k = 0; k < n / 2; ++k) ipow = ipow * scalar_i<K>();
    return g.scaled(ipow);
}

/// Algebra homomorphism into End(C^{2^{n/2}}) for the identity metric.
template <class K>
SmallMat<K> matrix_representation(const CliffordElement<K>& a) {
    const int n = a.dimension();
    auto gam = gamma_matrices<K>(n);
    const int d = 1 << (n / 2);
    SmallMat<K> r = SmallMat<K>::zero(d);
    for (const auto& [s, c] : a.coefficients()) {
        SmallMat<K> mono = SmallMat<K>::id(d);
        for (int i = 1; i <= n; ++i)
            if (s & (std::uint32_t(1) << (i - 1))) mono = mono * gam[i - 1];
        r = r + mono.scaled(c);
    }
    return r;
}

/// Graded matrix supertrace tr(Gamma * rep).
template <class K>
K matrix_supertrace(const SmallMat<K>& m, int n) {
    return (grading_matrix<K>(n) * m).trace();
}

struct SupertraceAudit {
    int dimension = 0;
    int monomials_checked = 0;
    bool pass = false;
    std::string detail;
};

/// Exhaustive exact check over every basis monomial: supertrace 0 below the
/// top degree, (-2i)^{n/2} on e_1...e_n, cross-checked against the matrix
/// representation.
SupertraceAudit supertrace_audit(int n);

} // namespace lindex
