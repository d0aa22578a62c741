#include "lindex/clifford.hpp"

#include "lindex/forms.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <vector>

using namespace lindex;
using K = GaussianRational;

namespace {

// Brute-force relation-rewriting oracle, independent of the bitmask
// implementation: monomials are generator index lists, reduced by scanning
// for the first adjacent violation of the normal order (identity metric).
using OracleMono = std::vector<int>;
using OracleElem = std::map<OracleMono, K>;

void oracle_accumulate(OracleElem& out, const OracleMono& m, const K& c) {
    auto it = out.find(m);
    if (it == out.end()) {
        if (!c.is_zero()) out[m] = c;
    } else {
        it->second += c;
        if (it->second.is_zero()) out.erase(it);
    }
}

OracleElem oracle_normalize(std::vector<std::pair<OracleMono, K>> work) {
    OracleElem out;
    while (!work.empty()) {
        auto [mono, c] = work.back();
        work.pop_back();
        bool reduced = false;
        for (std::size_t i = 0; i + 1 < mono.size(); ++i) {
            if (mono[i] == mono[i + 1]) {
                OracleMono rest(mono.begin(), mono.begin() + long(i));
                rest.insert(rest.end(), mono.begin() + long(i) + 2, mono.end());
                work.push_back({rest, -c}); // e_i e_i = -1
                reduced = true;
                break;
            }
            if (mono[i] > mono[i + 1]) {
                OracleMono sw = mono;
                std::swap(sw[i], sw[i + 1]);
                work.push_back({sw, -c}); // e_a e_b = -e_b e_a, a != b
                reduced = true;
                break;
            }
        }
        if (!reduced) oracle_accumulate(out, mono, c);
    }
    return out;
}

OracleElem oracle_mul(const OracleMono& a, const OracleMono& b, K c = K(1)) {
    OracleMono concat = a;
    concat.insert(concat.end(), b.begin(), b.end());
    return oracle_normalize({{concat, c}});
}

OracleMono mask_to_list(std::uint32_t s) {
    OracleMono m;
    for (int i = 1; i <= 30; ++i)
        if (s & (std::uint32_t(1) << (i - 1))) m.push_back(i);
    return m;
}

CliffordElement<K> oracle_to_element(int n, const OracleElem& e) {
    CliffordElement<K> out(n);
    for (const auto& [mono, c] : e) {
        std::uint32_t mask = 0;
        for (int i : mono) mask |= std::uint32_t(1) << (i - 1);
        out.accumulate(mask, c);
    }
    return out;
}

std::mt19937 rng(7);

CliffordElement<K> random_element(int n, int terms) {
    std::uniform_int_distribution<std::uint32_t> mask(0, (std::uint32_t(1) << n) - 1);
    std::uniform_int_distribution<int> coef(-3, 3);
    CliffordElement<K> a(n);
    for (int t = 0; t < terms; ++t)
        a.accumulate(mask(rng), K(Rational(coef(rng)), Rational(coef(rng))));
    return a;
}

} // namespace

TEST_CASE("defining relation and unit law") {
    const auto g = MetricForm<Rational>::identity(2);
    const auto e1 = CliffordElement<K>::generator(2, 1);
    CHECK(clifford_mul(e1, e1, g) == CliffordElement<K>::monomial(2, 0, K(-1)));

    const auto a = random_element(2, 3);
    CHECK(clifford_mul(CliffordElement<K>::unit(2), a, g) == a);
    CHECK(clifford_mul(a, CliffordElement<K>::unit(2), g) == a);

    // non-identity diagonal metric: e_1 e_1 = -g_11
    auto g2 = MetricForm<Rational>::identity(2);
    g2(0, 0) = Rational(2);
    CHECK(clifford_mul(e1, e1, g2) == CliffordElement<K>::monomial(2, 0, K(-2)));
}

TEST_CASE("products match the brute-force rewriting oracle") {
    for (int n : {2, 3, 4}) {
        const auto g = MetricForm<Rational>::identity(n);
        const std::uint32_t top = (std::uint32_t(1) << n) - 1;
        for (std::uint32_t s = 0; s <= top; ++s)
            for (std::uint32_t t = 0; t <= top; ++t) {
                const auto lib = clifford_mul(CliffordElement<K>::monomial(n, s),
                                              CliffordElement<K>::monomial(n, t), g);
                const auto orc = oracle_to_element(n, oracle_mul(mask_to_list(s), mask_to_list(t)));
                CHECK(lib == orc);
            }
    }
    // frozen value from the oracle: (e1 e2)(e1 e2) = -1 at n = 2
    const auto orc = oracle_mul({1, 2}, {1, 2});
    REQUIRE(orc.size() == 1);
    CHECK(orc.count({}) == 1);
    CHECK(orc.at({}) == K(-1));
    const auto g = MetricForm<Rational>::identity(2);
    const auto e12 = CliffordElement<K>::monomial(2, 0b11);
    CHECK(clifford_mul(e12, e12, g) == CliffordElement<K>::monomial(2, 0, K(-1)));
}

TEST_CASE("associativity and distributivity, exact random elements") {
    for (int n : {2, 4, 6}) {
        const auto g = MetricForm<Rational>::identity(n);
        for (int trial = 0; trial < 20; ++trial) {
            const auto a = random_element(n, 3), b = random_element(n, 3), c = random_element(n, 3);
            CHECK(clifford_mul(clifford_mul(a, b, g), c, g) ==
                  clifford_mul(a, clifford_mul(b, c, g), g));
            CHECK(clifford_mul(a + b, c, g) == clifford_mul(a, c, g) + clifford_mul(b, c, g));
        }
    }
}

TEST_CASE("product filtration degree never exceeds the sum") {
    for (int n : {4, 6}) {
        const auto g = MetricForm<Rational>::identity(n);
        for (int trial = 0; trial < 30; ++trial) {
            const auto a = random_element(n, 2), b = random_element(n, 2);
            const auto ab = clifford_mul(a, b, g);
            CHECK(ab.filtration_degree() <= a.filtration_degree() + b.filtration_degree());
        }
    }
}

TEST_CASE("supertrace: top-monomial values, exact") {
    // n = 2: str(e1 e2) = -2i
    const auto e12 = CliffordElement<K>::monomial(2, 0b11);
    CHECK(supertrace(e12) == K(Rational(0), Rational(-2)));
    // n = 4: str(1) = 0, str(e1 e2 e3 e4) = (-2i)^2 = -4
    CHECK(supertrace(CliffordElement<K>::unit(4)) == K(0));
    CHECK(supertrace(CliffordElement<K>::monomial(4, 0b1111)) == K(-4));
    // odd dimension rejected; non-orthonormal frame rejected
    CHECK_THROWS_AS(supertrace(CliffordElement<K>::unit(3)), std::invalid_argument);
    CHECK_THROWS_AS(supertrace(e12, false), std::invalid_argument);
}

TEST_CASE("exhaustive supertrace audit, n in {2, 4, 6}") {
    for (int n : {2, 4, 6}) {
        const auto audit = supertrace_audit(n);
        INFO(audit.detail);
        CHECK(audit.pass);
        CHECK(audit.monomials_checked == (1 << n));
    }
}

TEST_CASE("supertrace kills supercommutators (graded symmetry)") {
    for (int n : {2, 4}) {
        const auto g = MetricForm<Rational>::identity(n);
        std::uniform_int_distribution<std::uint32_t> mask(0, (std::uint32_t(1) << n) - 1);
        for (int trial = 0; trial < 50; ++trial) {
            const auto a = CliffordElement<K>::monomial(n, mask(rng));
            const auto b = CliffordElement<K>::monomial(n, mask(rng));
            const int pa = a.parity(), pb = b.parity();
            const K sab = supertrace(clifford_mul(a, b, g));
            const K sba = supertrace(clifford_mul(b, a, g));
            const K expected = (pa == 1 && pb == 1) ? -sba : sba;
            CHECK(sab == expected);
        }
    }
}

TEST_CASE("quantization map") {
    // 0-form -> unit
    const auto one = FormPolynomial<K>::constant(4, K(1));
    CHECK(quantize(one) == CliffordElement<K>::unit(4));
    // 2-form f dx1^dx2 -> f e1 e2
    const K f(Rational(3), Rational(1));
    const auto w = FormPolynomial<K>::monomial(2, 0b11, f);
    CHECK(quantize(w) == CliffordElement<K>::monomial(2, 0b11, f));
    // (dx1^dx2)^(dx3^dx4) -> e1 e2 e3 e4, checked against the product oracle
    // over every degree-4 exterior monomial
    const auto g = MetricForm<Rational>::identity(4);
    for (std::uint32_t s = 0; s < 16; ++s) {
        if (std::popcount(s) != 4) continue;
        const auto form = FormPolynomial<K>::monomial(4, s, K(1));
        OracleElem orc{{{}, K(1)}};
        OracleElem next;
        for (int i : mask_to_list(s)) {
            next.clear();
            for (const auto& [mono, c] : orc)
                for (const auto& [m2, c2] : oracle_mul(mono, {i}, c)) oracle_accumulate(next, m2, c2);
            orc = next;
        }
        CHECK(quantize(form) == oracle_to_element(4, orc));
    }
    const auto w12 = FormPolynomial<K>::monomial(4, 0b0011, K(1));
    const auto w34 = FormPolynomial<K>::monomial(4, 0b1100, K(1));
    CHECK(quantize(wedge(w12, w34)) == CliffordElement<K>::monomial(4, 0b1111));
    // generator count above n rejected
    CHECK_THROWS_AS(quantize(FormPolynomial<K>::monomial(4, 0b1111, K(1)), 3),
                    std::invalid_argument);
}

TEST_CASE("filtration degree") {
    CHECK(CliffordElement<K>::unit(4).filtration_degree() == 0);
    auto a = CliffordElement<K>::monomial(4, 0b0011);
    a.accumulate(0b0100, K(1));
    CHECK(a.filtration_degree() == 2);
    const auto g = MetricForm<Rational>::identity(4);
    const auto e1 = CliffordElement<K>::generator(4, 1);
    CHECK(clifford_mul(e1, e1, g).filtration_degree() == 0); // degree drop
}

TEST_CASE("matrix representation is a homomorphism with the right grading") {
    // n = 2: rep(e1)^2 = -1
    const auto e1 = CliffordElement<K>::generator(2, 1);
    const auto r1 = matrix_representation(e1);
    CHECK(r1 * r1 == SmallMat<K>::id(2).scaled(K(-1)));

    // grading = i rep(e1 e2) squares to the identity
    const auto r12 = matrix_representation(CliffordElement<K>::monomial(2, 0b11));
    const auto gr = r12.scaled(K::i());
    CHECK(gr * gr == SmallMat<K>::id(2));
    CHECK(gr == grading_matrix<K>(2));

    // str(rep(e1 e2)) = -2i (matrix route cross-check)
    CHECK(matrix_supertrace(r12, 2) == K(Rational(0), Rational(-2)));

    // homomorphism: rep(a b) = rep(a) rep(b), n in {2, 4}
    for (int n : {2, 4}) {
        const auto g = MetricForm<Rational>::identity(n);
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = random_element(n, 2), b = random_element(n, 2);
            CHECK(matrix_representation(clifford_mul(a, b, g)) ==
                  matrix_representation(a) * matrix_representation(b));
        }
    }
    CHECK_THROWS_AS(matrix_representation(CliffordElement<K>::unit(3)), std::invalid_argument);
}
