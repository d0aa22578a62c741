#include "lindex/getzler.hpp"

#include "lindex/heat.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lindex;

namespace {
constexpr double kPi = 3.14159265358979323846;

ModelGeometry square_torus(int res = 48) {
    return build_geometry(GeometrySpec::torus({2 * kPi, 2 * kPi}, {res, res}));
}

std::vector<double> default_scales() {
    // window between two exponentially small error floors: below t ~ 0.6 the
    // truncated Landau ladder leaks e^{-2 B N t^2}; above t ~ 0.78 the torus
    // wrap-around transient e^{-pi^2/t^2} becomes visible
    std::vector<double> s;
    for (int i = 0; i < 8; ++i) s.push_back(0.6 + 0.025 * i);
    return s;
}

std::mt19937 rng(417);

FormPolynomial<cplx> random_two_form(int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FormPolynomial<cplx> f(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            f.accumulate((1u << (i - 1)) | (1u << (j - 1)), cplx(u(rng), 0.0));
    return f;
}

double max_coeff_diff(const FormPolynomial<cplx>& a, const FormPolynomial<cplx>& b) {
    double worst = 0;
    for (const auto& [s, c] : a.coefficients()) worst = std::max(worst, std::abs(c - b.coefficient(s)));
    for (const auto& [s, c] : b.coefficients()) worst = std::max(worst, std::abs(c - a.coefficient(s)));
    return worst;
}

} // namespace

TEST_CASE("rescaled family: untwisted torus has vanishing supertrace at every scale") {
    const auto geom = square_torus(32);
    DiracOptions opt;
    opt.torus_mode_cutoff = 6;
    const auto assembly = build_dirac(geom, 0, opt);
    const auto spectral = assembly.spectrum();
    const auto fam = scale_kernel(assembly, spectral, default_scales());
    for (const double v : fam.supertrace_abs()) CHECK(v < 1e-10);
    // flat untwisted kernel is scalar: the e1, e2, e1e2 components vanish
    for (std::size_t s = 0; s < fam.scales.size(); ++s)
        for (int c : {1, 2, 3})
            for (const auto& v : fam.components[s][std::size_t(c)])
                CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("rescaled family: twisted torus slope, limit, filtration") {
    // d = 3: the Landau-projector diagonals on the torus carry theta-function
    // modulations of size ~e^{-pi d}; at d = 3 they sit near 1e-4, well below
    // the 1e-3 cross-consistency tolerance (the integrated limit is exact for
    // every d because the modulations average out)
    const auto geom = square_torus(48);
    const int d = 3;
    const auto assembly = build_dirac(geom, d);
    const auto spectral = assembly.spectrum();
    const auto fam = scale_kernel(assembly, spectral, default_scales());

    // |tr_s l_t| = t^n * d exactly: slope n within 0.1
    const auto abs_traces = fam.supertrace_abs();
    CHECK(std::abs(loglog_slope(fam.scales, abs_traces) - 2.0) < 0.1);

    // t^{-n} tr_s l_t extends continuously to t = 0: fitted limit stable
    CHECK(fam.fit_drift < 1e-4);

    // the fitted limit integrates to the index
    CHECK(std::abs(fam.supertrace_limit_integral() - cplx(double(d))) < 1e-3);

    // pointwise limit equals the index density d / Area within 1e-3
    const auto lim = fam.supertrace_limit();
    const double expect = d / (4 * kPi * kPi);
    for (std::size_t x = 0; x < lim.size(); x += 173)
        CHECK(std::abs(lim[x] - cplx(expect)) < 1e-3);

    // degree filtration audit passes
    const auto filt = taylor_filtration_check(fam);
    INFO(filt.detail);
    CHECK(filt.pass);
    CHECK(filt.worst_violation <= 1e-6);
}

TEST_CASE("negative control: the unscaled family fails the filtration audit") {
    const auto geom = square_torus(32);
    const auto assembly = build_dirac(geom, 2);
    const auto spectral = assembly.spectrum();
    const auto fam = scale_kernel(assembly, spectral, default_scales(), false);
    const auto filt = taylor_filtration_check(fam);
    CHECK(!filt.pass);
    CHECK(filt.worst_violation > 1e-3);
}

TEST_CASE("model operator: flat case and magnetic ladder") {
    // R = 0, F = 0: the realization is exactly the flat Laplacian matrix
    {
        ModelOperatorSpec spec;
        spec.r12 = 0.0;
        const auto real = model_operator(spec, 12);
        // -(D1^2 + D2^2) is positive with harmonic-oscillator-free spectrum:
        // compare against the directly assembled matrix
        CHECK(real.truncation_residual == 0.0);
        CHECK(real.eigenvalues.front() >= -1e-10);
    }
    // R12 = 4: Landau ladder with frequency |r|/2 = 2: levels 2, 6, 10...
    // (with the oscillator length matched to the basis the level states are
    // represented exactly; the momentum truncation adds edge states between
    // levels, so the ladder appears as exact clusters)
    {
        ModelOperatorSpec spec;
        spec.r12 = 4.0;
        const auto real = model_operator(spec, 24);
        CHECK(real.eigenvalues.front() >= -1e-10);
        int at_2 = 0, at_6 = 0;
        for (double e : real.eigenvalues) {
            if (std::abs(e - 2.0) < 1e-8) ++at_2;
            if (std::abs(e - 6.0) < 1e-8) ++at_6;
        }
        CHECK(at_2 >= 6);
        CHECK(at_6 >= 4);
        CHECK(real.truncation_residual < 1e-10);
    }
}

TEST_CASE("model operator commutes with the rotation generator when F = 0") {
    ModelOperatorSpec spec;
    spec.r12 = 4.0;
    const auto real = model_operator(spec, 20);
    const Mat comm = real.hamiltonian * real.rotation_generator -
                     real.rotation_generator * real.hamiltonian;
    // entries between states well inside the truncation are exactly zero;
    // H and L each move the level totals by at most 2
    const int m = real.basis_per_axis;
    double worst = 0;
    for (int a1 = 0; a1 < m; ++a1)
        for (int a2 = 0; a2 < m; ++a2)
            for (int b1 = 0; b1 < m; ++b1)
                for (int b2 = 0; b2 < m; ++b2) {
                    if (a1 + a2 > m - 5 || b1 + b2 > m - 5) continue;
                    worst = std::max(worst,
                                     std::abs(comm(std::size_t(a1) * m + a2,
                                                   std::size_t(b1) * m + b2)));
                }
    CHECK(worst < 1e-10);
}

TEST_CASE("scalar Mehler closed form vs Hermite eigen-sum oracle") {
    for (double a : {0.7, 2.0}) {
        const auto osc = oscillator_1d(a, 160);
        // spectrum is a(2k+1)
        for (int k = 0; k < 5; ++k)
            CHECK(osc.eigenvalues[std::size_t(k)] ==
                  doctest::Approx(a * (2 * k + 1)).epsilon(1e-10));
        for (double t : {0.3, 1.0}) {
            const double eigensum = oscillator_heat_diag0(osc, t);
            const double closed = mehler_scalar_diag0(a, t);
            CHECK(std::abs(eigensum - closed) < 1e-8);
        }
    }
}

TEST_CASE("Mehler value with nilpotent curvature matches the charclass series") {
    for (int n : {2, 4, 6}) {
        CurvatureMatrix R = CurvatureMatrix::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) R.set(i, j, random_two_form(n));
        const FormPolynomial<cplx> F =
            n >= 2 ? random_two_form(n) : FormPolynomial<cplx>(n);
        for (double t : {0.5, 1.0, 1.7}) {
            const auto mehler = mehler_heat_value(R, F, t);
            // charclass route: A-roof of tR (trace-log-exp) wedge exp(tF)
            CurvatureMatrix tR = CurvatureMatrix::zero(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) tR(i, j) = R(i, j).scaled(cplx(t));
            const auto ch = chern_character(F.scaled(cplx(t)));
            const auto reference =
                wedge(a_hat(tR), ch).scaled(cplx(std::pow(4 * kPi * t, -0.5 * n)));
            CHECK(max_coeff_diff(mehler, reference) < 1e-12);
        }
    }
    // trivial case: R = 0, F = 0 gives (4 pi t)^{-n/2}
    const auto flat = mehler_heat_value(CurvatureMatrix::zero(2), FormPolynomial<cplx>(2), 0.8);
    CHECK(flat.coefficient(0).real() == doctest::Approx(1.0 / (4 * kPi * 0.8)));
    CHECK(flat.degree() == 0);
}

TEST_CASE("index density: pointwise value and consistency with the rescaled limit") {
    const auto geom = square_torus(48);
    // flat untwisted: zero
    CHECK(std::abs(index_density(geom, 0, 0)) < 1e-14);
    // twisted: d / Area pointwise
    for (int d : {1, 3, -2}) {
        const double expect = d / (4 * kPi * kPi);
        CHECK(std::abs(index_density(geom, d, 0) - cplx(expect)) < 1e-14);
    }
    // cross-module consistency: fitted limit of t^{-n} tr_s l_t vs density
    const int d = 3;
    const auto assembly = build_dirac(geom, d);
    const auto spectral = assembly.spectrum();
    const auto fam = scale_kernel(assembly, spectral, default_scales());
    const auto lim = fam.supertrace_limit();
    for (std::size_t x = 0; x < lim.size(); x += 389)
        CHECK(std::abs(lim[x] - index_density(geom, d, x)) < 1e-3);
}

TEST_CASE("rescaled supertrace limit integrates to the index, d in {-3..3}") {
    const auto geom = square_torus(32);
    std::vector<double> scales;
    for (int i = 0; i < 6; ++i) scales.push_back(0.6 + 0.03 * i);
    for (int d = -3; d <= 3; ++d) {
        DiracOptions opt;
        if (d != 0) opt.landau_levels = std::max(48, 160 / std::abs(d));
        const auto assembly = build_dirac(geom, d, opt);
        const auto spectral = assembly.spectrum();
        const auto fam = scale_kernel(assembly, spectral, scales);
        CHECK(std::abs(fam.supertrace_limit_integral() - cplx(double(d))) < 1e-3);
    }
}
