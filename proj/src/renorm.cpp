#include "lindex/renorm.hpp"

#include "lindex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lindex {

namespace {

// 12-point Gauss-Legendre nodes/weights on [-1, 1]
const double kGLx[12] = {-0.9815606342467192, -0.9041172563704748, -0.7699026741943047,
                         -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
                         0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
                         0.7699026741943047,  0.9041172563704748,  0.9815606342467192};
const double kGLw[12] = {0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
                         0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
                         0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                         0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

cplx poly_eval(const std::vector<cplx>& c, cplx z) {
    cplx p = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) p = p * z + c[k];
    return p;
}

/// G(z) for the b-cylinder: transverse average F(s), boundary limit split off.
cplx sample_G_bcyl(const std::function<cplx(const Point&)>& f, const ModelGeometry& geom,
                   double z, const RegularizationOptions& opt) {
    const double S = geom.spec().collar_extent;
    const double L = geom.spec().boundary_length;
    const int nt = opt.theta_nodes;
    auto F = [&](double s) {
        cplx acc = 0.0;
        for (int j = 0; j < nt; ++j) acc += f({s, L * j / nt});
        return acc * (L / nt);
    };
    const cplx F_boundary = F(-S); // x = e^{-S} is 0 to machine precision
    cplx integral = F_boundary / z;
    const double hp = S / opt.panels;
    for (int p = 0; p < opt.panels; ++p) {
        const double a = -S + p * hp, b = a + hp;
        for (int q = 0; q < 12; ++q) {
            const double s = 0.5 * (a + b) + 0.5 * (b - a) * kGLx[q];
            integral += 0.5 * (b - a) * kGLw[q] * std::exp(z * s) * (F(s) - F_boundary);
        }
    }
    return integral;
}

struct RationalFit {
    std::vector<cplx> P, Q;
    double residual = INFINITY;
};

RationalFit fit_rational(const std::vector<double>& zs, const std::vector<cplx>& gs, int degL,
                         int degM) {
    // homogeneous least squares: P(z_i) - G_i Q(z_i) = 0
    const std::size_t rows = zs.size();
    Mat A(rows, static_cast<std::size_t>(degL + degM + 2));
    for (std::size_t i = 0; i < rows; ++i) {
        double zp = 1.0;
        for (int k = 0; k <= degL; ++k) {
            A(i, static_cast<std::size_t>(k)) = zp;
            zp *= zs[i];
        }
        zp = 1.0;
        for (int k = 0; k <= degM; ++k) {
            A(i, static_cast<std::size_t>(degL + 1 + k)) = -gs[i] * zp;
            zp *= zs[i];
        }
    }
    const cvec v = smallest_singular_vector(A);
    RationalFit fit;
    fit.P.assign(v.begin(), v.begin() + degL + 1);
    fit.Q.assign(v.begin() + degL + 1, v.end());
    double qmax = 0;
    for (const auto& c : fit.Q) qmax = std::max(qmax, std::abs(c));
    if (qmax < 1e-14) return fit; // degenerate
    fit.residual = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const cplx qv = poly_eval(fit.Q, zs[i]);
        if (std::abs(qv) < 1e-12 * qmax) {
            fit.residual = INFINITY;
            return fit;
        }
        const cplx err = poly_eval(fit.P, zs[i]) / qv - gs[i];
        fit.residual = std::max(fit.residual, std::abs(err) / (1.0 + std::abs(gs[i])));
    }
    return fit;
}

/// Taylor expansion of P / Q around 0 (Q(0) != 0), first `terms` coefficients.
std::vector<cplx> rational_taylor(const std::vector<cplx>& P, const std::vector<cplx>& Q,
                                  int terms) {
    std::vector<cplx> c(static_cast<std::size_t>(terms), 0.0);
    const cplx q0 = Q[0];
    for (int k = 0; k < terms; ++k) {
        cplx acc = (static_cast<std::size_t>(k) < P.size()) ? P[static_cast<std::size_t>(k)] : cplx(0.0);
        for (int j = 1; j <= k && static_cast<std::size_t>(j) < Q.size(); ++j)
            acc -= Q[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k - j)];
        c[static_cast<std::size_t>(k)] = acc / q0;
    }
    return c;
}

LaurentData laurent_from_samples(const std::vector<double>& zs, const std::vector<cplx>& gs,
                                 const RegularizationOptions& opt) {
    LaurentData out;
    out.sample_z = zs;
    out.sample_values = gs;

    RationalFit best;
    for (int total = 0; total <= 2 * opt.max_rational_degree && best.residual > opt.fit_tol;
         ++total) {
        for (int degM = 0; degM <= std::min(total, opt.max_rational_degree); ++degM) {
            const int degL = total - degM;
            if (degL > opt.max_rational_degree) continue;
            RationalFit fit = fit_rational(zs, gs, degL, degM);
            if (fit.residual < best.residual) best = fit;
            if (best.residual <= opt.fit_tol) break;
        }
    }
    if (!(best.residual <= opt.fit_tol)) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "regularized_integral: rational fit residual %.3e above tolerance %.3e",
                      best.residual, opt.fit_tol);
        throw std::runtime_error(msg);
    }
    out.fit_residual = best.residual;

    // deflate z = 0 roots of Q to find the pole order at the origin
    std::vector<cplx> Q = best.Q;
    double qscale = 0;
    for (const auto& c : Q) qscale = std::max(qscale, std::abs(c));
    int p = 0;
    while (Q.size() > 1 && std::abs(Q[0]) < 1e-7 * qscale) {
        Q.erase(Q.begin());
        ++p;
    }
    if (p > opt.max_pole_order)
        throw std::runtime_error("regularized_integral: pole order exceeds configured maximum");
    out.pole_order = p;
    const auto series = rational_taylor(best.P, Q, p + 3);
    for (int k = 0; k < p; ++k) out.pole_coefficients.push_back(series[static_cast<std::size_t>(k)]);
    out.finite_part = series[static_cast<std::size_t>(p)];
    out.taylor = {series[static_cast<std::size_t>(p)], series[static_cast<std::size_t>(p + 1)], series[static_cast<std::size_t>(p + 2)]};
    out.numerator = best.P;
    out.denominator = best.Q;
    return out;
}

} // namespace

cplx LaurentData::reconstruct(double z) const {
    if (denominator.empty()) return finite_part;
    return poly_eval(numerator, z) / poly_eval(denominator, z);
}

LaurentData regularized_integral(const std::function<cplx(const Point&)>& f,
                                 const ModelGeometry& geom, const RegularizationOptions& opt) {
    if (!geom.has_boundary()) {
        LaurentData out;
        out.finite_part = geom.integrate_c(f);
        out.taylor = {out.finite_part, 0.0, 0.0};
        out.fit_residual = 0.0;
        return out;
    }
    std::vector<double> zs(static_cast<std::size_t>(opt.num_samples));
    std::vector<cplx> gs(static_cast<std::size_t>(opt.num_samples));
    for (int i = 0; i < opt.num_samples; ++i) {
        zs[static_cast<std::size_t>(i)] =
            opt.z_min + (opt.z_max - opt.z_min) * i / double(opt.num_samples - 1);
        gs[static_cast<std::size_t>(i)] = sample_G_bcyl(f, geom, zs[static_cast<std::size_t>(i)], opt);
    }
    return laurent_from_samples(zs, gs, opt);
}

std::vector<PoleInfo> pole_structure(const std::function<cplx(const Point&)>& f,
                                     const ModelGeometry& geom, double window_lo,
                                     double window_hi, const RegularizationOptions& opt) {
    LaurentData lau = regularized_integral(f, geom, opt);
    std::vector<PoleInfo> poles;
    if (lau.denominator.empty()) return poles;
    double qscale = 0;
    for (const auto& c : lau.denominator) qscale = std::max(qscale, std::abs(c));
    const cvec roots = polynomial_roots(lau.denominator);
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > 1e-6) continue;
        const double x = r.real();
        if (x < window_lo || x > window_hi) continue;
        PoleInfo info;
        info.location = x;
        // residue via P(r) / Q'(r)
        std::vector<cplx> dQ;
        for (std::size_t k = 1; k < lau.denominator.size(); ++k)
            dQ.push_back(double(k) * lau.denominator[k]);
        const cplx qp = poly_eval(dQ, r);
        if (std::abs(qp) > 1e-12 * qscale) info.residue = poly_eval(lau.numerator, r) / qp;
        // spurious pole guard: a genuine pole has a non-negligible residue
        if (std::abs(info.residue) < 1e-8) continue;
        poles.push_back(info);
    }
    std::sort(poles.begin(), poles.end(),
              [](const PoleInfo& a, const PoleInfo& b) { return a.location < b.location; });
    return poles;
}

cplx renormalized_supertrace(const std::function<cplx(const Point&)>& supertrace_density,
                             const ModelGeometry& geom, const RegularizationOptions& opt) {
    return regularized_integral(supertrace_density, geom, opt).finite_part;
}

EtaResult eta_integral(const SpectralData& spectral, double t_max, int quadrature_points) {
    EtaResult r;
    // integrand(t) = Tr_s(D^2 e^{-t D^2}); log-spaced quadrature on (0, t_max]
    const double t_min = 1e-6;
    double prev_t = 0, prev_v = spectral.heat_supertrace_d2(t_min);
    r.max_integrand = std::abs(prev_v);
    prev_t = t_min;
    double acc = prev_v * t_min; // left sliver, integrand bounded
    for (int i = 1; i <= quadrature_points; ++i) {
        const double t = t_min * std::pow(t_max / t_min, double(i) / quadrature_points);
        const double v = spectral.heat_supertrace_d2(t);
        acc += 0.5 * (v + prev_v) * (t - prev_t);
        r.max_integrand = std::max(r.max_integrand, std::abs(v));
        prev_t = t;
        prev_v = v;
    }
    r.value = acc;
    const double gap = spectral.spectral_gap();
    if (std::isfinite(gap) && gap > 0) {
        r.gap_available = true;
        // |integrand| <= dim * gap^2 e^{-t gap^2} for t >= t_max
        r.tail_bound = double(spectral.size()) * std::exp(-t_max * gap * gap);
    }
    return r;
}

} // namespace lindex
