#include "lindex/heat.hpp"

#include "lindex/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lindex {

namespace {
constexpr double kPi = 3.14159265358979323846;

const double kGL32x[16] = {0.0483076656877383, 0.1444719615827965, 0.2392873622521371,
                           0.3318686022821277, 0.4213512761306353, 0.5068999089322294,
                           0.5877157572407623, 0.6630442669302152, 0.7321821187402897,
                           0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
                           0.9349060759377397, 0.9647622555875064, 0.9856115115452684,
                           0.9972638618494816};
const double kGL32w[16] = {0.0965400885147278, 0.0956387200792749, 0.0938443990808046,
                           0.0911738786957639, 0.0876520930044038, 0.0833119242269467,
                           0.0781938957870703, 0.0723457941088485, 0.0658222227763618,
                           0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
                           0.0342738629130214, 0.0253920653092621, 0.0162743947309057,
                           0.0070186100094701};

} // namespace

// ---------------------------------------------------------------------------
// Chebyshev series (the parametrix recursion differentiates its own output,
// so the coefficients are carried spectrally rather than on grids)

ChebSeries ChebSeries::fit(double lo, double hi, int degree,
                           const std::function<double(double)>& f) {
    ChebSeries s;
    s.lo = lo;
    s.hi = hi;
    const int n = degree;
    std::vector<double> vals(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double xk = std::cos(kPi * k / n); // Lobatto nodes
        vals[static_cast<std::size_t>(k)] = f(lo + (hi - lo) * 0.5 * (xk + 1.0));
    }
    s.c.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        double acc = 0;
        for (int k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            acc += w * vals[static_cast<std::size_t>(k)] * std::cos(kPi * j * k / n);
        }
        s.c[static_cast<std::size_t>(j)] = 2.0 * acc / n;
    }
    s.c[0] *= 0.5;
    s.c[static_cast<std::size_t>(n)] *= 0.5;
    return s;
}

double ChebSeries::eval(double x) const {
    const double t = 2.0 * (x - lo) / (hi - lo) - 1.0;
    double b1 = 0, b2 = 0;
    for (std::size_t j = c.size(); j-- > 1;) {
        const double b0 = 2 * t * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

ChebSeries ChebSeries::derivative() const {
    ChebSeries d;
    d.lo = lo;
    d.hi = hi;
    const std::size_t n = c.size();
    d.c.assign(n, 0.0);
    if (n < 2) return d;
    std::vector<double> dc(n + 2, 0.0);
    for (std::size_t k = n - 1; k >= 1; --k) {
        dc[k - 1] = dc[k + 1] + 2.0 * double(k) * c[k];
        if (k == 1) break;
    }
    dc[0] *= 0.5;
    const double scale = 2.0 / (hi - lo);
    for (std::size_t k = 0; k < n; ++k) d.c[k] = dc[k] * scale;
    return d;
}

// ---------------------------------------------------------------------------

double gaussian_q(const ModelGeometry& geom, const Point& x, const Point& y, double t) {
    if (!(t > 0)) throw std::invalid_argument("gaussian_q: t must be positive");
    const double d = geom.geodesic_distance(x, y);
    const int n = geom.dimension();
    return std::pow(4 * kPi * t, -0.5 * n) * std::exp(-d * d / (4 * t));
}

// ---------------------------------------------------------------------------
// CircleOperator

CircleOperator::CircleOperator(double length, std::function<double(double)> potential,
                               int cutoff)
    : length_(length), cutoff_(cutoff) {
    if (!(length > 0) || cutoff < 1) throw std::invalid_argument("CircleOperator parameters");
    const int dim = 2 * cutoff + 1;
    if (!potential) {
        eigenvalues_.resize(static_cast<std::size_t>(dim));
        for (int k = -cutoff; k <= cutoff; ++k) {
            const double w = 2 * kPi * k / length_;
            eigenvalues_[static_cast<std::size_t>(k + cutoff)] = w * w;
        }
        std::vector<std::size_t> perm(static_cast<std::size_t>(dim));
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return eigenvalues_[a] < eigenvalues_[b]; });
        std::vector<double> ev(static_cast<std::size_t>(dim));
        Mat vecs(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
        for (std::size_t col = 0; col < perm.size(); ++col) {
            ev[col] = eigenvalues_[perm[col]];
            vecs(perm[col], col) = 1.0;
        }
        eigenvalues_ = std::move(ev);
        vectors_ = std::move(vecs);
        return;
    }
    // Galerkin: H_{k k'} = (2 pi k / L)^2 delta + Vhat(k - k')
    const int quad = 4096;
    std::vector<cplx> vhat(static_cast<std::size_t>(4 * cutoff + 1), 0.0);
    for (int m = -2 * cutoff; m <= 2 * cutoff; ++m) {
        cplx acc = 0.0;
        for (int q = 0; q < quad; ++q) {
            const double x = length_ * q / quad;
            acc += potential(x) * std::polar(1.0, -2 * kPi * m * x / length_);
        }
        vhat[static_cast<std::size_t>(m + 2 * cutoff)] = acc / double(quad);
    }
    Mat h(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    for (int k = -cutoff; k <= cutoff; ++k)
        for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
            cplx v = vhat[static_cast<std::size_t>(k - k2 + 2 * cutoff)];
            if (k == k2) {
                const double w = 2 * kPi * k / length_;
                v += w * w;
            }
            h(static_cast<std::size_t>(k + cutoff), static_cast<std::size_t>(k2 + cutoff)) = v;
        }
    EigResult eig = hermitian_eigensolve(h);
    eigenvalues_ = std::move(eig.eigenvalues);
    vectors_ = std::move(eig.vectors);
}

cplx CircleOperator::eigenfunction(std::size_t i, double x) const {
    return eigenfunction_derivative(i, x, 0);
}

cplx CircleOperator::eigenfunction_derivative(std::size_t i, double x, int l) const {
    cplx acc = 0.0;
    for (int k = -cutoff_; k <= cutoff_; ++k) {
        const cplx c = vectors_(static_cast<std::size_t>(k + cutoff_), i);
        if (c == cplx(0.0)) continue;
        cplx fac = 1.0;
        const cplx ik(0.0, 2 * kPi * k / length_);
        for (int p = 0; p < l; ++p) fac *= ik;
        acc += c * fac * std::polar(1.0, 2 * kPi * k * x / length_);
    }
    return acc / std::sqrt(length_);
}

double CircleOperator::trace_heat(double t) const {
    std::vector<double> w(eigenvalues_.size());
    kernels::active().exp_weights(eigenvalues_.data(), t, w.data(), w.size());
    double s = 0;
    for (double v : w) s += v;
    return s;
}

cplx CircleOperator::kernel(double t, double x, double y) const {
    return kernel_derivative(t, x, y, 0);
}

cplx CircleOperator::kernel_derivative(double t, double x, double y, int l) const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
        const double w = std::exp(-t * eigenvalues_[i]);
        if (w < 1e-300) continue;
        acc += w * eigenfunction_derivative(i, x, l) * std::conj(eigenfunction(i, y));
    }
    return acc;
}

Mat CircleOperator::kernel_matrix(double t, int grid) const {
    Mat phi(static_cast<std::size_t>(grid), eigenvalues_.size());
    for (int g = 0; g < grid; ++g)
        for (std::size_t i = 0; i < eigenvalues_.size(); ++i)
            phi(static_cast<std::size_t>(g), i) = eigenfunction(i, length_ * g / grid);
    Mat k(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
    cvec col(static_cast<std::size_t>(grid));
    for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
        const double w = std::exp(-t * eigenvalues_[i]);
        if (w < 1e-300) continue;
        for (int g = 0; g < grid; ++g) col[static_cast<std::size_t>(g)] = phi(static_cast<std::size_t>(g), i);
        kernels::active().herk1_acc(k.a.data(), col.data(), w, static_cast<std::size_t>(grid));
    }
    return k;
}

double sphere_scalar_heat_trace(double radius, double t, int lmax) {
    double s = 0;
    for (int l = 0; l <= lmax; ++l)
        s += (2 * l + 1) * std::exp(-t * l * (l + 1) / (radius * radius));
    return s;
}

// ---------------------------------------------------------------------------
// radial parametrix (series in q = p^2)

double RadialExpansion::phi_at(int i, double p) const {
    return phi_series[static_cast<std::size_t>(i)].eval(p * p);
}

RadialExpansion parametrix_radial(const ModelGeometry& geom, int order, double p_max,
                                  int degree) {
    if (order > 4) throw std::invalid_argument("parametrix_radial: order <= 4 at desk scale");
    if (!(p_max > 0) || p_max >= geom.injectivity_radius())
        throw std::invalid_argument("parametrix_radial: chart radius out of range");
    const int n = geom.dimension();
    const double q_hi = p_max * p_max;
    const NormalChart chart = geom.normal_coordinates(geom.point(0), p_max);

    // J and W = (J'/J)/p = 2 J_q / J as series in q
    const ChebSeries J = ChebSeries::fit(0.0, q_hi, degree,
                                         [&](double q) { return chart.jacobian(std::sqrt(q)); });
    const ChebSeries Jq = J.derivative();
    const ChebSeries W = ChebSeries::fit(0.0, q_hi, degree, [&](double q) {
        return 2.0 * Jq.eval(q) / J.eval(q);
    });

    // radial Laplacian in q: Delta f = -[4 q f_qq + (2 n + 2 q W) f_q]
    auto laplacian = [&](const ChebSeries& f) {
        const ChebSeries fq = f.derivative();
        const ChebSeries fqq = fq.derivative();
        return ChebSeries::fit(0.0, q_hi, degree, [&](double q) {
            return -(4.0 * q * fqq.eval(q) + (2.0 * n + 2.0 * q * W.eval(q)) * fq.eval(q));
        });
    };

    RadialExpansion out;
    out.p_max = p_max;
    out.phi_series.push_back(ChebSeries::fit(
        0.0, q_hi, degree, [&](double q) { return 1.0 / std::sqrt(J.eval(q)); }));

    // flat models: Delta Phi_0 = 0 identically; keep the zeros exact
    const bool flat = geom.kind() != GeometryKind::RoundSphere;
    ChebSeries hphi = flat ? ChebSeries{0.0, q_hi, {0.0}} : laplacian(out.phi_series[0]);
    for (int i = 1; i <= order; ++i) {
        if (flat) {
            out.phi_series.push_back(ChebSeries{0.0, q_hi, {0.0}});
            continue;
        }
        const ChebSeries prev_h = hphi;
        const ChebSeries phi_i = ChebSeries::fit(0.0, q_hi, degree, [&](double q) {
            const double p = std::sqrt(q);
            double acc = 0;
            for (int s2 = 0; s2 < 16; ++s2)
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const double s = 0.5 + 0.5 * sgn * kGL32x[s2];
                    const double w = 0.5 * kGL32w[s2];
                    const double qs = s * p * s * p;
                    acc += w * std::sqrt(J.eval(qs)) * prev_h.eval(qs) * std::pow(s, i - 1);
                }
            return -acc / std::sqrt(J.eval(q));
        });
        out.phi_series.push_back(phi_i);
        if (i < order) hphi = laplacian(out.phi_series[static_cast<std::size_t>(i)]);
    }

    // sampled arrays for inspection
    const int grid_points = 257;
    out.radii.resize(static_cast<std::size_t>(grid_points));
    out.phi.assign(out.phi_series.size(), std::vector<double>(static_cast<std::size_t>(grid_points)));
    for (int j = 0; j < grid_points; ++j) {
        const double p = p_max * j / (grid_points - 1);
        out.radii[static_cast<std::size_t>(j)] = p;
        for (std::size_t i = 0; i < out.phi_series.size(); ++i)
            out.phi[i][static_cast<std::size_t>(j)] = out.phi_series[i].eval(p * p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// line parametrix with potential

double LineParametrix::phi_node(int i, std::size_t iy, double u) const {
    return phi[static_cast<std::size_t>(i)][iy].eval(u);
}

double LineParametrix::phi_at(int i, double y, double u) const {
    const double L = length;
    double yy = std::fmod(y, L);
    if (yy < 0) yy += L;
    const std::size_t ny = ys.size();
    const double hy = L / double(ny);
    const double fy = yy / hy;
    const long i0 = long(std::floor(fy));
    const double t = fy - double(i0);
    // periodic cubic Lagrange across four neighboring base points
    auto node = [&](long k) {
        const std::size_t idx = static_cast<std::size_t>(((i0 + k) % long(ny) + long(ny)) % long(ny));
        return phi[static_cast<std::size_t>(i)][idx].eval(u);
    };
    const double t1 = t + 1, t2 = t - 1, t3 = t - 2;
    return -node(-1) * t * t2 * t3 / 6.0 + node(0) * t1 * t2 * t3 / 2.0 -
           node(1) * t1 * t * t3 / 2.0 + node(2) * t1 * t * t2 / 6.0;
}

LineParametrix parametrix_line(double length, const std::function<double(double)>& potential,
                               int order, double u_max, int ny, int degree) {
    if (order > 4) throw std::invalid_argument("parametrix_line: order <= 4");
    LineParametrix out;
    out.length = length;
    out.order = order;
    out.u_max = u_max;
    out.ys.resize(static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) out.ys[static_cast<std::size_t>(j)] = length * j / ny;

    out.phi.resize(static_cast<std::size_t>(order) + 1);
    for (int j = 0; j < ny; ++j)
        out.phi[0].push_back(ChebSeries{-u_max, u_max, {1.0}});

    // A_{i-1}(y, u) = (H_x Phi_{i-1})(y + u, y) = -d_u^2 Phi + V(y + u) Phi
    std::vector<ChebSeries> hphi;
    auto apply_H = [&](const std::vector<ChebSeries>& f) {
        std::vector<ChebSeries> a;
        for (int j = 0; j < ny; ++j) {
            const double y = out.ys[static_cast<std::size_t>(j)];
            const ChebSeries fu = f[static_cast<std::size_t>(j)].derivative();
            const ChebSeries fuu = fu.derivative();
            a.push_back(ChebSeries::fit(-u_max, u_max, degree, [&](double u) {
                return -fuu.eval(u) +
                       potential(y + u) * f[static_cast<std::size_t>(j)].eval(u);
            }));
        }
        return a;
    };

    hphi = apply_H(out.phi[0]);
    for (int i = 1; i <= order; ++i) {
        for (int j = 0; j < ny; ++j) {
            const ChebSeries& row = hphi[static_cast<std::size_t>(j)];
            out.phi[static_cast<std::size_t>(i)].push_back(
                ChebSeries::fit(-u_max, u_max, degree, [&](double u) {
                    double acc = 0;
                    for (int q = 0; q < 16; ++q)
                        for (int sgn = -1; sgn <= 1; sgn += 2) {
                            const double s = 0.5 + 0.5 * sgn * kGL32x[q];
                            acc += 0.5 * kGL32w[q] * row.eval(s * u) * std::pow(s, i - 1);
                        }
                    return -acc;
                }));
        }
        if (i < order) hphi = apply_H(out.phi[static_cast<std::size_t>(i)]);
    }
    return out;
}

double smooth_cutoff(double distance, double r0) {
    const double d = std::abs(distance);
    if (d <= r0 / 2) return 1.0;
    if (d >= r0) return 0.0;
    const double b = (d - r0 / 2) / (r0 / 2); // in (0, 1)
    auto f = [](double t) { return t <= 0 ? 0.0 : std::exp(-1.0 / t); };
    return f(1 - b) / (f(1 - b) + f(b));
}

namespace {

double wrap_offset(double u, double L) {
    u = std::fmod(u, L);
    if (u < -L / 2) u += L;
    if (u > L / 2) u -= L;
    return u;
}

// derivatives of the smooth cutoff by central differences on its analytic
// formula (the cutoff is fixed and smooth; 1e-5 steps are far below any
// measured remainder scale)
double cutoff_d1(double u, double r0) {
    const double h = 1e-5;
    return (smooth_cutoff(u + h, r0) - smooth_cutoff(u - h, r0)) / (2 * h);
}
double cutoff_d2(double u, double r0) {
    const double h = 1e-5;
    return (smooth_cutoff(u + h, r0) - 2 * smooth_cutoff(u, r0) + smooth_cutoff(u - h, r0)) /
           (h * h);
}

/// (d_t + H) G_N at base node iy, offset u, with all Phi-derivatives taken
/// spectrally from the Chebyshev series.
double remainder_value_node(const LineParametrix& par,
                            const std::function<double(double)>& potential, double t,
                            std::size_t iy, double u, double r0,
                            const std::vector<std::vector<ChebSeries>>& du,
                            const std::vector<std::vector<ChebSeries>>& duu) {
    const double y = par.ys[iy];
    double P = 0, Pu = 0, Puu = 0, dP_dt = 0;
    double tp = 1;
    for (int i = 0; i <= par.order; ++i) {
        const double phi = par.phi[static_cast<std::size_t>(i)][iy].eval(u);
        P += tp * phi;
        Pu += tp * du[static_cast<std::size_t>(i)][iy].eval(u);
        Puu += tp * duu[static_cast<std::size_t>(i)][iy].eval(u);
        if (i >= 1) dP_dt += i * (tp / t) * phi;
        tp *= t;
    }
    const double chi = smooth_cutoff(u, r0);
    const double chi1 = cutoff_d1(u, r0);
    const double chi2 = cutoff_d2(u, r0);
    const double F = chi * P;
    const double Fu = chi1 * P + chi * Pu;
    const double Fuu = chi2 * P + 2 * chi1 * Pu + chi * Puu;
    const double q = std::pow(4 * kPi * t, -0.5) * std::exp(-u * u / (4 * t));
    const double qu = q * (-u / (2 * t));
    const double quu = q * (u * u / (4 * t * t) - 1.0 / (2 * t));
    const double G_t = quu * F + q * chi * dP_dt; // d_t q = d_uu q for the 1D Gaussian
    const double G_xx = quu * F + 2 * qu * Fu + q * Fuu;
    return G_t - G_xx + potential(y + u) * q * F;
}

std::vector<std::vector<ChebSeries>> series_derivatives(const LineParametrix& par, int order2) {
    std::vector<std::vector<ChebSeries>> d(par.phi.size());
    for (std::size_t i = 0; i < par.phi.size(); ++i)
        for (const auto& s : par.phi[i]) {
            ChebSeries ds = s.derivative();
            if (order2 == 2) ds = ds.derivative();
            d[i].push_back(std::move(ds));
        }
    return d;
}

} // namespace

double parametrix_kernel_value(const LineParametrix& par, double t, double x, double y,
                               double r0) {
    const double u = wrap_offset(x - y, par.length);
    if (std::abs(u) >= r0 || std::abs(u) > par.u_max) return 0.0;
    const double q = std::pow(4 * kPi * t, -0.5) * std::exp(-u * u / (4 * t));
    double poly = 0, tp = 1;
    for (int i = 0; i <= par.order; ++i) {
        poly += tp * par.phi_at(i, y, u);
        tp *= t;
    }
    return q * smooth_cutoff(u, r0) * poly;
}

double parametrix_remainder_sup(const LineParametrix& par,
                                const std::function<double(double)>& potential, double t,
                                double r0) {
    const auto du = series_derivatives(par, 1);
    const auto duu = series_derivatives(par, 2);
    double sup = 0;
    const int nu = 401;
    for (std::size_t j = 0; j < par.ys.size(); ++j)
        for (int k = 0; k < nu; ++k) {
            const double u = -r0 + 2.0 * r0 * k / (nu - 1);
            if (std::abs(u) > par.u_max) continue;
            sup = std::max(sup,
                           std::abs(remainder_value_node(par, potential, t, j, u, r0, du, duu)));
        }
    return sup;
}

double parametrix_vs_exact_sup(const LineParametrix& par, const CircleOperator& op, double t,
                               double r0, int grid) {
    // compare at the parametrix's own base points; only the offset varies
    double sup = 0;
    for (std::size_t j = 0; j < par.ys.size(); j += 2) {
        const double y = par.ys[j];
        for (int a = 0; a < grid; ++a) {
            const double u = -r0 / 2 + r0 * a / (grid - 1); // flat part of the cutoff
            const double g = parametrix_kernel_value(par, t, y + u, y, r0);
            const double k = op.kernel(t, y + u, y).real();
            sup = std::max(sup, std::abs(g - k));
        }
    }
    return sup;
}

std::vector<double> duhamel_iterate_norms(const LineParametrix& par,
                                          const std::function<double(double)>& potential,
                                          double t, double r0, int kmax, int grid,
                                          int time_steps) {
    // kernels sampled on the theta grid (grid must divide the parametrix base
    // grid so y lands on nodes); operator composition carries the weight h.
    const double L = par.length;
    const double h = L / grid;
    const std::size_t stride = par.ys.size() / static_cast<std::size_t>(grid);
    if (stride * static_cast<std::size_t>(grid) != par.ys.size())
        throw std::invalid_argument("duhamel_iterate_norms: grid must divide the base grid");
    const int NS = time_steps;
    const double ds = t / NS;
    const auto du = series_derivatives(par, 1);
    const auto duu = series_derivatives(par, 2);

    auto r1_at = [&](double s) {
        Mat m(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
        if (s <= 0) return m;
        for (int a = 0; a < grid; ++a)
            for (int b = 0; b < grid; ++b) {
                const double x = L * a / grid;
                const std::size_t iy = static_cast<std::size_t>(b) * stride;
                const double u = wrap_offset(x - par.ys[iy], L);
                if (std::abs(u) >= r0 || std::abs(u) > par.u_max) continue;
                m(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) =
                    remainder_value_node(par, potential, s, iy, u, r0, du, duu);
            }
        return m;
    };
    auto gn_at = [&](double s) {
        Mat m(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
        for (int a = 0; a < grid; ++a)
            for (int b = 0; b < grid; ++b)
                m(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) =
                    parametrix_kernel_value(par, s, L * a / grid, L * b / grid, r0);
        return m;
    };

    std::vector<std::vector<Mat>> R(static_cast<std::size_t>(kmax) + 1);
    R[1].resize(static_cast<std::size_t>(NS) + 1);
    for (int i = 0; i <= NS; ++i) R[1][static_cast<std::size_t>(i)] = r1_at(i * ds);
    for (int k = 2; k <= kmax; ++k) {
        R[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(NS) + 1,
                                              Mat(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid)));
        for (int i = 1; i <= NS; ++i) {
            Mat acc(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
            for (int j = 0; j <= i; ++j) {
                const double w = (j == 0 || j == i) ? 0.5 : 1.0;
                const Mat term =
                    R[1][static_cast<std::size_t>(i - j)] * R[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)];
                for (std::size_t e = 0; e < acc.a.size(); ++e) acc.a[e] += w * ds * h * term.a[e];
            }
            R[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = std::move(acc);
        }
    }

    std::vector<double> norms;
    std::vector<Mat> gn(static_cast<std::size_t>(NS), Mat());
    for (int i = 0; i < NS; ++i) gn[static_cast<std::size_t>(i)] = gn_at(t - i * ds);
    for (int k = 1; k <= kmax; ++k) {
        Mat q(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
        for (int i = 0; i < NS; ++i) { // drop the s = t endpoint (G_N(0) is singular)
            const double w = (i == 0) ? 0.5 : 1.0;
            const Mat term = gn[static_cast<std::size_t>(i)] * R[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            for (std::size_t e = 0; e < q.a.size(); ++e) q.a[e] += w * ds * h * term.a[e];
        }
        norms.push_back(operator_norm(q) * h);
    }
    return norms;
}

// ---------------------------------------------------------------------------
// trace fit

TraceFit heat_trace_expansion(const std::vector<double>& ts, const std::vector<double>& traces,
                              int dimension, int order) {
    if (ts.size() != traces.size() || ts.size() < static_cast<std::size_t>(order + 1))
        throw std::invalid_argument("heat_trace_expansion: not enough samples");
    auto fit_range = [&](std::size_t count) {
        Mat a(count, static_cast<std::size_t>(order + 1));
        cvec b(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double t = ts[i];
            const double y = traces[i] * std::pow(4 * kPi * t, 0.5 * dimension);
            double tp = 1;
            for (int k = 0; k <= order; ++k) {
                a(i, static_cast<std::size_t>(k)) = tp;
                tp *= t;
            }
            b[i] = y;
        }
        double cond = 0;
        const cvec x = least_squares(a, b, &cond);
        std::vector<double> coeffs(static_cast<std::size_t>(order + 1));
        for (int k = 0; k <= order; ++k) coeffs[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)].real();
        return std::make_pair(coeffs, cond);
    };
    TraceFit out;
    auto [coeffs, cond] = fit_range(ts.size());
    out.coefficients = coeffs;
    out.condition = cond;
    auto [coeffs2, cond2] = fit_range(ts.size() / 2 + 1); // lower half of the t-range
    (void)cond2;
    double drift = 0;
    for (std::size_t k = 0; k < std::min<std::size_t>(2, coeffs.size()); ++k) {
        const double scale = std::max(std::abs(coeffs[k]), 1e-12);
        drift = std::max(drift, std::abs(coeffs[k] - coeffs2[k]) / scale);
    }
    out.drift = drift;
    return out;
}

double loglog_slope(const std::vector<double>& ts, const std::vector<double>& vs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t n = ts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(ts[i]), y = std::log(std::abs(vs[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Schwartz report

SchwartzReport schwartz_decay_check(const CircleOperator& op, double t, int kmax, int lmax,
                                    int grid) {
    SchwartzReport rep;
    rep.seminorms.assign(static_cast<std::size_t>(kmax) + 1,
                         std::vector<double>(static_cast<std::size_t>(lmax) + 1, 0.0));
    const double L = op.length();
    std::vector<double> dists, logvals;
    for (int a = 0; a < grid; ++a) {
        const double x = L * a / grid;
        const double d = std::min(x, L - x);
        for (int l = 0; l <= lmax; ++l) {
            const cplx dk = op.kernel_derivative(t, x, 0.0, l);
            for (int k = 0; k <= kmax; ++k) {
                const double v = std::pow(1 + d, k) * std::abs(dk);
                rep.seminorms[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = std::max(
                    rep.seminorms[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)], v);
            }
            // Gaussian-exponent fit window: far enough out for the exponent
            // to dominate, close enough that the spectral sum is far above
            // its cancellation noise floor (~1e-18 absolute)
            const double expo = d * d / (4 * t);
            if (l == 0 && expo > 4.0 && expo < 25.0) {
                dists.push_back(expo);
                logvals.push_back(std::log(std::abs(dk) * std::sqrt(4 * kPi * t)));
            }
        }
    }
    rep.all_finite = true;
    for (const auto& row : rep.seminorms)
        for (double v : row)
            if (!std::isfinite(v)) rep.all_finite = false;
    if (dists.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < dists.size(); ++i) {
            sx += dists[i];
            sy += logvals[i];
            sxx += dists[i] * dists[i];
            sxy += dists[i] * logvals[i];
        }
        const double n = double(dists.size());
        rep.gaussian_exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return rep;
}

Mat heat_kernel_matrix(const EigResult& eig, double t, bool square_eigenvalues) {
    const std::size_t n = eig.eigenvalues.size();
    Mat k(n, n);
    cvec col(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = eig.eigenvalues[i];
        const double w = std::exp(-t * (square_eigenvalues ? lam * lam : lam));
        if (w < 1e-300) continue;
        for (std::size_t r = 0; r < n; ++r) col[r] = eig.vectors(r, i);
        kernels::active().herk1_acc(k.a.data(), col.data(), w, n);
    }
    return k;
}

} // namespace lindex
