#pragma once
/// Heat-kernel machinery: the Gaussian ansatz, the parametrix coefficient
/// recursion (radial form on a normal chart, and the flat 1D two-point form
/// for Laplace-type operators with potential), exact spectral kernels and
/// traces, small-t expansion fits, Schwartz-decay reports, and the Duhamel
/// iteration norms.

#include "lindex/geometry.hpp"
#include "lindex/linalg.hpp"

#include <functional>
#include <vector>

namespace lindex {

/// Gaussian ansatz weight q(x, y; t) = (4 pi t)^{-n/2} exp(-d(x,y)^2 / 4t).
double gaussian_q(const ModelGeometry& geom, const Point& x, const Point& y, double t);

// ---------------------------------------------------------------------------
// spectral scalar operators

/// H = -d^2/dx^2 + V on the circle of length L, assembled by Fourier-Galerkin
/// projection onto |k| <= cutoff (exact for trigonometric-polynomial V).
class CircleOperator {
public:
    CircleOperator(double length, std::function<double(double)> potential, int cutoff);

    double length() const { return length_; }
    int cutoff() const { return cutoff_; }
    std::size_t size() const { return eigenvalues_.size(); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    cplx eigenfunction(std::size_t i, double x) const;
    /// l-th x-derivative of eigenfunction i
    cplx eigenfunction_derivative(std::size_t i, double x, int l) const;

    double trace_heat(double t) const;
    /// k_t(x, y), exact spectral sum
    cplx kernel(double t, double x, double y) const;
    /// d^l/dx^l k_t(x, y)
    cplx kernel_derivative(double t, double x, double y, int l) const;

    /// dense kernel matrix on a uniform grid (quadrature weight included in
    /// compose(), not here)
    Mat kernel_matrix(double t, int grid) const;

private:
    double length_;
    int cutoff_;
    std::vector<double> eigenvalues_;
    Mat vectors_; // columns in the Fourier basis e^{2 pi i k x / L} / sqrt(L)
};

/// Scalar Laplacian on the round sphere: exact trace via the l(l+1) spectrum.
double sphere_scalar_heat_trace(double radius, double t, int lmax = 384);

// ---------------------------------------------------------------------------
// parametrix recursion
//
// The coefficient recursion applies the Laplacian to the previous
// coefficient; grid differencing would amplify quadrature noise by 1/h^2 per
// level, so the coefficients are carried as Chebyshev series and
// differentiated spectrally.

struct ChebSeries {
    double lo = 0.0, hi = 1.0;
    std::vector<double> c;

    static ChebSeries fit(double lo, double hi, int degree,
                          const std::function<double(double)>& f);
    double eval(double x) const;
    ChebSeries derivative() const;
};

/// Radial parametrix coefficients Phi_0..Phi_N for the scalar Laplacian on a
/// model geometry around a center point; series in q = p^2 (radial functions
/// are even), valid for p in [0, p_max].
struct RadialExpansion {
    double p_max = 0.0;
    std::vector<ChebSeries> phi_series; // in q = p^2
    std::vector<double> radii;          // sample grid (for inspection)
    std::vector<std::vector<double>> phi;
    double phi_at(int i, double p) const;
};
RadialExpansion parametrix_radial(const ModelGeometry& geom, int order, double p_max,
                                  int degree = 96);

/// Two-point parametrix Phi_i(y, u), u = x - y, for H = -d^2 + V on the
/// circle; transport is along the straight segment from y to x. Chebyshev in
/// the offset u per base point y.
struct LineParametrix {
    double length = 0;
    int order = 0;
    double u_max = 0;
    std::vector<double> ys;
    std::vector<std::vector<ChebSeries>> phi; // [i][iy], series in u
    double phi_at(int i, double y, double u) const; // periodic cubic in y
    double phi_node(int i, std::size_t iy, double u) const;
};
LineParametrix parametrix_line(double length, const std::function<double(double)>& potential,
                               int order, double u_max, int ny = 96, int degree = 64);

/// Smooth cutoff: 1 on [0, r0/2], 0 beyond r0.
double smooth_cutoff(double distance, double r0);

/// G_N(t, x, y) = q chi sum t^i Phi_i for the line parametrix.
double parametrix_kernel_value(const LineParametrix& par, double t, double x, double y,
                               double r0);

/// sup over the chart of |(d_t + H) G_N| at time t.
double parametrix_remainder_sup(const LineParametrix& par,
                                const std::function<double(double)>& potential, double t,
                                double r0);

/// sup_x,y |G_N(t,x,y) - k_t(x,y)| against the exact spectral kernel.
double parametrix_vs_exact_sup(const LineParametrix& par, const CircleOperator& op, double t,
                               double r0, int grid = 128);

/// Norms of the Duhamel iterates Q_N^{(k)}, k = 1..kmax, at time t.
std::vector<double> duhamel_iterate_norms(const LineParametrix& par,
                                          const std::function<double(double)>& potential,
                                          double t, double r0, int kmax, int grid = 64,
                                          int time_steps = 24);

// ---------------------------------------------------------------------------
// trace expansion fit

struct TraceFit {
    std::vector<double> coefficients; // a_0 .. a_K
    double condition = 0;
    double drift = 0;                 // relative change under halving the t-range
};

/// Least-squares fit of trace(t) * (4 pi t)^{n/2} = sum a_i t^i.
TraceFit heat_trace_expansion(const std::vector<double>& ts, const std::vector<double>& traces,
                              int dimension, int order);

/// log-log slope of samples (t_i, v_i) by linear regression.
double loglog_slope(const std::vector<double>& ts, const std::vector<double>& vs);

// ---------------------------------------------------------------------------
// Schwartz-decay report

struct SchwartzReport {
    std::vector<std::vector<double>> seminorms; // [k][l]
    bool all_finite = false;
    double gaussian_exponent = 0; // fitted coefficient of d^2/(4t), expect 1
};
SchwartzReport schwartz_decay_check(const CircleOperator& op, double t, int kmax = 4,
                                    int lmax = 4, int grid = 192);

// ---------------------------------------------------------------------------
// generic spectral helpers

/// V diag(w(lambda)) V^dagger with w = exp(-t lambda^2) (square = true) or
/// exp(-t lambda) (square = false).
Mat heat_kernel_matrix(const EigResult& eig, double t, bool square_eigenvalues);

} // namespace lindex
