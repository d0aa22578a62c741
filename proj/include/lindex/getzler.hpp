#pragma once
/// Rescaling pipeline: the diagonal family l_t = t^n k_{t^2} expressed in the
/// Clifford basis, the Taylor/filtration audit, the polynomial-coefficient
/// model operator on a Hermite basis, and Mehler's closed form with nilpotent
/// curvature.

#include "lindex/charclass.hpp"
#include "lindex/operators.hpp"

#include <array>
#include <string>
#include <vector>

namespace lindex {

struct RescaledFamily {
    int n = 2;
    std::vector<double> scales;          // t_j in (0, 1]
    std::vector<std::size_t> samples;    // geometry grid indices
    // components[scale][c][sample], c indexes the Clifford basis
    // {1, e1, e2, e1 e2} of End(W) (via matrix_representation inversion)
    std::vector<std::array<std::vector<cplx>, 4>> components;
    // fitted Taylor coefficients: taylor[c][power][sample], power = 0..n+1
    std::array<std::vector<std::vector<cplx>>, 4> taylor;
    const ModelGeometry* geom = nullptr;
    bool scaling_applied = true;

    static int component_degree(int c) { return c == 0 ? 0 : (c == 3 ? 2 : 1); }

    /// sup_t |tr_s l_t| samples for slope measurements
    std::vector<double> supertrace_abs() const; // per scale, integrated |tr_s|
    /// fitted limit of t^{-n} tr_s l_t at each sample
    std::vector<cplx> supertrace_limit() const;
    /// integral of the fitted limit against the geometry density
    cplx supertrace_limit_integral() const;
    /// drift of the fitted limit between the full and lower-half scale windows
    double fit_drift = 0.0;
};

/// Diagonal rescaled family from the spectral data of a torus assembly.
/// apply_scaling = false feeds the unscaled kernel k_t (negative control).
RescaledFamily scale_kernel(const DiracAssembly& assembly, const SpectralData& spectral,
                            const std::vector<double>& scales, bool apply_scaling = true,
                            std::size_t sample_stride = 1);

struct FiltrationReport {
    bool pass = false;
    double worst_violation = 0.0; // relative to the largest fitted coefficient
    double tolerance = 1e-6;
    std::string detail;
};

/// Degree audit of the rescaled sections: the t^p Taylor coefficient
/// may carry Clifford degree at most p.
FiltrationReport taylor_filtration_check(const RescaledFamily& family);

// ---------------------------------------------------------------------------
// model (limit) operator

struct ModelOperatorSpec {
    int n = 2;
    double r12 = 0.0;  // constant antisymmetric curvature parameter R_12
    cplx twist_f12 = 0.0; // twist curvature coefficient F(e_1, e_2)
};

struct ModelOperatorRealization {
    int basis_per_axis = 0;
    std::vector<double> eigenvalues;
    Mat vectors;
    Mat hamiltonian;
    Mat rotation_generator; // x1 p2 - x2 p1 in the same basis
    double truncation_residual = 0.0;
};

/// -sum_i (d_i + (1/4) sum_j R_ij x_j)^2 on the tensor Hermite basis (n = 2).
ModelOperatorRealization model_operator(const ModelOperatorSpec& spec, int hermite_per_axis = 24);

/// H = -d^2/dx^2 + a^2 x^2 in the unit-frequency Hermite basis.
struct OscillatorRealization {
    double a = 1.0;
    std::vector<double> eigenvalues;
    Mat vectors;
};
OscillatorRealization oscillator_1d(double a, int basis = 120);
/// spectral diagonal value sum_k e^{-t E_k} |psi_k(0)|^2
double oscillator_heat_diag0(const OscillatorRealization& osc, double t);
/// Mehler closed form (a / (2 pi sinh 2at))^{1/2}
double mehler_scalar_diag0(double a, double t);

/// Mehler value at the origin with nilpotent curvature:
/// (4 pi t)^{-n/2} det^{1/2}((tR/2)/sinh(tR/2)) ^ exp(t F),
/// determinant by Leibniz expansion, square root by the binomial series
/// (independent of the charclass trace-log route).
FormPolynomial<cplx> mehler_heat_value(const CurvatureMatrix& R,
                                       const FormPolynomial<cplx>& twist, double t);

/// Pointwise index density: top coefficient of the normalized A-roof wedge
/// Chern character built from the curvature data at sample x.
cplx index_density(const ModelGeometry& geom, int twist_degree, std::size_t sample);

} // namespace lindex
