#pragma once
/// Characteristic-class series: the A-roof form of an antisymmetric curvature
/// matrix, the Chern character of a twisting curvature, and top-degree
/// integration. Everything is computed in the nilpotent exterior variables,
/// so the series terminate and the geometric side of the index comparisons
/// carries no truncation error.
///
/// a_hat and chern_character return the *unnormalized* series
/// det^{1/2}((R/2)/sinh(R/2)) and tr exp(F); the per-degree (i/2pi)^k factors
/// are applied by normalize_characteristic, which the index pipeline invokes
/// right before top_degree_integral.

#include "lindex/forms.hpp"
#include "lindex/geometry.hpp"
#include "lindex/rational.hpp"

#include <vector>

namespace lindex {

/// Taylor coefficients b_k of x/sinh(x) = sum b_k x^{2k}, exact.
std::vector<Rational> x_over_sinh_series(int terms);

/// Coefficients c_k of (x/2)/sinh(x/2) = sum c_k x^{2k}, exact.
std::vector<Rational> a_hat_scalar_series(int terms);

/// Unnormalized A-roof form det^{1/2}((R/2)/sinh(R/2)) via the
/// trace-log-exponential route. Requires R antisymmetric with homogeneous
/// degree-2 entries.
FormPolynomial<cplx> a_hat(const CurvatureMatrix& R);

/// Unnormalized Chern character tr exp(F) for a matrix-coefficient even form.
/// rank = twist-bundle rank; inferred from the coefficients when negative
/// (needed explicitly only for F = 0).
FormPolynomial<cplx> chern_character(const FormPolynomial<CMat>& F, int rank = -1);

/// Scalar (rank-1 twist) convenience overload: exp(F).
FormPolynomial<cplx> chern_character(const FormPolynomial<cplx>& F);

/// Apply the (i/2pi)^k normalization to each 2k-degree component.
FormPolynomial<cplx> normalize_characteristic(const FormPolynomial<cplx>& omega);

/// Integral of the degree-n coefficient against the geometry's density and
/// orientation. Uses the renormalized (finite-part) integral on models with a
/// boundary-defining function; for a closed model this is the plain integral.
cplx top_degree_integral(const FormPolynomial<cplx>& omega, const ModelGeometry& geom);

/// Pointwise field variant: the top coefficient varies over the sample grid.
cplx top_degree_integral_field(const std::vector<cplx>& top_coefficient_samples,
                               const ModelGeometry& geom);

} // namespace lindex
