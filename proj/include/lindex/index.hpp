#pragma once
/// End-to-end index pipelines: spectral (kernel-count) index, McKean-Singer
/// supertraces, the geometric characteristic integral, the eta correction,
/// and the positive-scalar-curvature obstruction check.

#include "lindex/operators.hpp"
#include "lindex/renorm.hpp"

#include <string>
#include <vector>

namespace lindex {

struct IndexReport {
    std::string geometry;
    int twist_degree = 0;
    std::vector<double> t_values;
    std::vector<double> supertraces;            // spectral Tr_s^V(e^{-t D^2})
    std::vector<double> supertraces_quadrature; // position-quadrature route (torus)
    int spectral_index = 0;
    bool spectral_index_valid = false;
    double geometric_index = 0.0;
    double eta = 0.0;
    double eta_tail_bound = 0.0;
    double mckean_singer_drift = 0.0;
    double max_cross_residual = 0.0; // |geometric - spectral|, |Tr_s - index|
    double kernel_gap_ratio = 0.0;
    bool pass = false;
    bool diagnostic_only = false; // b-cylinder branch
    std::string notes;
};

/// dim ker D+ - dim ker D-; throws when the kernel gap is ambiguous.
int spectral_index(const SpectralData& spectral);

/// Finite part of the normalized A-roof wedge Chern character (exact on the
/// flat/constant-curvature models).
double geometric_index(const ModelGeometry& geom, int twist_degree);

IndexReport verify_index_theorem(const ModelGeometry& geom, int twist_degree,
                                 const std::vector<double>& t_values, DiracOptions opt = {});

struct PscReport {
    bool applicable = false;
    double kappa_min = 0.0;
    double min_abs_eigenvalue = 0.0;
    double lichnerowicz_bound = 0.0; // sqrt(kappa_min)/2
    bool kernel_empty = false;
    int index = 0;
    double eta = 0.0;
    double geometric_a_roof = 0.0;
    bool pass = false;
    std::string notes;
};

/// Lichnerowicz vanishing on a positive-scalar-curvature model (untwisted).
PscReport psc_obstruction_check(const ModelGeometry& geom, DiracOptions opt = {});

/// Diagonal b-heat-trace value (4 pi t)^{-1/2} theta_L(t) and its finite-part
/// integral (the b-trace) on the b-cylinder.
double b_cylinder_heat_btrace(const ModelGeometry& geom, double t);

std::string index_report_json(const IndexReport& report);
std::string psc_report_json(const PscReport& report);

} // namespace lindex
