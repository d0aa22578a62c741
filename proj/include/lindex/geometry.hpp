#pragma once
/// Desk-scale model geometries: flat torus (1D/2D), round 2-sphere, and the
/// b-cylinder [0,1]_x x S^1 carrying the metric (dx/x)^2 + dtheta^2. The
/// b-cylinder is handled internally in the log coordinate s = log x, where it
/// is a flat cylinder; the boundary-defining function rho = x = e^s is kept
/// for the regularized integrals.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lindex {

enum class GeometryKind { FlatTorus, RoundSphere, BCylinder };

struct GeometrySpec {
    GeometryKind kind = GeometryKind::FlatTorus;
    int dimension = 2;
    std::vector<double> periods{};      // flat torus
    double radius = 1.0;                // round sphere
    double boundary_length = 6.283185307179586; // b-cylinder S^1
    double collar_extent = 60.0;        // b-cylinder: s ranges over [-collar_extent, 0]
    std::vector<int> resolution{};      // grid points per axis
    int orientation = +1;

    static GeometrySpec torus(std::vector<double> periods, std::vector<int> res);
    static GeometrySpec sphere(double radius, int n_theta, int n_phi);
    static GeometrySpec b_cylinder(double boundary_length, double collar_extent,
                                   int n_s, int n_theta);
};

using Point = std::array<double, 2>; // coordinates; second entry unused for 1D

struct CurvatureData {
    // per-sample values; for n = 2 the single independent Riemann component
    // is stored in the orthonormal frame as R_1212
    std::vector<double> scalar;        // kappa(x)
    std::vector<double> riemann_1212;  // orthonormal-frame R_1212(x)
    std::vector<double> christoffel;   // [sample][k][i][j], coordinate frame
    double max_bianchi_residual = 0.0;
    double max_antisymmetry_residual = 0.0;
    int n = 0;

    double christoffel_at(std::size_t sample, int k, int i, int j) const {
        const std::size_t nn = std::size_t(n);
        return christoffel[((sample * nn + std::size_t(k)) * nn + std::size_t(i)) * nn +
                           std::size_t(j)];
    }
};

/// Geodesic normal chart around a center point.
struct NormalChart {
    Point center{};
    double radius = 0.0;               // chart radius, below injectivity radius
    std::function<double(double)> jacobian; // J(p), J(0) = 1
};

class ModelGeometry {
public:
    explicit ModelGeometry(const GeometrySpec& spec);

    GeometryKind kind() const { return spec_.kind; }
    int dimension() const { return spec_.dimension; }
    const GeometrySpec& spec() const { return spec_; }
    bool has_boundary() const { return spec_.kind == GeometryKind::BCylinder; }
    int orientation() const { return spec_.orientation; }

    std::size_t num_samples() const { return points_.size(); }
    const Point& point(std::size_t i) const { return points_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Metric components g_{ij} in the model's coordinates at p.
    std::array<double, 4> metric_at(const Point& p) const;

    /// Boundary-defining function (identically 1 on closed models).
    double rho(const Point& p) const;

    double geodesic_distance(const Point& x, const Point& y) const;

    /// Integral of f against the volume density, using exact cell weights.
    double integrate(const std::function<double(const Point&)>& f) const;
    std::complex<double> integrate_c(const std::function<std::complex<double>(const Point&)>& f) const;

    double volume() const;

    /// b-cylinder only: ordinary integral of the density over rho >= eps.
    double truncated_volume(double eps) const;

    /// Curvature data, either from the closed-form model or by second-order
    /// finite differences of the sampled metric with step h.
    CurvatureData curvature(bool finite_difference = false, double h = 0.0) const;

    NormalChart normal_coordinates(const Point& x0, double chart_radius) const;

    double injectivity_radius() const;

    /// Total scalar curvature constant for constant-curvature models.
    double scalar_curvature_constant() const;

    std::string describe() const;

private:
    GeometrySpec spec_;
    std::vector<Point> points_;
    std::vector<double> weights_;

    void build_grid();
};

ModelGeometry build_geometry(const GeometrySpec& spec);

/// Parse the key-value geometry spec file format (documented in the CLI).
GeometrySpec parse_geometry_spec(const std::string& text);

} // namespace lindex
