#include "lindex/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

namespace lindex {

namespace {

Eigen::MatrixXcd to_eigen(const Mat& m) {
    Eigen::MatrixXcd e(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) e(long(i), long(j)) = m(i, j);
    return e;
}

} // namespace

EigResult hermitian_eigensolve(const Mat& h, double hermiticity_tol) {
    if (h.rows != h.cols) throw std::invalid_argument("eigensolve: square matrix required");
    const Mat skew = h - h.adjoint();
    const double scale = std::max(1.0, h.norm_fro());
    if (skew.norm_fro() > hermiticity_tol * scale)
        throw std::invalid_argument("eigensolve: matrix not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(h));
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    EigResult r;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    r.eigenvalues.resize(static_cast<std::size_t>(vals.size()));
    r.vectors = Mat(h.rows, h.cols);
    for (long i = 0; i < vals.size(); ++i) r.eigenvalues[static_cast<std::size_t>(i)] = vals(i);
    for (long i = 0; i < vecs.rows(); ++i)
        for (long j = 0; j < vecs.cols(); ++j) r.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = vecs(i, j);
    return r;
}

double operator_norm(const Mat& a) {
    if (a.a.empty()) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a));
    return svd.singularValues()(0);
}

cvec smallest_singular_vector(const Mat& a) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a), Eigen::ComputeFullV);
    const auto& v = svd.matrixV();
    const long last = v.cols() - 1;
    cvec r(static_cast<std::size_t>(v.rows()));
    for (long i = 0; i < v.rows(); ++i) r[static_cast<std::size_t>(i)] = v(i, last);
    return r;
}

cvec least_squares(const Mat& a, const cvec& b, double* condition) {
    Eigen::MatrixXcd ae = to_eigen(a);
    Eigen::VectorXcd be(long(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) be(long(i)) = b[i];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ae, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (condition) {
        const auto& s = svd.singularValues();
        *condition = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : INFINITY;
    }
    Eigen::VectorXcd x = svd.solve(be);
    cvec r(static_cast<std::size_t>(x.size()));
    for (long i = 0; i < x.size(); ++i) r[static_cast<std::size_t>(i)] = x(i);
    return r;
}

cvec polynomial_roots(const cvec& coeffs) {
    // strip trailing zeros
    cvec c = coeffs;
    while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();
    const int deg = int(c.size()) - 1;
    if (deg <= 0) return {};
    // normalize to monic
    for (auto& v : c) v /= coeffs[static_cast<std::size_t>(deg)];
    c[static_cast<std::size_t>(deg)] = 1.0;
    auto eval = [&](cplx z) {
        cplx p = 0.0;
        for (int k = deg; k >= 0; --k) p = p * z + c[static_cast<std::size_t>(k)];
        return p;
    };
    // Durand-Kerner from a scattered start
    cvec roots(static_cast<std::size_t>(deg));
    const cplx seed(0.4, 0.9);
    cplx w = 1.0;
    for (int i = 0; i < deg; ++i) {
        w *= seed;
        roots[static_cast<std::size_t>(i)] = w;
    }
    for (int iter = 0; iter < 200; ++iter) {
        double move = 0;
        for (int i = 0; i < deg; ++i) {
            cplx denom = 1.0;
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
            const cplx delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
            roots[static_cast<std::size_t>(i)] -= delta;
            move = std::max(move, std::abs(delta));
        }
        if (move < 1e-14) break;
    }
    return roots;
}

} // namespace lindex
